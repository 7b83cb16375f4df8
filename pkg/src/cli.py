"""
Command-line front end.

    residue    --input DATA --psi <euler | L | p:<i,j,...> | expr:<text>>
    euler      --input DATA --chi 1,1,...  [--cross-check]
    signature  --input DATA
    pontryagin --input DATA
    kronecker  --weights MATRIX | --quadratic a,b,c,d
    skeigen    --matrix MATRIX [--commutant L]
    model      --kind <cpm|s4|klein> [--alphas ...] | --preset NAME  [--double-cover] [--output FILE]

Exact values are the primary output; --approx d adds a rounded decimal.
Exit status: 0 ok, 1 input error, 2 mathematical precondition violated.
"""
import argparse
import json
import logging
import os
import re
import sys
import time
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction

import pandas as pd
import pandera as pa
from pandera import Check, Column, DataFrameSchema

try:
    from .charforms import resolve_psi
    from .dataset_io import (dump_dataset, load_config, load_dataset, load_model_presets, load_rat_matrix,
                             load_skew_matrix, load_weight_matrix, resolve_threads)
    from .errors import ConsistencyError, InputError, ResidueError
    from .exactnum import format_decimal, format_rat, parse_rat
    from .kronecker import annihilator_basis, closure_dimension, quadratic_eigenvector_weights
    from .localize import (build_model, component_residues, double_cover, euler_characteristic,
                           halving_factor, point_indices, pontryagin_numbers, signature_via_indices,
                           skeigen_basis, skeigen_decompose, verify_commutant)
except ImportError:
    from charforms import resolve_psi
    from dataset_io import (dump_dataset, load_config, load_dataset, load_model_presets, load_rat_matrix,
                            load_skew_matrix, load_weight_matrix, resolve_threads)
    from errors import ConsistencyError, InputError, ResidueError
    from exactnum import format_decimal, format_rat, parse_rat
    from kronecker import annihilator_basis, closure_dimension, quadratic_eigenvector_weights
    from localize import (build_model, component_residues, double_cover, euler_characteristic,
                          halving_factor, point_indices, pontryagin_numbers, signature_via_indices,
                          skeigen_basis, skeigen_decompose, verify_commutant)

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(REPO_ROOT, 'configs', 'localize.yaml')

RESIDUE_REPORT_SCHEMA = DataFrameSchema({
    "component": Column(pa.String, nullable=False, unique=True),
    "residue": Column(pa.Object, Check(lambda v: isinstance(v, Fraction), element_wise=True), nullable=False),
})


@dataclass
class RunReport:
    """Per-component residues of one psi over one dataset, with the (possibly halved) total."""

    label: str
    residues: list
    total: Fraction
    halved: bool
    elapsed: float = 0.0
    approx_digits: int = None

    def to_frame(self):
        frame = pd.DataFrame(
            {'component': [name for name, _ in self.residues], 'residue': [value for _, value in self.residues]},
            columns=['component', 'residue'],
        )
        frame['residue'] = frame['residue'].astype(object)
        try:
            return RESIDUE_REPORT_SCHEMA.validate(frame, lazy=True)
        except pa.errors.SchemaErrors as exc:
            raise ConsistencyError(f"Residue report for '{self.label}' failed validation: {exc}") from exc

    def check_total(self):
        expected = sum((v for _, v in self.residues), Fraction(0)) * (Fraction(1, 2) if self.halved else 1)
        if expected != self.total:
            raise ConsistencyError(
                f"Report total {format_rat(self.total)} != {'1/2 * ' if self.halved else ''}sum of residues "
                f"{format_rat(expected)}"
            )

    def render(self):
        self.check_total()
        frame = self.to_frame()
        shown = pd.DataFrame({'component': frame['component'], 'residue': frame['residue'].map(format_rat)})
        lines = [f"psi = {self.label}", shown.to_string(index=False)]
        if self.halved:
            lines.append("halved = yes (non-orientable flow, double-cover sum)")
        lines.append(f"total = {format_rat(self.total)}")
        if self.approx_digits is not None:
            lines.append(f"approx = {format_decimal(self.total, self.approx_digits)}")
        return '\n'.join(lines)

    def save(self, output_dir, dataset_path=None):
        """
        Write the residue CSV and metadata JSON under output_dir.

        Raises:
            InputError: output_dir cannot be created or written
        """
        stem = re.sub(r'[^A-Za-z0-9_.-]+', '_', self.label).strip('_') or 'psi'
        csv_path = os.path.join(output_dir, f"{stem}_residues.csv")
        meta_path = os.path.join(output_dir, f"{stem}_metadata.json")
        frame = self.to_frame()
        meta = {
            'psi': self.label,
            'halved': self.halved,
            'total': format_rat(self.total),
            'n_components': len(self.residues),
            'dataset': dataset_path,
            'elapsed_seconds': round(self.elapsed, 6),
            'timestamp': datetime.now().strftime("%Y%m%d_%H%M%S"),
        }
        try:
            os.makedirs(output_dir, exist_ok=True)
            frame.assign(residue=frame['residue'].map(format_rat)).to_csv(csv_path, index=False)
            with open(meta_path, 'w') as f:
                json.dump(meta, f, indent=2)
        except OSError as exc:
            logging.error(f"Cannot write report to {output_dir}: {exc}")
            raise InputError(f"Cannot write report to {output_dir}: {exc}") from exc
        logging.info(f"Saved {len(self.residues)} residues to {csv_path}")
        return csv_path, meta_path


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _non_negative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _rat_list(text):
    return [parse_rat(part.strip()) for part in text.split(',') if part.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='Runtime YAML config (default: configs/localize.yaml)')
    common.add_argument('--approx', type=_non_negative_int, default=None,
                        help='Also print totals rounded to this many decimal digits')
    common.add_argument('--output-dir', type=str, default=None, help='Write residue CSV + metadata JSON here')

    parser = _ArgumentParser(prog='run_residues', description='Characteristic numbers from fixed-point data of flows.')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_ArgumentParser)

    p = sub.add_parser('residue', parents=[common], help='Residues and total of one invariant form')
    p.add_argument('--input', required=True, help='FlowFixedData JSON')
    p.add_argument('--psi', required=True, help="euler | L | p:<partition> | expr:<psi-hat expression>")

    p = sub.add_parser('euler', parents=[common], help='Euler characteristic from component Euler characteristics')
    p.add_argument('--input', required=True)
    p.add_argument('--chi', required=True, help='Comma-separated chi(Sigma_j), one per component')
    p.add_argument('--cross-check', action='store_true', help='Compare with the Pfaffian residue sum')

    p = sub.add_parser('signature', parents=[common], help='Signature from indices at isolated points')
    p.add_argument('--input', required=True)

    p = sub.add_parser('pontryagin', parents=[common], help='Table of Pontryagin numbers')
    p.add_argument('--input', required=True)

    p = sub.add_parser('kronecker', parents=[common], help='Closure dimension of a linear flow')
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--weights', help='WeightMatrix JSON (array of arrays of "p/q")')
    group.add_argument('--quadratic', help='a,b,c,d of a symmetric SL(2,Z) matrix with trace > 2')

    p = sub.add_parser('skeigen', parents=[common], help='Skeigen-values of a skew-symmetric matrix')
    p.add_argument('--matrix', required=True, help='Skew-symmetric matrix JSON')
    p.add_argument('--commutant', default=None, help='Matrix L to test against the commutant of A')

    p = sub.add_parser('model', parents=[common], help='Emit a model dataset as JSON')
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument('--kind', choices=['cpm', 's4', 'klein'])
    src.add_argument('--preset', help='Preset name from the models YAML')
    p.add_argument('--alphas', type=_rat_list, default=None, help='cpm: alpha_0=0,alpha_1,...,alpha_m')
    p.add_argument('--alpha', type=parse_rat, default=None, help='s4: first weight')
    p.add_argument('--beta', type=parse_rat, default=None, help='s4: second weight')
    p.add_argument('--double-cover', action='store_true', help='Duplicate components, flow_orientable = false')
    p.add_argument('--output', default=None, help='Write the dataset here instead of stdout')
    return parser


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_residue(args, config, threads):
    data = load_dataset(args.input)
    psi = resolve_psi(args.psi, data.m)
    start = time.perf_counter()
    residues = component_residues(psi, data, threads)
    total = sum((v for _, v in residues), Fraction(0)) * halving_factor(data)
    report = RunReport(psi.label, residues, total, not data.flow_orientable,
                       elapsed=time.perf_counter() - start, approx_digits=args.approx)
    logging.info(f"Computed {psi.label}[M] = {format_rat(total)} in {report.elapsed:.3f}s")
    output_dir = args.output_dir or config['report'].get('output_dir')
    if output_dir:
        report.save(output_dir, args.input)
    return report.render()


def cmd_euler(args, config, threads):
    data = load_dataset(args.input)
    chi_values = _rat_list(args.chi)
    total = euler_characteristic(data, chi_values, cross_check=args.cross_check, threads=threads)
    frame = pd.DataFrame({'component': [c.name for c in data.components], 'chi': [format_rat(v) for v in chi_values]})
    lines = [frame.to_string(index=False)]
    if not data.flow_orientable:
        lines.append("halved = yes (non-orientable flow, double-cover sum)")
    lines.append(f"chi = {format_rat(total)}")
    if args.approx is not None:
        lines.append(f"approx = {format_decimal(total, args.approx)}")
    return '\n'.join(lines)


def cmd_signature(args, config, threads):
    data = load_dataset(args.input)
    indices = point_indices(data)
    sigma = signature_via_indices(data)
    frame = pd.DataFrame({'component': [n for n, _ in indices], 'index': [f"{e:+d}" for _, e in indices]})
    lines = [frame.to_string(index=False)]
    if not data.flow_orientable:
        lines.append("halved = yes (non-orientable flow, double-cover sum)")
    lines.append(f"sigma = {sigma}")
    return '\n'.join(lines)


def cmd_pontryagin(args, config, threads):
    data = load_dataset(args.input)
    table = pontryagin_numbers(data, threads)
    frame = pd.DataFrame({
        'partition': ['p_' + '_'.join(str(i) for i in part) for part in table],
        'value': [format_rat(v) for v in table.values()],
    })
    return frame.to_string(index=False)


def cmd_kronecker(args, config, threads):
    if args.weights:
        weights = load_weight_matrix(args.weights)
    else:
        try:
            entries = [int(x) for x in args.quadratic.split(',')]
        except ValueError:
            entries = []
        if len(entries) != 4:
            raise InputError(f"--quadratic expects four integers a,b,c,d, got {args.quadratic!r}")
        weights = quadratic_eigenvector_weights([entries[:2], entries[2:]])
    dim_span, dim_annihilator = closure_dimension(weights)
    lines = [f"k = {weights.k}", f"dim_span = {dim_span}", f"dim_annihilator = {dim_annihilator}"]
    for beta in annihilator_basis(weights):
        lines.append("annihilator = (" + ", ".join(str(x) for x in beta) + ")")
    return '\n'.join(lines)


def cmd_skeigen(args, config, threads):
    a = load_skew_matrix(args.matrix)
    decomposition = skeigen_decompose(a)
    frame = pd.DataFrame({
        'lambda': [format_rat(lam) for lam, _ in decomposition],
        'mult': [mult for _, mult in decomposition],
    })
    lines = [frame.to_string(index=False)]
    for lam, odd, even in skeigen_basis(a):
        lines.append(f"lambda = {format_rat(lam)}: "
                     f"e_odd = ({', '.join(map(format_rat, odd))}), e_even = ({', '.join(map(format_rat, even))})")
    if args.commutant:
        report = verify_commutant(load_rat_matrix(args.commutant), a)
        lines.append(("commutant: ok, " if report.passed else "commutant: failed, ") + report.describe())
    return '\n'.join(lines)


def cmd_model(args, config, threads):
    if args.preset:
        presets = load_model_presets(_resolve_path(config['models'].get('presets_path')))
        if args.preset not in presets:
            raise InputError(f"Unknown preset {args.preset!r}; available: {sorted(presets)}")
        params = dict(presets[args.preset])
        kind = params.pop('kind')
        params.pop('description', None)
    else:
        kind, params = args.kind, {}
        if kind == 'cpm':
            if args.alphas is None:
                raise InputError("model --kind cpm needs --alphas")
            params['alphas'] = args.alphas
        elif kind == 's4':
            params['alpha'] = args.alpha if args.alpha is not None else Fraction(1)
            params['beta'] = args.beta if args.beta is not None else Fraction(1)
    data = build_model(kind, **params)
    if args.double_cover:
        data = double_cover(data)
    text = dump_dataset(data, args.output)
    return f"wrote {args.output}" if args.output else text


def _resolve_path(path):
    if path and not os.path.isabs(path):
        return os.path.join(REPO_ROOT, path)
    return path


COMMANDS = {
    'residue': cmd_residue,
    'euler': cmd_euler,
    'signature': cmd_signature,
    'pontryagin': cmd_pontryagin,
    'kronecker': cmd_kronecker,
    'skeigen': cmd_skeigen,
    'model': cmd_model,
}


def configure_logging(config):
    level = str(config['logging'].get('level', 'INFO')).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format=config['logging'].get('format'), stream=sys.stderr, force=True)


def run(argv=None, stdout=None, stderr=None):
    """Parse argv, run one subcommand, print its report. Returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        config_path = args.config or (DEFAULT_CONFIG_PATH if os.path.exists(DEFAULT_CONFIG_PATH) else None)
        config = load_config(config_path)
        configure_logging(config)
        if args.approx is None and config['report'].get('approx_digits') is not None:
            args.approx = _non_negative_int(str(config['report']['approx_digits']))
        threads = resolve_threads(config)
        text = COMMANDS[args.command](args, config, threads)
    except ResidueError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.exit_code
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    print(text, file=stdout)
    return 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
