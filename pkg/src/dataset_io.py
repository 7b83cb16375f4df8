import json
import logging
import os

import pandas as pd
import pandera as pa
import yaml
from pandera import Check, Column, DataFrameSchema

try:
    from .errors import (ConfigError, DatasetFormatError, DimensionMismatchError, InputError, RationalFormatError,
                         ResidueError)
    from .exactnum import format_rat, parse_rat, to_rat
    from .kronecker import WeightMatrix
    from .localize import FlowFixedData, IntegrationOracle, NormalWeight, SkewBlockMatrix, StratumComponent
except ImportError:
    from errors import (ConfigError, DatasetFormatError, DimensionMismatchError, InputError, RationalFormatError,
                        ResidueError)
    from exactnum import format_rat, parse_rat, to_rat
    from kronecker import WeightMatrix
    from localize import FlowFixedData, IntegrationOracle, NormalWeight, SkewBlockMatrix, StratumComponent

DIMENSION_SUM_CHECK = "m0 + normal_rank must equal m"
POSITIVE_DIMENSION_CHECK = "component has dimension 0"
# Failures here are dimension mismatches (exit 2), not format errors
DIMENSION_COLUMNS = frozenset({"m0", "normal_rank", "m"})

# One row per stratum component; m is the ambient half-dimension repeated per row
COMPONENT_SCHEMA = DataFrameSchema(
    {
        "name": Column(pa.String, Check.str_length(min_value=1), nullable=False, unique=True),
        "m0": Column(pa.Int, Check.ge(0), nullable=False),
        "normal_rank": Column(pa.Int, Check.ge(0), nullable=False),
        "m": Column(pa.Int, Check.gt(0), nullable=False),
        "orientation_matches": Column(pa.Bool, nullable=False),
    },
    checks=[
        Check(lambda df: df["m0"] + df["normal_rank"] == df["m"], error=DIMENSION_SUM_CHECK),
        Check(lambda df: df["m0"] + df["normal_rank"] > 0, error=POSITIVE_DIMENSION_CHECK),
    ],
)

DEFAULT_CONFIG = {
    'logging': {'level': 'INFO', 'format': '%(asctime)s %(levelname)s %(message)s'},
    'runtime': {'threads': None},
    'report': {'approx_digits': None, 'output_dir': None},
    'models': {'presets_path': 'configs/models.yaml'},
}

THREADS_ENV = 'RESIDUE_THREADS'


def load_config(path):
    """
    Load the runtime YAML config, falling back to DEFAULT_CONFIG per key.

    Raises:
        ConfigError: unreadable file or a top-level value that is not a mapping
    """
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    if path is None:
        return config
    try:
        with open(path, 'r') as f:
            loaded = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as exc:
        logging.error(f"Cannot read config {path}: {exc}")
        raise ConfigError(f"Cannot read config {path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError(f"Config {path} must be a mapping, got {type(loaded).__name__}")
    for section, values in loaded.items():
        if not isinstance(values, dict):
            raise ConfigError(f"Config section '{section}' in {path} must be a mapping")
        config.setdefault(section, {}).update(values)
    return config


def resolve_threads(config, environ=None):
    """Worker count: RESIDUE_THREADS, then runtime.threads, then the CPU count."""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    source = THREADS_ENV
    if raw is None:
        raw = config.get('runtime', {}).get('threads')
        source = 'runtime.threads'
    if raw is None:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except (TypeError, ValueError):
        threads = 0
    if threads <= 0 or str(raw).strip() != str(threads):
        raise ConfigError(f"{source} must be a positive integer, got {raw!r}")
    return threads


def load_model_presets(path):
    """
    Load named model presets from YAML.

    Raises:
        ValueError: a preset is missing its required 'kind'
    """
    try:
        with open(path, 'r') as f:
            loaded = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot read model presets {path}: {exc}") from exc
    presets = loaded.get('models') if isinstance(loaded, dict) else None
    if not isinstance(presets, dict):
        raise ConfigError(f"Model presets file {path} needs a top-level 'models' mapping")
    for name, preset in presets.items():
        if not isinstance(preset, dict) or 'kind' not in preset:
            logging.error(f"Model preset '{name}' is missing required 'kind' in YAML config.")
            raise ValueError(f"Model preset '{name}' is missing required 'kind' in YAML config.")
    return presets


# =============================================================================
# JSON DOCUMENTS
# =============================================================================

def _read_json(path):
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise DatasetFormatError(f"Cannot read {path}: {exc}") from exc


def _rat(value, where):
    if isinstance(value, str):
        try:
            return parse_rat(value)
        except RationalFormatError as exc:
            raise DatasetFormatError(f"{where}: {exc}") from exc
    if isinstance(value, int) and not isinstance(value, bool):
        return to_rat(value)
    raise DatasetFormatError(f"{where}: expected a rational string like \"3/4\", got {value!r}")


def _require(doc, key, kind, where):
    if not isinstance(doc, dict) or key not in doc:
        raise DatasetFormatError(f"{where}: missing required key '{key}'")
    value = doc[key]
    if kind is None:
        return value
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise DatasetFormatError(f"{where}.{key}: expected an integer, got {value!r}")
    if kind is not int and not isinstance(value, kind):
        raise DatasetFormatError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _component_table(doc, m):
    rows = []
    for idx, comp in enumerate(doc):
        where = f"components[{idx}]"
        weights = _require(comp, 'weights', list, where)
        rows.append({
            'name': _require(comp, 'name', str, where),
            'm0': _require(comp, 'm0', int, where),
            'normal_rank': sum(_require(w, 'mult', int, f"{where}.weights[{j}]") for j, w in enumerate(weights)),
            'm': m,
            'orientation_matches': comp.get('orientation_matches', True),
        })
    return pd.DataFrame(rows, columns=list(COMPONENT_SCHEMA.columns))


def _is_dimension_failure(cases):
    return any(
        (isinstance(row.column, str) and row.column in DIMENSION_COLUMNS)
        or any(marker in str(row.check) for marker in (DIMENSION_SUM_CHECK, POSITIVE_DIMENSION_CHECK))
        for row in cases.itertuples()
    )


def validate_components(doc, m, source='<dataset>'):
    """Validate the component table of a dataset document with COMPONENT_SCHEMA (lazy)."""
    table = _component_table(doc, m)
    try:
        return COMPONENT_SCHEMA.validate(table, lazy=True)
    except pa.errors.SchemaErrors as exc:
        cases = exc.failure_cases
        summary = '; '.join(
            f"{row.column if isinstance(row.column, str) else 'table'}: {row.check} (failure case {row.failure_case!r})"
            for row in cases.head(5).itertuples()
        )
        logging.error(f"Dataset {source} failed component validation: {summary}")
        if _is_dimension_failure(cases):
            raise DimensionMismatchError(f"{source}: component validation failed: {summary}") from exc
        raise DatasetFormatError(f"{source}: component validation failed: {summary}") from exc


def parse_dataset(doc, source='<dataset>'):
    """Build FlowFixedData from a decoded JSON document."""
    m = _require(doc, 'm', int, source)
    flow_orientable = _require(doc, 'flow_orientable', bool, source)
    components_doc = _require(doc, 'components', list, source)
    if not components_doc:
        raise DatasetFormatError(f"{source}: 'components' must be non-empty")
    validate_components(components_doc, m, source)

    components = []
    for idx, comp in enumerate(components_doc):
        where = f"{source}: components[{idx}]"
        weights = tuple(
            NormalWeight(_rat(_require(w, 'mu', None, f"{where}.weights[{j}]"), f"{where}.weights[{j}].mu"), w['mult'])
            for j, w in enumerate(comp['weights'])
        )
        oracle_doc = comp.get('oracle')
        oracle = None
        if oracle_doc is not None:
            if not isinstance(oracle_doc, dict):
                raise DatasetFormatError(f"{where}.oracle: expected an object")
            oracle = IntegrationOracle(comp['m0'], {k: _rat(v, f"{where}.oracle[{k!r}]") for k, v in oracle_doc.items()})
        try:
            components.append(StratumComponent(comp['name'], comp['m0'], weights,
                                               comp.get('orientation_matches', True), oracle))
        except ResidueError:
            logging.error(f"Invalid component at {where}")
            raise
    data = FlowFixedData(m, flow_orientable, tuple(components))
    logging.info(f"Loaded dataset {source}: m = {m}, {len(components)} components, orientable = {flow_orientable}")
    return data


def load_dataset(path):
    return parse_dataset(_read_json(path), source=str(path))


def dataset_to_dict(data):
    return {
        'm': data.m,
        'flow_orientable': data.flow_orientable,
        'components': [
            {
                'name': comp.name,
                'm0': comp.m0,
                'weights': [{'mu': format_rat(w.mu), 'mult': w.mult} for w in comp.normal_weights],
                'orientation_matches': comp.orientation_matches,
                'oracle': comp.oracle.as_strings() if comp.oracle is not None else {},
            }
            for comp in data.components
        ],
    }


def dump_dataset(data, path=None):
    """Serialise a dataset to JSON text; also write it to `path` when given."""
    text = json.dumps(dataset_to_dict(data), indent=2)
    if path is not None:
        try:
            with open(path, 'w') as f:
                f.write(text + '\n')
        except OSError as exc:
            logging.error(f"Cannot write dataset {path}: {exc}")
            raise InputError(f"Cannot write {path}: {exc}") from exc
        logging.info(f"Saved dataset to {path}")
    return text


def _rat_rows(doc, source):
    if not isinstance(doc, list) or not all(isinstance(row, list) for row in doc):
        raise DatasetFormatError(f"{source}: expected a JSON array of arrays")
    return [[_rat(x, f"{source}[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(doc)]


def load_weight_matrix(path):
    return WeightMatrix(tuple(tuple(row) for row in _rat_rows(_read_json(path), str(path))))


def load_skew_matrix(path):
    return SkewBlockMatrix(tuple(tuple(row) for row in _rat_rows(_read_json(path), str(path))))


def load_rat_matrix(path):
    return _rat_rows(_read_json(path), str(path))
