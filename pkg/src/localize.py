"""
Residue formula for characteristic numbers of manifolds carrying a singular
Riemannian flow, and the linear algebra of the flow near its fixed points.

A characteristic number phi[M] is the sum over components Sigma_j of the
singular stratum of

    phi(Lambda_X) / chi(Lambda_X^nu)  [Sigma_j]

computed in the truncated Chern-root ring of the component (cutoff m0 =
complex dimension of Sigma_j), reduced to characteristic-class generators
and paired with the component's integration oracle. Non-orientable flows
are handled on the orientation double cover, with the sum halved.

Weights are kept rational and unnormalised: every residue is invariant
under mu -> c*mu, so the unit-sphere normalisation of the weight vector is
never applied (see normalize_weights).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import isqrt

try:
    from .charforms import partitions, pfaffian_poly, pontryagin_poly
    from .errors import (ConsistencyError, DegenerateWeightError, DimensionMismatchError,
                         IncompleteOracleError, InputError, IrrationalSkeigenError,
                         NotReducibleError, PreconditionError, UnsupportedDimensionError,
                         UnsupportedStratumError)
    from .exactnum import format_rat, to_rat
    from .polyring import (Generator, GeneratorMonomial, GroupSpec, TruncatedPoly, invert_unit,
                           parse_generator_monomial, reduce_to_generators, shift_vars)
    from .utils import (as_fraction_matrix, characteristic_polynomial, determinant, dot,
                        identity_matrix, mat_add, mat_mul, mat_vec, nullspace,
                        rational_roots)
except ImportError:
    from charforms import partitions, pfaffian_poly, pontryagin_poly
    from errors import (ConsistencyError, DegenerateWeightError, DimensionMismatchError,
                        IncompleteOracleError, InputError, IrrationalSkeigenError,
                        NotReducibleError, PreconditionError, UnsupportedDimensionError,
                        UnsupportedStratumError)
    from exactnum import format_rat, to_rat
    from polyring import (Generator, GeneratorMonomial, GroupSpec, TruncatedPoly, invert_unit,
                          parse_generator_monomial, reduce_to_generators, shift_vars)
    from utils import (as_fraction_matrix, characteristic_polynomial, determinant, dot,
                       identity_matrix, mat_add, mat_mul, mat_vec, nullspace,
                       rational_roots)


# =============================================================================
# DATA MODEL
# =============================================================================

@dataclass(frozen=True)
class NormalWeight:
    """A distinct skeigen-value mu of Lambda_X^nu with its complex multiplicity."""

    mu: Fraction
    mult: int

    def __post_init__(self):
        object.__setattr__(self, 'mu', to_rat(self.mu))
        if not isinstance(self.mult, int) or self.mult <= 0:
            raise DegenerateWeightError(f"Multiplicity must be a positive integer, got {self.mult!r}")


@dataclass(frozen=True)
class IntegrationOracle:
    """
    Integrals over Sigma_j of top-degree generator monomials.

    Lookups never default to zero: a missing monomial is an error.
    """

    m0: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        entries = {}
        for key, value in dict(self.entries).items():
            if isinstance(key, str):
                key = parse_generator_monomial(key, self.m0)
            if key.degree != self.m0:
                raise DimensionMismatchError(
                    f"Oracle entry {key.render()} has degree {key.degree}, expected m0 = {self.m0}"
                )
            entries[key] = to_rat(value)
        object.__setattr__(self, 'entries', entries)

    def lookup(self, monomial, component_name='?'):
        try:
            return self.entries[monomial]
        except KeyError:
            logging.error(f"Oracle of component '{component_name}' has no entry for {monomial.render()}")
            raise IncompleteOracleError(
                f"Incomplete oracle: component '{component_name}' needs the integral of {monomial.render()}",
                monomial=monomial.render(),
            ) from None

    def has(self, monomial):
        return monomial in self.entries

    def as_strings(self):
        return {mono.render(): format_rat(v) for mono, v in self.entries.items()}


def euler_monomial(m0):
    return GeneratorMonomial.of(Generator(0, 'e', m0))


@dataclass(frozen=True)
class StratumComponent:
    """
    One connected component Sigma_j of the singular stratum.

    normal_weights lists the distinct skeigen-values mu_1..mu_tau of
    Lambda_X^nu with complex multiplicities; they are constant data per
    component. The normal bundles are labelled E1..E_tau in this order.
    orientation_matches only matters for isolated points (m0 = 0).
    """

    name: str
    m0: int
    normal_weights: tuple
    orientation_matches: bool = True
    oracle: IntegrationOracle = None

    def __post_init__(self):
        weights = tuple(w if isinstance(w, NormalWeight) else NormalWeight(*w) for w in self.normal_weights)
        object.__setattr__(self, 'normal_weights', weights)
        if not isinstance(self.m0, int) or self.m0 < 0:
            raise DimensionMismatchError(f"Component '{self.name}': m0 must be a non-negative integer")
        mus = [w.mu for w in weights]
        if any(mu <= 0 for mu in mus):
            raise DegenerateWeightError(
                f"Component '{self.name}': normal weights must be positive (each alpha_j nonzero), got "
                f"{[format_rat(mu) for mu in mus]}"
            )
        if len(set(mus)) != len(mus):
            raise DegenerateWeightError(
                f"Component '{self.name}': normal weights must be distinct; merge repeats into a multiplicity"
            )
        if self.m0 + self.normal_rank == 0:
            raise DimensionMismatchError(f"Component '{self.name}' has dimension 0")
        if self.oracle is not None:
            if isinstance(self.oracle, dict):
                object.__setattr__(self, 'oracle', IntegrationOracle(self.m0, self.oracle))
            self._check_oracle_keys()

    def _check_oracle_keys(self):
        if self.oracle.m0 != self.m0:
            raise DimensionMismatchError(
                f"Component '{self.name}': oracle built for m0 = {self.oracle.m0}, component has m0 = {self.m0}"
            )
        ranks = {i + 1: w.mult for i, w in enumerate(self.normal_weights)}
        for mono in self.oracle.entries:
            for gen, _ in mono.factors:
                ok = (
                    (gen.kind == 'e' and self.m0 > 0 and gen.index == self.m0)
                    or (gen.kind == 'p' and self.m0 > 0 and 1 <= gen.index < self.m0)
                    or (gen.kind == 'c' and gen.bundle in ranks and 1 <= gen.index <= ranks[gen.bundle])
                )
                if not ok:
                    raise DimensionMismatchError(
                        f"Component '{self.name}': oracle key {mono.render()} uses {gen.render()}, "
                        f"which is not a generator of this component's bundles"
                    )

    @classmethod
    def from_signed_weights(cls, name, weights):
        """
        Isolated fixed point from the signed rotation constants of the local model.

        A negative weight is a positive weight on the conjugate coordinate,
        which reverses that factor's complex orientation; hence the flag is
        True iff the number of negative weights is even.
        """
        weights = [to_rat(w) for w in weights]
        if not weights or any(w == 0 for w in weights):
            raise DegenerateWeightError(f"Component '{name}': weights must be nonzero, got {weights}")
        counts = {}
        for w in weights:
            counts[abs(w)] = counts.get(abs(w), 0) + 1
        negatives = sum(1 for w in weights if w < 0)
        return cls(
            name=name,
            m0=0,
            normal_weights=tuple(NormalWeight(mu, counts[mu]) for mu in sorted(counts)),
            orientation_matches=(negatives % 2 == 0),
        )

    @property
    def normal_rank(self):
        return sum(w.mult for w in self.normal_weights)

    @property
    def m(self):
        return self.m0 + self.normal_rank

    @property
    def is_isolated(self):
        return self.m0 == 0

    @property
    def group_spec(self):
        return GroupSpec.for_component(self.m0, [w.mult for w in self.normal_weights])

    def offsets(self):
        """Skeigen-values lambda_1..lambda_m: 0 (m0 times), then each mu repeated mult times."""
        return [Fraction(0)] * self.m0 + [w.mu for w in self.normal_weights for _ in range(w.mult)]

    def expanded_weights(self):
        return [w.mu for w in self.normal_weights for _ in range(w.mult)]

    def scaled(self, c):
        c = to_rat(c)
        if c <= 0:
            raise DegenerateWeightError(f"Scale factor must be positive, got {c}")
        return replace(self, normal_weights=tuple(NormalWeight(w.mu * c, w.mult) for w in self.normal_weights))


@dataclass(frozen=True)
class FlowFixedData:
    """Fixed-point data of a flow on a closed oriented 2m-manifold."""

    m: int
    flow_orientable: bool
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(self.components))
        if not isinstance(self.m, int) or self.m < 1:
            raise DimensionMismatchError(f"Ambient half-dimension m must be a positive integer, got {self.m!r}")
        if not self.components:
            raise InputError("Fixed-point data needs at least one component")
        for comp in self.components:
            if comp.m != self.m:
                raise DimensionMismatchError(
                    f"Component '{comp.name}': m0 + sum of multiplicities = {comp.m}, expected m = {self.m}"
                )
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise InputError(f"Component names must be unique, got {names}")

    @property
    def all_isolated(self):
        return all(c.is_isolated for c in self.components)


# =============================================================================
# LINEAR FLOW ALGEBRA
# =============================================================================

def rotation_block(lam):
    """2x2 generator with A e1 = lam e2, A e2 = -lam e1."""
    lam = to_rat(lam)
    return [[Fraction(0), -lam], [lam, Fraction(0)]]


@dataclass(frozen=True)
class SkewBlockMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_rat(x) for x in row) for row in self.entries)
        object.__setattr__(self, 'entries', rows)
        n = len(rows)
        if n == 0 or n % 2 or any(len(row) != n for row in rows):
            raise DimensionMismatchError(f"Skew matrix must be square of even dimension, got {n} rows")
        for i in range(n):
            for j in range(i, n):
                if rows[i][j] + rows[j][i] != 0:
                    raise PreconditionError(
                        f"Matrix is not skew-symmetric: A[{i}][{j}] + A[{j}][{i}] = {format_rat(rows[i][j] + rows[j][i])}"
                    )

    @classmethod
    def block_diagonal(cls, lambdas):
        n = 2 * len(lambdas)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for j, lam in enumerate(lambdas):
            block = rotation_block(lam)
            for a in range(2):
                for b in range(2):
                    rows[2 * j + a][2 * j + b] = block[a][b]
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dimension(self):
        return len(self.entries)

    def as_rows(self):
        return [list(row) for row in self.entries]


def skeigen_decompose(a):
    """
    Skeigen-values of a skew-symmetric matrix with multiplicities, ascending.

    lambda_j^2 are the eigenvalues of -A^2, read off the rational linear
    factors of its exact characteristic polynomial; lambda_j is rational
    only when lambda_j^2 is the square of a rational.

    Raises:
        IrrationalSkeigenError: some lambda_j is irrational
    """
    rows = a.as_rows()
    neg_square = [[-x for x in row] for row in mat_mul(rows, rows)]
    roots, rest = rational_roots(characteristic_polynomial(neg_square))
    if rest:
        raise IrrationalSkeigenError(
            "Some skeigen-values are irrational (lambda^2 is not rational); "
            "supply block-form weights directly instead of a matrix"
        )
    result = []
    for r in sorted(roots):
        num, den = isqrt(max(r.numerator, 0)), isqrt(r.denominator)
        if r < 0 or num * num != r.numerator or den * den != r.denominator:
            raise IrrationalSkeigenError(
                f"Skeigen-value sqrt({format_rat(r)}) is irrational; "
                "supply block-form weights directly instead of a matrix"
            )
        result.append((Fraction(num, den), roots[r] // 2))
    return result


def _orthogonalize(vectors, against):
    """Rational Gram-Schmidt of each vector against `against` (no normalisation)."""
    out = []
    for v in vectors:
        w = list(v)
        for u in against + out:
            uu = dot(u, u)
            coeff = dot(w, u) / uu
            if coeff:
                w = [x - coeff * y for x, y in zip(w, u)]
        if any(w):
            out.append(w)
    return out


def skeigen_basis(a):
    """
    Orthogonal rational basis adapted to A: list of (lambda, e_odd, e_even).

    A e_odd = lambda e_even and A e_even = -lambda e_odd exactly. Vectors are
    not normalised (their norms are generally irrational).
    """
    rows = a.as_rows()
    n = len(rows)
    square = mat_mul(rows, rows)
    basis = []
    for lam, mult in skeigen_decompose(a):
        shifted = mat_add(square, identity_matrix(n), scale=lam * lam)
        kernel = nullspace(shifted, n)
        chosen = []
        if lam == 0:
            ortho = _orthogonalize(kernel, [])
            for k in range(0, len(ortho), 2):
                basis.append((lam, ortho[k], ortho[k + 1]))
            continue
        for v in kernel:
            projected = _orthogonalize([v], chosen)
            if not projected:
                continue
            odd = projected[0]
            even = [x / lam for x in mat_vec(rows, odd)]
            chosen.extend([odd, even])
            basis.append((lam, odd, even))
        if len(chosen) != 2 * mult:
            raise ConsistencyError(f"Found {len(chosen) // 2} pairs for skeigen-value {lam}, expected {mult}")
    return basis


@dataclass(frozen=True)
class NormalizationResult:
    c_squared: Fraction
    note: str


SCALE_INVARIANCE_NOTE = "scale-invariant: residues are unchanged under mu -> c*mu; normalization is not applied"


def normalize_weights(weights):
    """
    Square of the scalar c with sum (c*alpha_j)^2 = 1.

    c itself is generally irrational; since residues are invariant under the
    rescaling, only c^2 is reported and weights are never rescaled.
    """
    weights = [to_rat(w) for w in weights]
    if not weights:
        raise DegenerateWeightError("normalize_weights needs at least one weight")
    if any(w == 0 for w in weights):
        raise DegenerateWeightError(f"Weights must be nonzero (each alpha_j is nonzero), got {weights}")
    return NormalizationResult(1 / sum(w * w for w in weights), SCALE_INVARIANCE_NOTE)


@dataclass
class CommutantReport:
    """Outcome of verify_commutant: blocks on success, the first failure otherwise."""

    passed: bool
    failure: str = None
    witness: tuple = None
    blocks: list = field(default_factory=list)

    def describe(self):
        if self.passed:
            parts = [f"lambda={format_rat(lam)}: {'GL(' + str(dim) + ',C)' if lam else 'GL(' + str(2 * dim) + ',R)'}"
                     for lam, dim, _ in self.blocks]
            return "commutant block structure: " + "; ".join(parts)
        return f"{self.failure} at entry {self.witness}"


def _block_lambdas(rows):
    """Per-2x2-block skeigen-values of a block-diagonal rotation matrix."""
    n = len(rows)
    lambdas = []
    for j in range(0, n, 2):
        lam = rows[j + 1][j]
        if rows[j][j] != 0 or rows[j + 1][j + 1] != 0 or rows[j][j + 1] != -lam:
            raise PreconditionError(f"Block {j // 2} of A is not a rotation generator")
        for k in range(n):
            if k not in (j, j + 1) and (rows[j][k] != 0 or rows[j + 1][k] != 0):
                raise PreconditionError(f"A is not block-diagonal: row {j} or {j + 1} has entries outside its block")
        if lam < 0:
            raise PreconditionError(f"Block {j // 2} has negative skeigen-value {lam}; use lambda >= 0")
        lambdas.append(lam)
    return lambdas


def verify_commutant(l_matrix, a):
    """
    Check that L is in the commutant {L in GL(2k, R) : LA = AL} with the expected block form.

    A must be block-diagonal with 2x2 rotation blocks R(lambda_j). The
    commutant consists of block-diagonal L whose blocks, grouped by distinct
    skeigen-value, are complex-linear (commute with the rotation generator J).
    """
    rows = a.as_rows()
    n = len(rows)
    l_rows = as_fraction_matrix(l_matrix)
    if len(l_rows) != n or any(len(r) != n for r in l_rows):
        raise DimensionMismatchError(f"L must be {n}x{n} to match A")
    lambdas = _block_lambdas(rows)

    if determinant(l_rows) == 0:
        return CommutantReport(False, 'not-invertible')

    la = mat_mul(l_rows, rows)
    al = mat_mul(rows, l_rows)
    for i in range(n):
        for j in range(n):
            if la[i][j] != al[i][j]:
                return CommutantReport(False, 'commutation-failure', (i, j))

    groups = {}
    for block, lam in enumerate(lambdas):
        groups.setdefault(lam, []).extend([2 * block, 2 * block + 1])
    owner = {idx: lam for lam, idxs in groups.items() for idx in idxs}
    for i in range(n):
        for j in range(n):
            if owner[i] != owner[j] and l_rows[i][j] != 0:
                return CommutantReport(False, 'not-block-diagonal', (i, j))

    j_matrix = SkewBlockMatrix.block_diagonal([1] * (n // 2)).as_rows()
    blocks = []
    for lam in sorted(groups):
        idxs = groups[lam]
        if lam != 0:
            sub_l = [[l_rows[i][j] for j in idxs] for i in idxs]
            sub_j = [[j_matrix[i][j] for j in idxs] for i in idxs]
            lj, jl = mat_mul(sub_l, sub_j), mat_mul(sub_j, sub_l)
            for x in range(len(idxs)):
                for y in range(len(idxs)):
                    if lj[x][y] != jl[x][y]:
                        return CommutantReport(False, 'not-complex-linear', (idxs[x], idxs[y]))
        blocks.append((lam, len(idxs) // 2, idxs))
    return CommutantReport(True, blocks=blocks)


# =============================================================================
# RESIDUES
# =============================================================================

def residue_polynomial(psi, comp):
    """
    The degree-m0 part of phi(Lambda_X) / chi(Lambda_X^nu) in the Chern roots.

    At an isolated point whose complex orientation disagrees with M, the
    first skeigen-value and variable are negated in psi-hat and in the
    Euler form chi(Lambda_X^nu) alike.
    """
    if psi.m != comp.m:
        raise DimensionMismatchError(
            f"psi '{psi.label}' has m = {psi.m}, component '{comp.name}' has m = {comp.m}"
        )
    m, m0 = comp.m, comp.m0
    offsets = comp.offsets()
    source = psi.psi_hat
    flip = comp.is_isolated and not comp.orientation_matches
    if flip:
        source = source.flip_signs([0])

    numerator = shift_vars(source, offsets, cutoff=m0)
    denominator = TruncatedPoly.constant(-1 if flip else 1, m, m0)
    for j in range(m0, m):
        denominator = denominator * (TruncatedPoly.variable(j, m, m0) + offsets[j])
    return (numerator * invert_unit(denominator)).homogeneous_part(m0)


def residue_at_component(psi, comp):
    """
    Exact residue of the characteristic form psi at one stratum component.

    For an isolated point this is psi-hat(lambda) / prod(lambda); otherwise
    the degree-m0 part is reduced to generators and paired with the oracle.
    """
    top = residue_polynomial(psi, comp)
    if comp.is_isolated:
        return top.constant_term()
    try:
        expression = reduce_to_generators(top, comp.group_spec)
    except NotReducibleError as exc:
        raise ConsistencyError(
            f"Internal consistency failure at component '{comp.name}': residue of '{psi.label}' is not "
            f"expressible in characteristic classes ({exc}); psi is likely not an invariant form"
        ) from exc
    if comp.oracle is None:
        if not expression:
            return Fraction(0)
        first = next(iter(expression))
        raise IncompleteOracleError(
            f"Component '{comp.name}' has m0 = {comp.m0} but no integration oracle (needed: {first.render()})",
            monomial=first.render(),
        )
    return sum((coeff * comp.oracle.lookup(mono, comp.name) for mono, coeff in expression.items()), Fraction(0))


def _resolve_threads(threads):
    if threads is None:
        return 1
    return max(1, int(threads))


def component_residues(psi, data, threads=None):
    """
    Residues of psi at every component, in input order.

    Components are independent, so they may be evaluated concurrently; the
    exact results do not depend on evaluation order.
    """
    for comp in data.components:
        if comp.m != psi.m:
            raise DimensionMismatchError(
                f"psi '{psi.label}' has m = {psi.m}, component '{comp.name}' has m = {comp.m}"
            )
    workers = min(_resolve_threads(threads), len(data.components))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda c: residue_at_component(psi, c), data.components))
    else:
        values = [residue_at_component(psi, c) for c in data.components]
    for comp, value in zip(data.components, values):
        logging.info(f"Residue of {psi.label} at component '{comp.name}': {format_rat(value)}")
    return [(comp.name, value) for comp, value in zip(data.components, values)]


def halving_factor(data):
    return Fraction(1) if data.flow_orientable else Fraction(1, 2)


def characteristic_number(psi, data, threads=None):
    """Sum of residues over the components, halved for a non-orientable flow."""
    residues = component_residues(psi, data, threads)
    total = sum((value for _, value in residues), Fraction(0))
    if not data.flow_orientable:
        logging.warning(f"Flow is not orientable: halving the double-cover total for {psi.label}")
    return total * halving_factor(data)


def pontryagin_numbers(data, threads=None):
    """Table {partition: p_I[M]} over all partitions of m/2."""
    if data.m % 2:
        raise UnsupportedDimensionError(f"Pontryagin numbers need dim M divisible by 4, got 2m = {2 * data.m}")
    return {
        part: characteristic_number(pontryagin_poly(part, data.m), data, threads)
        for part in partitions(data.m // 2)
    }


# =============================================================================
# COROLLARIES
# =============================================================================

def signature_index(weights, orientation_matches):
    """epsilon = +/- prod sgn(alpha_i), negated when the orientations disagree."""
    weights = [to_rat(w) for w in weights]
    if not weights:
        raise DegenerateWeightError("signature_index needs at least one weight")
    if any(w == 0 for w in weights):
        raise DegenerateWeightError(f"Weights must be nonzero, got {[format_rat(w) for w in weights]}")
    sign = -1 if sum(1 for w in weights if w < 0) % 2 else 1
    return sign if orientation_matches else -sign


def point_indices(data):
    if not data.all_isolated:
        bad = next(c.name for c in data.components if not c.is_isolated)
        raise UnsupportedStratumError(
            f"Component '{bad}' is not an isolated point; use characteristic_number with l_genus_poly instead"
        )
    return [(c.name, signature_index(c.expanded_weights(), c.orientation_matches)) for c in data.components]


def signature_via_indices(data):
    """sigma(M) = sum_j epsilon_j over isolated singular points (halved on a double cover)."""
    total = sum(eps for _, eps in point_indices(data))
    if data.m % 2 and total:
        logging.warning(f"Index sum {total} in dimension {2 * data.m}, which is not divisible by 4")
    if not data.flow_orientable:
        if total % 2:
            raise ConsistencyError(f"Index sum {total} on the double cover is odd; cannot halve")
        return total // 2
    return total


def euler_characteristic(data, chi_values, cross_check=False, threads=None):
    """
    chi(M) = sum_j chi(Sigma_j), halved for non-orientable flows.

    With cross_check=True the sum is compared against the Pfaffian
    characteristic number whenever every non-isolated oracle carries e(E0).
    """
    chi_values = [to_rat(v) for v in chi_values]
    if len(chi_values) != len(data.components):
        raise DimensionMismatchError(
            f"Got {len(chi_values)} Euler characteristics for {len(data.components)} components"
        )
    for comp, chi in zip(data.components, chi_values):
        if comp.is_isolated and chi != 1:
            raise ConsistencyError(f"Isolated point '{comp.name}' must have chi = 1, got {format_rat(chi)}")
    total = sum(chi_values, Fraction(0)) * halving_factor(data)
    if cross_check:
        checkable = all(
            c.is_isolated or (c.oracle is not None and c.oracle.has(euler_monomial(c.m0)))
            for c in data.components
        )
        if not checkable:
            logging.warning("Euler cross-check skipped: some oracle lacks e(E0)")
        else:
            via_pfaffian = characteristic_number(pfaffian_poly(data.m), data, threads)
            if via_pfaffian != total:
                raise ConsistencyError(
                    f"Euler characteristic {format_rat(total)} disagrees with the Pfaffian residue sum "
                    f"{format_rat(via_pfaffian)}"
                )
    return total


def double_cover(data):
    """Dataset with every component duplicated and flow_orientable = False."""
    if not data.flow_orientable:
        raise PreconditionError("Data already describes an orientation double cover")
    components = []
    for comp in data.components:
        components.append(replace(comp, name=f"{comp.name}~a"))
        components.append(replace(comp, name=f"{comp.name}~b"))
    return FlowFixedData(data.m, False, tuple(components))


# =============================================================================
# MODEL BUILDERS
# =============================================================================

# Registry for model builders: kind -> builder(**params)
MODEL_BUILDER_REGISTRY = {}


def model_builder(name):
    def decorator(fn):
        MODEL_BUILDER_REGISTRY[name] = fn
        return fn
    return decorator


@model_builder("cpm")
def complex_projective_model(alphas, m=None):
    """
    CP^m with the flow [z0, e^(it a1) z1, ..., e^(it am) zm].

    The fixed point [0..1..0] at position j carries the weights
    (alpha_i - alpha_j) for i != j.
    """
    alphas = [to_rat(a) for a in alphas]
    if m is None:
        m = len(alphas) - 1
    if len(alphas) != m + 1 or m < 1:
        raise DimensionMismatchError(f"cpm model needs m + 1 alphas (alpha_0 = 0 first), got {len(alphas)} for m = {m}")
    if alphas[0] != 0:
        raise DegenerateWeightError(f"alpha_0 must be 0, got {format_rat(alphas[0])}")
    if len(set(alphas)) != len(alphas):
        logging.error(f"Repeated alphas in cpm model: {[format_rat(a) for a in alphas]}")
        raise DegenerateWeightError(f"cpm alphas must be pairwise distinct, got {[format_rat(a) for a in alphas]}")
    components = tuple(
        StratumComponent.from_signed_weights(f"p{j}", [alphas[i] - alphas[j] for i in range(m + 1) if i != j])
        for j in range(m + 1)
    )
    logging.info(f"Built CP^{m} model with {len(components)} fixed points")
    return FlowFixedData(m, True, components)


@model_builder("s4")
def sphere_suspension_model(alpha, beta):
    """
    S^4 as the suspension of S^3 with the flow (e^(it alpha) z1, e^(it beta) z2).

    Two fixed points at the poles; the south pole sees the weights
    (alpha, -beta) since the suspension reverses the chart orientation.
    Both chi = 2 and sigma = 0 are asserted.
    """
    alpha, beta = to_rat(alpha), to_rat(beta)
    if alpha == 0 or beta == 0:
        raise DegenerateWeightError("Suspension weights alpha and beta must be nonzero")
    data = FlowFixedData(2, True, (
        StratumComponent.from_signed_weights("north", [alpha, beta]),
        StratumComponent.from_signed_weights("south", [alpha, -beta]),
    ))
    chi = characteristic_number(pfaffian_poly(2), data)
    sigma = signature_via_indices(data)
    if chi != 2 or sigma != 0:
        raise ConsistencyError(f"S^4 model check failed: chi = {chi}, sigma = {sigma}")
    return data


@model_builder("klein")
def klein_double_cover_model():
    """
    Double cover T^2 x S^2 of the circle foliation on the glued Klein-bottle disk bundles.

    The flow rotates the S^2 factor; its fixed set is two tori with trivial
    normal bundles, so every oracle entry vanishes.
    """
    oracle = {"e(E0)": 0, "c1(E1)": 0}
    components = tuple(
        StratumComponent(name, 1, (NormalWeight(Fraction(1), 1),), True, IntegrationOracle(1, oracle))
        for name in ("torus_north", "torus_south")
    )
    return FlowFixedData(2, False, components)


def build_model(kind, **params):
    """Build a registered model (cpm, s4, klein) from keyword parameters."""
    if kind not in MODEL_BUILDER_REGISTRY:
        raise InputError(f"Unknown model kind {kind!r}; available: {sorted(MODEL_BUILDER_REGISTRY)}")
    try:
        return MODEL_BUILDER_REGISTRY[kind](**params)
    except TypeError as exc:
        raise InputError(f"Invalid parameters for model {kind!r}: {exc}") from exc
