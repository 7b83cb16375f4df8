"""
Closure dimension of linear flows t -> (e^(it alpha_1) z_1, ..., e^(it alpha_k) z_k).

The generic orbit closure has dimension dim_Q span{alpha_1..alpha_k}, which
equals k minus the dimension of the rational annihilator
{beta in Q^k : beta . alpha = 0}. Irrational weights are given by their
rational coordinates over some Q-basis of a field extension, so every
question reduces to exact rank computations.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

try:
    from .errors import DegenerateWeightError, DimensionMismatchError
    from .exactnum import format_rat, to_rat
    from .utils import bareiss_rank, clear_denominators, nullspace, transpose
except ImportError:
    from errors import DegenerateWeightError, DimensionMismatchError
    from exactnum import format_rat, to_rat
    from utils import bareiss_rank, clear_denominators, nullspace, transpose


@dataclass(frozen=True)
class WeightMatrix:
    """k weights alpha_i as rows of rational coordinates over a d-dimensional Q-basis."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(to_rat(x) for x in row) for row in self.rows)
        object.__setattr__(self, 'rows', rows)
        if not rows:
            raise DimensionMismatchError("WeightMatrix needs at least one weight")
        d = len(rows[0])
        if d == 0 or any(len(row) != d for row in rows):
            raise DimensionMismatchError(f"All weights need the same positive number of coordinates, got {[len(r) for r in rows]}")
        for i, row in enumerate(rows):
            if not any(row):
                raise DegenerateWeightError(f"Weight alpha_{i + 1} is zero (row {i})")

    @property
    def k(self):
        return len(self.rows)

    @property
    def d(self):
        return len(self.rows[0])

    def as_strings(self):
        return [[format_rat(x) for x in row] for row in self.rows]


def closure_dimension(w):
    """
    Returns:
        tuple: (dim_span, dim_annihilator) with dim_span + dim_annihilator == k
    """
    dim_span = bareiss_rank([list(row) for row in w.rows])
    return dim_span, w.k - dim_span


def hermite_normal_form(rows):
    """
    Row-style Hermite normal form of an integer matrix (zero rows dropped).

    Pivots are positive and strictly move right; entries above a pivot lie
    in [0, pivot).
    """
    m = [list(r) for r in rows]
    if not m:
        return []
    n_cols = len(m[0])
    r = 0
    for col in range(n_cols):
        while True:
            live = [i for i in range(r, len(m)) if m[i][col] != 0]
            if not live:
                break
            pivot = min(live, key=lambda i: abs(m[i][col]))
            m[r], m[pivot] = m[pivot], m[r]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][col]:
                    q = m[i][col] // m[r][col]
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
                    if m[i][col]:
                        done = False
            if done:
                break
        if r >= len(m) or m[r][col] == 0:
            continue
        if m[r][col] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][col] // m[r][col]
            if q:
                m[i] = [x - q * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r] if any(row)]


def annihilator_basis(w):
    """
    Integer basis of {beta : beta . alpha = 0} in Hermite normal form.

    The rational kernel of the transposed system is cleared to primitive
    integer vectors, then canonicalised, so equivalent inputs give identical
    output.
    """
    system = transpose([list(row) for row in w.rows])
    kernel = nullspace(system, w.k)
    basis = hermite_normal_form([clear_denominators(v) for v in kernel])
    logging.debug(f"Annihilator of {w.k} weights has dimension {len(basis)}")
    return [tuple(v) for v in basis]


def quadratic_eigenvector_weights(matrix):
    """
    WeightMatrix of the dominant eigenvector of a symmetric hyperbolic B in SL(2, Z).

    For B = [[a, b], [b, d]] with trace t > 2 the eigenvalue is
    (t + sqrt(t^2 - 4)) / 2 and (b, (t - 2a)/2 + sqrt(t^2 - 4)/2) is an
    eigenvector; its coordinates over {1, sqrt(t^2 - 4)} are the rows.
    The two weights are rationally independent, so generic leaf closures
    are 2-tori.
    """
    try:
        (a, b), (c, d) = matrix
    except (TypeError, ValueError) as exc:
        raise DimensionMismatchError(f"Expected a 2x2 matrix, got {matrix!r}") from exc
    a, b, c, d = (to_rat(x) for x in (a, b, c, d))
    if any(x.denominator != 1 for x in (a, b, c, d)):
        raise DegenerateWeightError("Matrix entries must be integers")
    if b != c:
        raise DegenerateWeightError(f"Matrix must be symmetric, got off-diagonal entries {b} and {c}")
    if a * d - b * c != 1:
        raise DegenerateWeightError(f"Matrix must have determinant 1, got {format_rat(a * d - b * c)}")
    t = a + d
    if t <= 2:
        raise DegenerateWeightError(f"Trace {t} <= 2: eigenvalues are not irrational reals greater than 1")
    if b == 0:
        raise DegenerateWeightError("Off-diagonal entry is zero; the eigenvector is rational")
    return WeightMatrix(((b, Fraction(0)), ((t - 2 * a) / 2, Fraction(1, 2))))
