# Exact linear algebra helpers shared by polyring, localize and kronecker
from fractions import Fraction
from functools import reduce
from math import gcd

import sympy


def as_fraction_matrix(rows):
    """Copy a list-of-lists into a fresh matrix of Fractions."""
    return [[Fraction(x) for x in row] for row in rows]


def identity_matrix(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(rows):
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def mat_mul(a, b):
    """
    Exact matrix product.

    Args:
        a: n x k matrix (list of rows)
        b: k x m matrix (list of rows)

    Returns:
        n x m matrix of Fractions
    """
    if a and len(a[0]) != len(b):
        raise ValueError(f"Cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0]) if b else 0}")
    b_cols = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in b_cols] for row in a]


def mat_vec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def mat_add(a, b, scale=1):
    return [[x + scale * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def dot(u, v):
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def clear_denominators(row):
    """
    Scale a rational vector to a primitive integer vector (same direction).

    Args:
        row: sequence of Fractions
    Returns:
        list of ints with gcd 1 (or all zeros)
    """
    denominators = [Fraction(x).denominator for x in row]
    lcm = reduce(lambda acc, d: acc * d // gcd(acc, d), denominators, 1)
    ints = [int(Fraction(x) * lcm) for x in row]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def bareiss_rank(rows):
    """
    Rank over Q by fraction-free (Bareiss) elimination.

    Rows are first scaled to integers; every intermediate entry stays an
    integer, and each division by the previous pivot is exact.

    Args:
        rows: list of rational row vectors
    Returns:
        int: rank of the matrix
    """
    m = [clear_denominators(row) for row in rows]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev_pivot = 1
    for col in range(n_cols):
        pivot_row = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        pivot = m[rank][col]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (pivot * m[r][c] - m[r][col] * m[rank][c]) // prev_pivot
            m[r][col] = 0
        prev_pivot = pivot
        rank += 1
        if rank == n_rows:
            break
    return rank


def row_reduce(rows):
    """
    Reduced row echelon form over Q.

    Returns:
        tuple: (rref rows, list of pivot column indices)
    """
    m = as_fraction_matrix(rows)
    if not m:
        return [], []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for col in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if m[i][col] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [x - factor * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def nullspace(rows, n_cols=None):
    """
    Basis of {x : rows . x = 0} over Q, one vector per free column.

    Args:
        rows: list of row vectors (may be empty, then n_cols is required)
        n_cols: number of unknowns
    Returns:
        list of Fraction vectors
    """
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols is required for an empty system")
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    n_cols = len(rows[0]) if n_cols is None else n_cols
    rref, pivots = row_reduce(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n_cols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -rref[i][f]
        basis.append(vec)
    return basis


def solve_linear_system(columns, target):
    """
    Solve sum_j x_j * columns[j] = target exactly.

    Args:
        columns: list of equally long Fraction vectors
        target: Fraction vector of the same length
    Returns:
        tuple: (solution list or None, index of an inconsistent row or None)
    """
    n_eq = len(target)
    n_unknowns = len(columns)
    augmented = [[columns[j][i] for j in range(n_unknowns)] + [target[i]] for i in range(n_eq)]
    rref, pivots = row_reduce(augmented)
    if n_unknowns in pivots:
        bad_row = pivots.index(n_unknowns)
        return None, bad_row
    solution = [Fraction(0)] * n_unknowns
    for i, p in enumerate(pivots):
        solution[p] = rref[i][n_unknowns]
    return solution, None


def determinant(rows):
    m = as_fraction_matrix(rows)
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        pivot = m[col][col]
        det *= pivot
        for r in range(col + 1, n):
            factor = m[r][col] / pivot
            if factor:
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det


_T = sympy.Symbol('t')


def _sympy_rational(x):
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _fraction(r):
    return Fraction(int(r.p), int(r.q))


def characteristic_polynomial(rows):
    """
    Coefficients of det(t*I - A), highest degree first, as Fractions.

    Exact over Q (sympy's charpoly on a rational Matrix); the leading
    coefficient is 1.
    """
    if not rows:
        return [Fraction(1)]
    matrix = sympy.Matrix([[_sympy_rational(x) for x in row] for row in rows])
    return [_fraction(c) for c in matrix.charpoly(_T).all_coeffs()]


def rational_roots(coeffs):
    """
    Rational roots of a polynomial over Q with their multiplicities.

    The polynomial is factored over QQ; every linear factor gives a root.

    Args:
        coeffs: rational coefficients, highest degree first
    Returns:
        tuple: (dict root -> multiplicity, total degree of the factors without rational roots)
    """
    poly = sympy.Poly.from_list([_sympy_rational(c) for c in coeffs], _T, domain=sympy.QQ)
    roots = {}
    rest = 0
    _, factors = poly.factor_list()
    for factor, mult in factors:
        if factor.degree() == 1:
            lead, const = factor.all_coeffs()
            root = _fraction(-const / lead)
            roots[root] = roots.get(root, 0) + mult
        else:
            rest += factor.degree() * mult
    return roots, rest
