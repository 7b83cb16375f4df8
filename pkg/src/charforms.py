"""
Catalog of ad(SO(2m))-invariant polynomials in Chern-root (psi-hat) form.

psi-hat is stored fully expanded in a1..am with cutoff m; since it is
homogeneous of degree m nothing is lost. The Pontryagin basis and the
e[k](...) / p[k] / E macros are parser conveniences only.
"""
import logging
from dataclasses import dataclass
from itertools import combinations

try:
    from .errors import (HomogeneityError, InputError, InvalidPartitionError, SignFlipError,
                         SymmetryError, UnsupportedDimensionError)
    from .exactnum import coth_series_coeff
    from .expression import parse_polynomial
    from .polyring import TruncatedPoly, elementary_symmetric, render_poly, render_monomial
except ImportError:
    from errors import (HomogeneityError, InputError, InvalidPartitionError, SignFlipError,
                        SymmetryError, UnsupportedDimensionError)
    from exactnum import coth_series_coeff
    from expression import parse_polynomial
    from polyring import TruncatedPoly, elementary_symmetric, render_poly, render_monomial

# Registry of named invariant forms: name -> builder(m)
INVARIANT_FORM_REGISTRY = {}


def invariant_form(name):
    def decorator(fn):
        INVARIANT_FORM_REGISTRY[name] = fn
        return fn
    return decorator


def _mono(exponents):
    return render_monomial(exponents) or '1'


def check_homogeneous(psi_hat, m):
    """Exponent vector of the first term whose degree is not m, or None."""
    for exponents in psi_hat.terms:
        if sum(exponents) != m:
            return exponents
    return None


def check_symmetric(psi_hat):
    """Witness (monomial, swapped monomial) with different coefficients, or None."""
    n = psi_hat.num_vars
    for j in range(n - 1):
        for exponents, coeff in psi_hat.items():
            swapped = list(exponents)
            swapped[j], swapped[j + 1] = swapped[j + 1], swapped[j]
            if psi_hat.coefficient(swapped) != coeff:
                return _mono(exponents), _mono(tuple(swapped))
    return None


def check_sign_flip(psi_hat):
    """Witness (monomial, flipped pair) for a pair flip that changes psi-hat, or None."""
    for i, j in combinations(range(psi_hat.num_vars), 2):
        for exponents, _ in psi_hat.items():
            if (exponents[i] + exponents[j]) % 2:
                return _mono(exponents), f"a{i + 1},a{j + 1}"
    return None


@dataclass(frozen=True)
class InvariantPoly:
    """An ad(SO(2m))-invariant symmetric form of degree m, given by its psi-hat."""

    m: int
    psi_hat: TruncatedPoly
    label: str

    def __post_init__(self):
        if self.m < 1:
            raise UnsupportedDimensionError(f"Invariant polynomials need m >= 1, got {self.m}")
        p = self.psi_hat
        if p.num_vars != self.m or p.cutoff != self.m:
            raise HomogeneityError(
                f"psi-hat for '{self.label}' must live in {self.m} variables with cutoff {self.m}, "
                f"got num_vars={p.num_vars}, cutoff={p.cutoff}"
            )
        validate_psi_hat(p, self.m, self.label)

    def render(self):
        return render_poly(self.psi_hat)


def validate_psi_hat(p, m, label):
    """Raise the matching InvariantViolationError for the first failed invariant."""
    bad = check_homogeneous(p, m)
    if bad is not None:
        raise HomogeneityError(
            f"psi-hat for '{label}' is not homogeneous of degree {m}: term {_mono(bad)} has degree {sum(bad)}",
            witness=_mono(bad))
    witness = check_symmetric(p)
    if witness is not None:
        raise SymmetryError(
            f"psi-hat for '{label}' is not symmetric: coefficients of {witness[0]} and {witness[1]} differ",
            witness=witness)
    witness = check_sign_flip(p)
    if witness is not None:
        raise SignFlipError(
            f"psi-hat for '{label}' is not invariant under flipping the signs of {witness[1]}: "
            f"term {witness[0]} changes sign", witness=witness)


@invariant_form("euler")
def pfaffian_poly(m):
    """Pfaffian / Euler form: psi-hat = a1 a2 ... am."""
    return InvariantPoly(m, elementary_symmetric(m, range(m), m, m), "euler")


def pontryagin_poly(partition, m):
    """Pontryagin monomial p_I: psi-hat = prod_l e_(i_l)(a1^2, ..., am^2)."""
    partition = tuple(partition)
    if not partition or any(not isinstance(i, int) or i <= 0 for i in partition):
        raise InvalidPartitionError(f"Partition entries must be positive integers, got {partition}")
    if 2 * sum(partition) != m:
        raise InvalidPartitionError(
            f"Pontryagin monomial p_{partition} has degree {2 * sum(partition)}, expected m = {m}"
        )
    psi = TruncatedPoly.constant(1, m, m)
    for i in partition:
        psi = psi * elementary_symmetric(i, range(m), m, m, power=2)
    label = "p_" + "_".join(str(i) for i in sorted(partition, reverse=True))
    return InvariantPoly(m, psi, label)


@invariant_form("L")
def l_genus_poly(m):
    """
    Hirzebruch L-polynomial: degree-m part of prod_j (a_j / tanh a_j).

    Only defined for dim M = 2m divisible by 4.
    """
    if m % 2:
        raise UnsupportedDimensionError(f"L-genus needs dim M = 2m divisible by 4, got m = {m}")
    total = TruncatedPoly.constant(1, m, m)
    for j in range(m):
        factor = {}
        for n in range(m // 2 + 1):
            exponents = [0] * m
            exponents[j] = 2 * n
            factor[tuple(exponents)] = coth_series_coeff(n)
        total = total * TruncatedPoly(m, m, factor)
    return InvariantPoly(m, total.homogeneous_part(m), "L")


def parse_invariant(expr, m, label=None):
    """
    Parse a psi-hat expression and validate all three invariants.

    Homogeneity is checked on the untruncated parse, so terms of degree > m
    are reported rather than silently dropped.
    """
    parsed = parse_polynomial(expr, m)
    validate_psi_hat(parsed, m, label or expr)
    psi = TruncatedPoly(m, m, parsed.terms)
    logging.debug(f"Parsed psi-hat {render_poly(psi)} from {expr!r}")
    return InvariantPoly(m, psi, label or f"expr:{expr}")


def partitions(n, largest=None):
    """Integer partitions of n, parts in non-increasing order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def catalog(m):
    """Every catalog polynomial available in real dimension 2m."""
    forms = [pfaffian_poly(m)]
    if m % 2 == 0:
        forms.append(l_genus_poly(m))
        forms.extend(pontryagin_poly(part, m) for part in partitions(m // 2))
    return forms


def resolve_psi(selector, m):
    """
    Resolve a CLI psi selector: 'euler', 'L', 'p:<i,j,...>' or 'expr:<text>'.
    """
    if selector in INVARIANT_FORM_REGISTRY:
        return INVARIANT_FORM_REGISTRY[selector](m)
    if selector.startswith('p:'):
        body = selector[2:].strip()
        try:
            partition = tuple(int(x) for x in body.split(',') if x.strip())
        except ValueError as exc:
            raise InvalidPartitionError(f"Invalid partition {body!r}; expected e.g. p:1,1") from exc
        return pontryagin_poly(partition, m)
    if selector.startswith('expr:'):
        return parse_invariant(selector[5:], m)
    raise InputError(
        f"Unknown psi selector {selector!r}; use one of {sorted(INVARIANT_FORM_REGISTRY)}, p:<partition>, expr:<text>"
    )
