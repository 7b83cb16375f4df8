"""
Truncated multivariate polynomials over Q in the Chern-root variables a1..am.

A TruncatedPoly keeps only terms of total degree <= cutoff; every operation
re-truncates and prunes zero coefficients, so two polynomials are equal iff
their (num_vars, cutoff, terms) agree. Variables are addressed by 0-based
position in the API and rendered 1-based ("a1", "a2", ...).

The symmetric-function side (GroupSpec, generators, reduce_to_generators)
expresses a group-symmetric polynomial in the characteristic-class
generators of the skeigen-bundles:

    E0 (tangent, rank m0):  e(E0) = a1...a_m0,  p_i(E0) = e_i(a1^2, ..., a_m0^2)
    Ei (normal, i >= 1):    c_k(Ei) = e_k(variables of group i)

For E0 only p_1 .. p_(m0-1) are generators (p_m0 = e^2), which keeps the
generator monomials linearly independent.
"""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

try:
    from .errors import DimensionMismatchError, NonUnitError, NotReducibleError, InputError
    from .exactnum import format_rat, to_rat
    from .utils import solve_linear_system
except ImportError:
    from errors import DimensionMismatchError, NonUnitError, NotReducibleError, InputError
    from exactnum import format_rat, to_rat
    from utils import solve_linear_system


def _grlex_key(exponents):
    return (sum(exponents), exponents)


class TruncatedPoly:
    """Polynomial in `num_vars` variables with all terms of degree > `cutoff` dropped."""

    __slots__ = ('num_vars', 'cutoff', '_terms')

    def __init__(self, num_vars, cutoff, terms=None):
        if num_vars < 0 or cutoff < 0:
            raise ValueError(f"num_vars and cutoff must be non-negative, got {num_vars}, {cutoff}")
        self.num_vars = num_vars
        self.cutoff = cutoff
        cleaned = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != num_vars or any(e < 0 for e in exponents):
                raise DimensionMismatchError(
                    f"Exponent vector {exponents} does not fit a polynomial in {num_vars} variables"
                )
            if sum(exponents) > cutoff:
                continue
            coeff = cleaned.get(exponents, Fraction(0)) + to_rat(coeff)
            cleaned[exponents] = coeff
        self._terms = {k: cleaned[k] for k in sorted(cleaned, key=_grlex_key) if cleaned[k] != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, num_vars, cutoff):
        return cls(num_vars, cutoff)

    @classmethod
    def constant(cls, value, num_vars, cutoff):
        return cls(num_vars, cutoff, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, index, num_vars, cutoff, coeff=1):
        exponents = [0] * num_vars
        exponents[index] = 1
        return cls(num_vars, cutoff, {tuple(exponents): coeff})

    @classmethod
    def monomial(cls, exponents, num_vars, cutoff, coeff=1):
        return cls(num_vars, cutoff, {tuple(exponents): coeff})

    # -- accessors ---------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exponents):
        return self._terms.get(tuple(exponents), Fraction(0))

    def constant_term(self):
        return self._terms.get((0,) * self.num_vars, Fraction(0))

    def is_zero(self):
        return not self._terms

    def degree(self):
        """Total degree of the highest stored term (-1 for the zero polynomial)."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self, degree):
        return all(sum(e) == degree for e in self._terms)

    def homogeneous_part(self, degree):
        return TruncatedPoly(self.num_vars, self.cutoff,
                             {e: c for e, c in self._terms.items() if sum(e) == degree})

    def truncated(self, cutoff):
        """Same polynomial viewed in a ring with a lower (or equal) cutoff."""
        if cutoff > self.cutoff:
            raise DimensionMismatchError(
                f"Cannot raise cutoff from {self.cutoff} to {cutoff}: truncated terms are lost"
            )
        return TruncatedPoly(self.num_vars, cutoff, self._terms)

    # -- ring structure ----------------------------------------------------

    def _check_compatible(self, other):
        if self.num_vars != other.num_vars or self.cutoff != other.cutoff:
            raise DimensionMismatchError(
                f"Polynomial rings differ: (num_vars={self.num_vars}, cutoff={self.cutoff}) "
                f"vs (num_vars={other.num_vars}, cutoff={other.cutoff})"
            )

    def _coerce(self, other):
        if isinstance(other, TruncatedPoly):
            self._check_compatible(other)
            return other
        return TruncatedPoly.constant(to_rat(other), self.num_vars, self.cutoff)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return TruncatedPoly(self.num_vars, self.cutoff, terms)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPoly(self.num_vars, self.cutoff, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = to_rat(c)
        return TruncatedPoly(self.num_vars, self.cutoff, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedPoly):
            return self.scale(other)
        self._check_compatible(other)
        terms = {}
        cutoff = self.cutoff
        for e1, c1 in self._terms.items():
            d1 = sum(e1)
            for e2, c2 in other._terms.items():
                if d1 + sum(e2) > cutoff:
                    continue
                key = tuple(x + y for x, y in zip(e1, e2))
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return TruncatedPoly(self.num_vars, cutoff, terms)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"Exponent must be a non-negative integer, got {n!r}")
        result = TruncatedPoly.constant(1, self.num_vars, self.cutoff)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        return (self.num_vars, self.cutoff, self._terms) == (other.num_vars, other.cutoff, other._terms)

    def __hash__(self):
        return hash((self.num_vars, self.cutoff, frozenset(self._terms.items())))

    # -- variable transformations -------------------------------------------

    def permute(self, permutation):
        """Substitute a_j -> a_permutation[j]."""
        terms = {}
        for e, c in self._terms.items():
            new = [0] * self.num_vars
            for j, power in enumerate(e):
                new[permutation[j]] += power
            terms[tuple(new)] = c
        return TruncatedPoly(self.num_vars, self.cutoff, terms)

    def flip_signs(self, indices):
        """Substitute a_j -> -a_j for every j in `indices`."""
        indices = set(indices)
        return TruncatedPoly(self.num_vars, self.cutoff, {
            e: (-c if sum(e[j] for j in indices) % 2 else c) for e, c in self._terms.items()
        })

    def __repr__(self):
        return f"TruncatedPoly(num_vars={self.num_vars}, cutoff={self.cutoff}, {render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)


# --- rendering ---------------------------------------------------------------

def render_monomial(exponents):
    factors = []
    for j, power in enumerate(exponents):
        if power == 1:
            factors.append(f"a{j + 1}")
        elif power > 1:
            factors.append(f"a{j + 1}^{power}")
    return '*'.join(factors)


def render_poly(p):
    """
    Canonical text: terms in graded-lexicographic order, highest first.

    Example: "2/3*a1^2*a2 - a1 + 5". The zero polynomial renders as "0".
    """
    if p.is_zero():
        return '0'
    pieces = []
    for exponents in sorted(p._terms, key=_grlex_key, reverse=True):
        coeff = p._terms[exponents]
        sign = '-' if coeff < 0 else '+'
        magnitude = abs(coeff)
        mono = render_monomial(exponents)
        if not mono:
            body = format_rat(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{format_rat(magnitude)}*{mono}"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ('-' if first_sign == '-' else '') + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# --- ring operations ---------------------------------------------------------

def poly_arith(p, q, op, scalar=None):
    """
    Exact add / sub / mul of two polynomials of the same ring, or scale by a Rat.

    Args:
        p, q: TruncatedPoly operands (q is ignored for op='scale')
        op: 'add', 'sub', 'mul' or 'scale'
        scalar: the Rat for op='scale'
    """
    if op == 'scale':
        return p.scale(scalar)
    if not isinstance(q, TruncatedPoly):
        raise TypeError(f"Second operand must be a TruncatedPoly for op={op!r}")
    p._check_compatible(q)
    if op == 'add':
        return p + q
    if op == 'sub':
        return p - q
    if op == 'mul':
        return p * q
    raise ValueError(f"Unknown polynomial operation: {op!r}")


def invert_unit(u):
    """
    Inverse of a unit modulo truncation: u = c(1 + w)  =>  u^-1 = c^-1 sum_k (-w)^k.

    The series stops at k = cutoff because w has no constant term.
    """
    c = u.constant_term()
    if c == 0:
        raise NonUnitError(f"Cannot invert {render_poly(u)}: constant term is zero")
    w = u.scale(1 / c) - 1
    minus_w = -w
    result = TruncatedPoly.constant(1, u.num_vars, u.cutoff)
    power = result
    for _ in range(u.cutoff):
        power = power * minus_w
        if power.is_zero():
            break
        result = result + power
    return result.scale(1 / c)


def _shifted_terms(exponents, offsets, budget):
    """Yield (new exponents, coefficient) of prod_j (offset_j + a_j)^e_j with degree <= budget."""
    n = len(exponents)

    def walk(j, remaining, prefix, coeff):
        if coeff == 0:
            return
        if j == n:
            yield tuple(prefix), coeff
            return
        e = exponents[j]
        lam = offsets[j]
        top = min(e, remaining)
        # a nonzero offset lets any power k <= e survive; a zero offset keeps only k = e
        choices = range(top + 1) if lam != 0 else ([e] if e <= remaining else [])
        for k in choices:
            factor = comb(e, k) * lam ** (e - k)
            yield from walk(j + 1, remaining - k, prefix + [k], coeff * factor)

    yield from walk(0, budget, [], Fraction(1))


def shift_vars(p, offsets, cutoff=None):
    """
    Substitute a_j -> (offsets[j] + a_j), expand binomially, truncate.

    Args:
        p: TruncatedPoly
        offsets: one Rat per variable
        cutoff: cutoff of the result ring (default p.cutoff; may only be lowered)
    """
    if len(offsets) != p.num_vars:
        raise DimensionMismatchError(
            f"Got {len(offsets)} offsets for a polynomial in {p.num_vars} variables"
        )
    offsets = [to_rat(x) for x in offsets]
    cutoff = p.cutoff if cutoff is None else cutoff
    if cutoff > p.cutoff:
        raise DimensionMismatchError(f"Cannot shift into cutoff {cutoff} > source cutoff {p.cutoff}")
    terms = {}
    for exponents, coeff in p.items():
        for new_exp, factor in _shifted_terms(exponents, offsets, cutoff):
            terms[new_exp] = terms.get(new_exp, Fraction(0)) + coeff * factor
    return TruncatedPoly(p.num_vars, cutoff, terms)


def evaluate(p, point):
    """Value of p at a rational point (the constant term of the shift)."""
    return shift_vars(p, point, cutoff=0).constant_term()


def elementary_symmetric(k, var_indices, num_vars, cutoff, power=1):
    """
    e_k in the variables at `var_indices` (0-based), optionally of their powers.

    power=2 gives e_k(a_j^2), the Pontryagin-style generator.
    """
    var_indices = list(var_indices)
    if not 0 <= k <= len(var_indices):
        raise ValueError(f"Elementary symmetric degree {k} out of range 0..{len(var_indices)}")
    if any(not 0 <= j < num_vars for j in var_indices):
        raise DimensionMismatchError(f"Variable indices {var_indices} exceed {num_vars} variables")
    terms = {}
    for subset in combinations(var_indices, k):
        exponents = [0] * num_vars
        for j in subset:
            exponents[j] = power
        terms[tuple(exponents)] = Fraction(1)
    return TruncatedPoly(num_vars, cutoff, terms)


# --- groups and generators -----------------------------------------------------

class GroupKind(Enum):
    TANGENT = 'tangent'
    NORMAL = 'normal'


@dataclass(frozen=True)
class VariableGroup:
    size: int
    kind: GroupKind


@dataclass(frozen=True)
class GroupSpec:
    """Contiguous partition of the variables into an optional tangent group and normal groups."""

    groups: tuple

    def __post_init__(self):
        groups = tuple(g if isinstance(g, VariableGroup) else VariableGroup(int(g[0]), GroupKind(g[1]))
                       for g in self.groups)
        object.__setattr__(self, 'groups', groups)
        for position, group in enumerate(groups):
            if group.size <= 0:
                raise ValueError(f"Group sizes must be positive, got {group.size}")
            if group.kind is GroupKind.TANGENT and position != 0:
                raise ValueError("The tangent group must come first and appear at most once")

    @classmethod
    def for_component(cls, m0, normal_sizes):
        groups = []
        if m0 > 0:
            groups.append(VariableGroup(m0, GroupKind.TANGENT))
        groups.extend(VariableGroup(s, GroupKind.NORMAL) for s in normal_sizes)
        return cls(tuple(groups))

    @property
    def num_vars(self):
        return sum(g.size for g in self.groups)

    @property
    def tangent_size(self):
        if self.groups and self.groups[0].kind is GroupKind.TANGENT:
            return self.groups[0].size
        return 0

    def labelled_ranges(self):
        """List of (bundle label index, kind, 0-based variable range); tangent is E0, normals E1..."""
        out = []
        start = 0
        label = 1
        for group in self.groups:
            if group.kind is GroupKind.TANGENT:
                out.append((0, group.kind, range(start, start + group.size)))
            else:
                out.append((label, group.kind, range(start, start + group.size)))
                label += 1
            start += group.size
        return out


@dataclass(frozen=True, order=True)
class Generator:
    """
    One characteristic-class generator.

    kind 'e': Euler class of E0 (index = rank m0, rendered "e(E0)");
    kind 'p': p_index(E0); kind 'c': c_index(E_bundle).
    """

    bundle: int
    kind: str
    index: int

    @property
    def degree(self):
        return 2 * self.index if self.kind == 'p' else self.index

    def sort_key(self):
        return (self.bundle, {'e': 0, 'p': 1, 'c': 2}[self.kind], self.index)

    def render(self):
        if self.kind == 'e':
            return f"e(E{self.bundle})"
        return f"{self.kind}{self.index}(E{self.bundle})"


@dataclass(frozen=True)
class GeneratorMonomial:
    """Product of generators, factors stored as sorted (Generator, exponent) pairs."""

    factors: tuple = ()

    @classmethod
    def of(cls, *generators):
        counts = {}
        for g in generators:
            counts[g] = counts.get(g, 0) + 1
        return cls(tuple(sorted(counts.items(), key=lambda item: item[0].sort_key())))

    @property
    def degree(self):
        return sum(g.degree * k for g, k in self.factors)

    def render(self):
        if not self.factors:
            return '1'
        return '*'.join(g.render() if k == 1 else f"{g.render()}^{k}" for g, k in self.factors)

    def __str__(self):
        return self.render()


_FACTOR_RE = re.compile(r'^(?:(e)|([pc])(\d+))\(E(\d+)\)(?:\^(\d+))?$')


def parse_generator_monomial(text, m0):
    """
    Parse a canonical monomial key such as "p1(E0)^2*c1(E2)" or "e(E0)".

    Args:
        text: monomial key
        m0: rank of the tangent bundle (the degree carried by e(E0))
    """
    text = text.strip()
    if text == '1':
        return GeneratorMonomial()
    generators = []
    for raw in text.split('*'):
        match = _FACTOR_RE.match(raw.strip())
        if not match:
            raise InputError(f"Invalid generator monomial factor {raw!r} in {text!r}")
        is_euler, kind, index, bundle, power = match.groups()
        bundle = int(bundle)
        if is_euler:
            if bundle != 0:
                raise InputError(f"Euler class is only defined for E0, got {raw!r}")
            gen = Generator(0, 'e', m0)
        else:
            if kind == 'p' and bundle != 0:
                raise InputError(f"Pontryagin generators belong to E0, got {raw!r}")
            if kind == 'c' and bundle == 0:
                raise InputError(f"Chern generators belong to normal bundles E1.., got {raw!r}")
            gen = Generator(bundle, kind, int(index))
        generators.extend([gen] * int(power or 1))
    return GeneratorMonomial.of(*generators)


def group_generators(groups):
    """All generators of a GroupSpec, in canonical order."""
    gens = []
    for label, kind, var_range in groups.labelled_ranges():
        size = len(var_range)
        if kind is GroupKind.TANGENT:
            gens.append(Generator(0, 'e', size))
            gens.extend(Generator(0, 'p', i) for i in range(1, size))
        else:
            gens.extend(Generator(label, 'c', k) for k in range(1, size + 1))
    return gens


def generator_monomials_of_degree(groups, degree):
    """Every generator monomial of exactly the given (complex) degree."""
    gens = group_generators(groups)
    out = []

    def walk(i, remaining, chosen):
        if remaining == 0:
            out.append(GeneratorMonomial.of(*chosen))
            return
        if i == len(gens):
            return
        g = gens[i]
        max_power = remaining // g.degree
        for k in range(max_power, -1, -1):
            walk(i + 1, remaining - k * g.degree, chosen + [g] * k)

    walk(0, degree, [])
    return out


def expand_generator(generator, groups, cutoff):
    ranges = {label: var_range for label, _, var_range in groups.labelled_ranges()}
    num_vars = groups.num_vars
    var_range = ranges.get(generator.bundle)
    if var_range is None:
        raise DimensionMismatchError(f"Generator {generator.render()} refers to a bundle absent from {groups}")
    if generator.kind == 'e':
        if generator.index != len(var_range):
            raise DimensionMismatchError(
                f"Euler class of rank {generator.index} does not match E0 of rank {len(var_range)}"
            )
        return elementary_symmetric(len(var_range), var_range, num_vars, cutoff)
    if generator.kind == 'p':
        return elementary_symmetric(generator.index, var_range, num_vars, cutoff, power=2)
    return elementary_symmetric(generator.index, var_range, num_vars, cutoff)


@lru_cache(maxsize=4096)
def expand_generator_monomial(monomial, groups, cutoff):
    """Chern-root expansion of a generator monomial, as a TruncatedPoly."""
    result = TruncatedPoly.constant(1, groups.num_vars, cutoff)
    for generator, power in monomial.factors:
        result = result * expand_generator(generator, groups, cutoff) ** power
    return result


def recompose(expression, groups, cutoff):
    """Inverse of reduce_to_generators: sum coeff * expansion."""
    result = TruncatedPoly.zero(groups.num_vars, cutoff)
    for monomial, coeff in expression.items():
        result = result + expand_generator_monomial(monomial, groups, cutoff).scale(coeff)
    return result


def find_symmetry_witness(p, groups):
    """
    A (monomial, image monomial) pair showing p is not group-symmetric, or None.

    Checks adjacent transpositions inside every group and, in the tangent
    group, simultaneous sign flips of adjacent pairs; these generate the
    required symmetry groups.
    """
    for label, kind, var_range in groups.labelled_ranges():
        positions = list(var_range)
        for a, b in zip(positions, positions[1:]):
            permutation = list(range(p.num_vars))
            permutation[a], permutation[b] = b, a
            image = p.permute(permutation)
            witness = _first_difference(p, image, lambda e: render_monomial(_swap(e, a, b)) or "1")
            if witness:
                return witness
            if kind is GroupKind.TANGENT:
                flipped = p.flip_signs((a, b))
                witness = _first_difference(
                    p, flipped, lambda e: f"{render_monomial(e) or 1} with a{a + 1}, a{b + 1} negated")
                if witness:
                    return witness
    return None


def _swap(exponents, a, b):
    e = list(exponents)
    e[a], e[b] = e[b], e[a]
    return tuple(e)


def _first_difference(p, image, partner):
    for exponents in sorted(set(p.terms) | set(image.terms), key=_grlex_key):
        if p.coefficient(exponents) != image.coefficient(exponents):
            return (render_monomial(exponents) or "1", partner(exponents))
    return None


def reduce_to_generators(p, groups):
    """
    Express a group-symmetric polynomial in the characteristic-class generators.

    Each homogeneous part of degree d is matched against the expansions of
    all generator monomials of degree d by solving the exact linear system.

    Returns:
        dict: GeneratorMonomial -> nonzero Rat, in canonical (degree, key) order
    Raises:
        NotReducibleError: the system is inconsistent (p is not symmetric);
            the message carries a witnessing monomial pair
    """
    if groups.num_vars != p.num_vars:
        raise DimensionMismatchError(
            f"Variable groups cover {groups.num_vars} variables, polynomial has {p.num_vars}"
        )
    result = {}
    for degree in range(p.degree() + 1):
        part = p.homogeneous_part(degree)
        if part.is_zero():
            continue
        candidates = generator_monomials_of_degree(groups, degree)
        expansions = [expand_generator_monomial(mono, groups, p.cutoff) for mono in candidates]
        rows = sorted({e for exp in expansions for e in exp.terms} | set(part.terms), key=_grlex_key)
        columns = [[exp.coefficient(e) for e in rows] for exp in expansions]
        target = [part.coefficient(e) for e in rows]
        solution, bad_row = solve_linear_system(columns, target) if columns else (None, 0)
        if solution is None:
            witness = find_symmetry_witness(p, groups)
            if witness is None:
                witness = (render_monomial(rows[min(bad_row, len(rows) - 1)]) or '1', '')
            logging.debug(f"Reduction failed in degree {degree} for {render_poly(p)}")
            raise NotReducibleError(
                f"Polynomial is not expressible in the characteristic-class generators of {_describe(groups)}: "
                f"coefficients of {witness[0]} and {witness[1]} should agree",
                witness=witness,
            )
        for mono, coeff in zip(candidates, solution):
            if coeff != 0:
                result[mono] = coeff
    return result


def _describe(groups):
    return ', '.join(f"E{label}[{kind.value}, rank {len(r)}]" for label, kind, r in groups.labelled_ranges())
