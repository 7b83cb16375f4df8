"""
Precedence-climbing parser for psi-hat expressions.

Grammar (m = number of variables):

    expr    := term (('+' | '-') term)*           via precedence climbing
    atoms   := integer | 'a'<j> | '(' expr ')' | '-' atom
             | 'E'                                  a1*a2*...*am
             | 'p[' k ']'                          e_k(a1^2, ..., am^2)
             | 'e[' k ']'                          e_k(a1, ..., am)
             | 'e[' k '](' expr, ... ')'            e_k of the listed expressions
    binary  := '+' '-' (left) < '*' '/' (left) < '^' (right)

'/' only divides by a nonzero constant and '^' only takes a non-negative
integer constant exponent, so every expression is a polynomial with
rational coefficients. The parse produces a small list-based AST; the
polynomial is evaluated in a ring whose cutoff is an exact degree bound
of the AST, so no term is ever lost to truncation during parsing.
"""
from fractions import Fraction
from itertools import combinations

try:
    from .errors import ExpressionSyntaxError
    from .polyring import TruncatedPoly, elementary_symmetric
except ImportError:
    from errors import ExpressionSyntaxError
    from polyring import TruncatedPoly, elementary_symmetric

# Groups of increasing binding power.
OPERATORS = [
    [("+", "left"), ("-", "left")],
    [("*", "left"), ("/", "left")],
    [("^", "right")],
]
OPERATOR_PREC = {op: idx for idx, group in enumerate(OPERATORS) for op, _ in group}
OPERATOR_ASSOC = {op: assoc for group in OPERATORS for op, assoc in group}

PUNCTUATION = "()[],"


class Token:
    __slots__ = ('kind', 'value', 'pos')

    def __init__(self, kind, value, pos):
        self.kind = kind      # 'num', 'name', 'op', 'punct'
        self.value = value
        self.pos = pos

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r}, {self.pos})"


def tokenize(source):
    if not source.isascii():
        raise ExpressionSyntaxError("Only ASCII characters are supported", 0)
    tokens = []
    idx = 0
    n = len(source)
    while idx < n:
        c = source[idx]
        if c.isspace():
            idx += 1
            continue
        start = idx
        if c.isdigit():
            while idx < n and source[idx].isdigit():
                idx += 1
            tokens.append(Token('num', int(source[start:idx]), start))
            continue
        if c.isalpha():
            while idx < n and source[idx].isalpha():
                idx += 1
            while idx < n and source[idx].isdigit():
                idx += 1
            tokens.append(Token('name', source[start:idx], start))
            continue
        if c in OPERATOR_PREC:
            tokens.append(Token('op', c, start))
            idx += 1
            continue
        if c in PUNCTUATION:
            tokens.append(Token('punct', c, start))
            idx += 1
            continue
        raise ExpressionSyntaxError(f"Unexpected character {c!r}", start)
    return tokens


class _Parser:
    def __init__(self, source, num_vars):
        self.source = source
        self.num_vars = num_vars
        self.tokens = tokenize(source)
        self.idx = 0

    # -- token stream ------------------------------------------------------

    def peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def advance(self):
        tok = self.peek()
        if tok is None:
            raise ExpressionSyntaxError("Unexpected end of input", len(self.source))
        self.idx += 1
        return tok

    def expect(self, value):
        tok = self.peek()
        if tok is None or tok.value != value:
            pos = tok.pos if tok else len(self.source)
            found = repr(tok.value) if tok else 'end of input'
            raise ExpressionSyntaxError(f"Expected {value!r}, found {found}", pos)
        return self.advance()

    # -- grammar -----------------------------------------------------------

    def parse(self):
        tree = self.parse_expr(0)
        tok = self.peek()
        if tok is not None:
            raise ExpressionSyntaxError(f"Unexpected token {tok.value!r}", tok.pos)
        return tree

    def parse_expr(self, min_prec):
        lhs = self.atom()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != 'op':
                return lhs
            prec = OPERATOR_PREC[tok.value]
            if prec < min_prec:
                return lhs
            self.advance()
            next_prec = prec + 1 if OPERATOR_ASSOC[tok.value] == 'left' else prec
            rhs = self.parse_expr(next_prec)
            lhs = [tok.value, lhs, rhs, tok.pos]

    def atom(self):
        tok = self.advance()
        if tok.kind == 'op' and tok.value == '-':
            # unary minus binds looser than '^': -a1^2 == -(a1^2)
            return ['neg', self.parse_expr(OPERATOR_PREC['^']), tok.pos]
        if tok.kind == 'op' and tok.value == '+':
            return self.parse_expr(OPERATOR_PREC['^'])
        if tok.kind == 'num':
            return ['num', Fraction(tok.value), tok.pos]
        if tok.kind == 'punct' and tok.value == '(':
            inner = self.parse_expr(0)
            self.expect(')')
            return inner
        if tok.kind == 'name':
            return self.name(tok)
        raise ExpressionSyntaxError(f"Unexpected token {tok.value!r}", tok.pos)

    def bracket_index(self):
        self.expect('[')
        tok = self.advance()
        if tok.kind != 'num':
            raise ExpressionSyntaxError(f"Macro index must be an integer, found {tok.value!r}", tok.pos)
        self.expect(']')
        return tok.value, tok.pos

    def name(self, tok):
        name = tok.value
        if name == 'E':
            return ['euler', tok.pos]
        if name == 'p':
            k, pos = self.bracket_index()
            if not 0 <= k <= self.num_vars:
                raise ExpressionSyntaxError(f"p[{k}] out of range 0..{self.num_vars}", pos)
            return ['pont', k, tok.pos]
        if name == 'e':
            k, pos = self.bracket_index()
            args = None
            nxt = self.peek()
            if nxt is not None and nxt.value == '(':
                self.advance()
                args = [self.parse_expr(0)]
                while self.peek() is not None and self.peek().value == ',':
                    self.advance()
                    args.append(self.parse_expr(0))
                self.expect(')')
            width = self.num_vars if args is None else len(args)
            if not 0 <= k <= width:
                raise ExpressionSyntaxError(f"e[{k}] out of range 0..{width}", pos)
            return ['esym', k, args, tok.pos]
        if name.startswith('a') and name[1:].isdigit():
            j = int(name[1:])
            if not 1 <= j <= self.num_vars:
                raise ExpressionSyntaxError(f"Variable {name} out of range a1..a{self.num_vars}", tok.pos)
            return ['var', j - 1, tok.pos]
        raise ExpressionSyntaxError(f"Unknown name {name!r}", tok.pos)


def _constant_value(node, num_vars, what):
    if degree_bound(node, num_vars) != 0:
        raise ExpressionSyntaxError(f"{what} must be a constant", node[-1])
    return evaluate_tree(node, num_vars, 0).constant_term()


def degree_bound(node, num_vars):
    """Exact upper bound on the total degree of the polynomial a node evaluates to."""
    kind = node[0]
    if kind == 'num':
        return 0
    if kind == 'var':
        return 1
    if kind == 'neg':
        return degree_bound(node[1], num_vars)
    if kind == 'euler':
        return num_vars
    if kind == 'pont':
        return 2 * node[1]
    if kind == 'esym':
        args = node[2]
        inner = 1 if args is None else max((degree_bound(a, num_vars) for a in args), default=0)
        return node[1] * inner
    if kind in ('+', '-'):
        return max(degree_bound(node[1], num_vars), degree_bound(node[2], num_vars))
    if kind == '*':
        return degree_bound(node[1], num_vars) + degree_bound(node[2], num_vars)
    if kind == '/':
        return degree_bound(node[1], num_vars)
    if kind == '^':
        exponent = _exponent(node, num_vars)
        return degree_bound(node[1], num_vars) * exponent
    raise ExpressionSyntaxError(f"Unknown node {kind!r}")


def _exponent(node, num_vars):
    value = _constant_value(node[2], num_vars, "Exponent")
    if value.denominator != 1 or value < 0:
        raise ExpressionSyntaxError(f"Exponent must be a non-negative integer, got {value}", node[-1])
    return int(value)


def evaluate_tree(node, num_vars, cutoff):
    kind = node[0]
    if kind == 'num':
        return TruncatedPoly.constant(node[1], num_vars, cutoff)
    if kind == 'var':
        return TruncatedPoly.variable(node[1], num_vars, cutoff)
    if kind == 'neg':
        return -evaluate_tree(node[1], num_vars, cutoff)
    if kind == 'euler':
        return elementary_symmetric(num_vars, range(num_vars), num_vars, cutoff)
    if kind == 'pont':
        return elementary_symmetric(node[1], range(num_vars), num_vars, cutoff, power=2)
    if kind == 'esym':
        k, args = node[1], node[2]
        if args is None:
            return elementary_symmetric(k, range(num_vars), num_vars, cutoff)
        values = [evaluate_tree(a, num_vars, cutoff) for a in args]
        total = TruncatedPoly.zero(num_vars, cutoff)
        for subset in combinations(values, k):
            product = TruncatedPoly.constant(1, num_vars, cutoff)
            for factor in subset:
                product = product * factor
            total = total + product
        return total
    left = evaluate_tree(node[1], num_vars, cutoff)
    if kind == '+':
        return left + evaluate_tree(node[2], num_vars, cutoff)
    if kind == '-':
        return left - evaluate_tree(node[2], num_vars, cutoff)
    if kind == '*':
        return left * evaluate_tree(node[2], num_vars, cutoff)
    if kind == '/':
        divisor = _constant_value(node[2], num_vars, "Divisor")
        if divisor == 0:
            raise ExpressionSyntaxError("Division by zero", node[-1])
        return left.scale(1 / divisor)
    if kind == '^':
        return left ** _exponent(node, num_vars)
    raise ExpressionSyntaxError(f"Unknown node {kind!r}")


def parse_tree(source, num_vars):
    return _Parser(source, num_vars).parse()


def parse_polynomial(source, num_vars, cutoff=None):
    """
    Parse an expression into a TruncatedPoly in `num_vars` variables.

    Args:
        source: expression text
        num_vars: number of Chern-root variables
        cutoff: ring cutoff; defaults to the exact degree bound of the
            expression, so the full polynomial is kept
    """
    if not source or not source.strip():
        raise ExpressionSyntaxError("Empty expression", 0)
    tree = parse_tree(source, num_vars)
    bound = degree_bound(tree, num_vars)
    return evaluate_tree(tree, num_vars, bound if cutoff is None else cutoff)
