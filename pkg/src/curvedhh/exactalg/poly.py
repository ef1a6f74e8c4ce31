"""Multivariate weighted polynomials over exact fields.

A :class:`PolyRing` fixes the field, the variable names, an integer weight
per variable, which variables are Laurent (may carry negative exponents) and
the monomial order used for leading terms and for printing.  Polynomials are
immutable dictionaries from exponent tuples to nonzero coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction
from operator import neg
from typing import Iterable, Mapping

from ..errors import MixedAmbient, ParseError, UnknownVariable, WeightError
from .scalars import QQ, Field, RationalFunctionField, RatFunc

Exp = tuple


# ---------------------------------------------------------------- monomials

def exp_add(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def exp_sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


def exp_divides(a: Exp, b: Exp) -> bool:
    """True if the monomial a divides b."""
    return all(x <= y for x, y in zip(a, b))


def exp_lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


def grevlex_key(e: Exp):
    return (sum(e), tuple(map(neg, e[::-1])))


def lex_key(e: Exp):
    return tuple(e)


def order_key(order):
    """Key function for an order descriptor: 'grevlex', 'lex' or ('elim', k).

    ('elim', k) compares the first k exponents by grevlex first and breaks
    ties by grevlex on the rest, an elimination order for the first block.
    """
    if order == "grevlex":
        return grevlex_key
    if order == "lex":
        return lex_key
    if isinstance(order, tuple) and len(order) == 2 and order[0] == "elim":
        k = order[1]
        return lambda e: (grevlex_key(e[:k]), grevlex_key(e[k:]))
    raise ValueError(f"unknown monomial order {order!r}")


# ---------------------------------------------------------------- rings

class PolyRing:
    """Polynomial ring F[x_1..x_n] with weights, optional Laurent variables and an order."""

    def __init__(self, field: Field, variables: Iterable[str], weights: Iterable[int] | None = None,
                 laurent: Iterable[str] = (), order="grevlex"):
        self.field = field
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if field.param is not None and field.param in self.variables:
            raise ValueError(f"{field.param!r} is the field parameter and cannot be a variable")
        self.weights = tuple(weights) if weights is not None else tuple(1 for _ in self.variables)
        if len(self.weights) != len(self.variables):
            raise ValueError("one weight per variable is required")
        self.laurent = frozenset(laurent)
        unknown = self.laurent - set(self.variables)
        if unknown:
            raise UnknownVariable(f"Laurent flag on undeclared variable(s) {sorted(unknown)}")
        self.order = order
        self.key = order_key(order)
        self.nvars = len(self.variables)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self._ambient = (field, self.variables, self.weights, self.laurent)

    # identity ignores the monomial order: same ambient ring, different bookkeeping
    @property
    def ambient(self):
        return self._ambient

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._ambient == other._ambient

    def __hash__(self):
        return hash(self._ambient)

    def __repr__(self):
        vs = ", ".join(f"{v}:{w}" + ("^±" if v in self.laurent else "")
                       for v, w in zip(self.variables, self.weights))
        return f"PolyRing({self.field!r}, [{vs}], order={self.order!r})"

    def with_order(self, order) -> "PolyRing":
        if order == self.order:
            return self
        return PolyRing(self.field, self.variables, self.weights, self.laurent, order)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    @property
    def zero_exp(self) -> Exp:
        return (0,) * self.nvars

    def unit_exp(self, i: int, k: int = 1) -> Exp:
        e = [0] * self.nvars
        e[i] = k
        return tuple(e)

    def weight(self, e: Exp) -> int:
        return sum(a * w for a, w in zip(e, self.weights))

    def gen(self, name: str) -> "Poly":
        return Poly(self, {self.unit_exp(self.index(name)): self.field.one})

    def gens(self) -> list["Poly"]:
        return [self.gen(v) for v in self.variables]

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self.zero_exp: self.field.one})

    def constant(self, c) -> "Poly":
        c = self.field(c)
        return Poly(self, {self.zero_exp: c} if c else {})

    def monomial(self, e: Exp, c=1) -> "Poly":
        c = self.field(c)
        return Poly(self, {tuple(e): c} if c else {})

    def __call__(self, value) -> "Poly":
        if isinstance(value, Poly):
            if value.ring == self:
                return value if value.ring.order == self.order else Poly(self, value.terms)
            raise MixedAmbient(f"{value.ring!r} vs {self!r}")
        if isinstance(value, str):
            return parse_poly(self, value)
        return self.constant(value)

    def parse(self, text: str) -> "Poly":
        return parse_poly(self, text)

    def is_laurent_index(self, i: int) -> bool:
        return self.variables[i] in self.laurent

    def extend(self, new_vars: Iterable[str], new_weights: Iterable[int], front: bool = False,
               order=None) -> "PolyRing":
        new_vars = tuple(new_vars)
        new_weights = tuple(new_weights)
        if front:
            vs, ws = new_vars + self.variables, new_weights + self.weights
        else:
            vs, ws = self.variables + new_vars, self.weights + new_weights
        return PolyRing(self.field, vs, ws, self.laurent, order or self.order)

    def drop(self, names: Iterable[str]) -> "PolyRing":
        names = set(names)
        keep = [i for i, v in enumerate(self.variables) if v not in names]
        return PolyRing(self.field, [self.variables[i] for i in keep],
                        [self.weights[i] for i in keep], self.laurent - names, self.order)


# ---------------------------------------------------------------- polynomials

class Poly:
    __slots__ = ("ring", "terms", "_hash", "_lm")

    def __init__(self, ring: PolyRing, terms: Mapping[Exp, object]):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c}
        self._hash = None
        self._lm = None

    # -- basic structure
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get(self.ring.zero_exp, self.ring.field.zero)

    def coeff(self, e: Exp):
        return self.terms.get(tuple(e), self.ring.field.zero)

    def __len__(self):
        return len(self.terms)

    def _check(self, other: "Poly"):
        if other.ring._ambient != self.ring._ambient:
            raise MixedAmbient(f"{self.ring!r} vs {other.ring!r}")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return self.ring.constant(other)

    # -- arithmetic
    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            out[e] = c if s is None else s + c
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.ring.field(other)
            if not c:
                return Poly(self.ring, {})
            return Poly(self.ring, {e: a * c for e, a in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Poly(self.ring, out)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or not other:
                if len(other.terms) == 1:
                    (e, c), = other.terms.items()
                    if all(self.ring.is_laurent_index(i) or x == 0 for i, x in enumerate(e)):
                        inv = Poly(self.ring, {tuple(-x for x in e): self.ring.field.one / c})
                        return self * inv
                raise ZeroDivisionError("division by a non-unit polynomial")
            other = other.constant_coeff()
        c = self.ring.field(other)
        inv = self.ring.field.one / c
        return self * inv

    def __pow__(self, n: int):
        if n < 0:
            return self.ring.one() / self ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def mul_term(self, e: Exp, c) -> "Poly":
        return Poly(self.ring, {tuple(a + b for a, b in zip(e, f)): c * d for f, d in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring._ambient == other.ring._ambient and self.terms == other.terms
        try:
            return self == self.ring.constant(other)
        except Exception:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring._ambient, frozenset(self.terms.items())))
        return self._hash

    # -- order data
    def lm(self) -> Exp:
        if self._lm is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading monomial")
            self._lm = next(iter(self.terms)) if len(self.terms) == 1 else max(self.terms, key=self.ring.key)
        return self._lm

    def lc(self):
        return self.terms[self.lm()]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self * (self.ring.field.one / self.lc())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def in_order(self, order) -> "Poly":
        return Poly(self.ring.with_order(order), self.terms)

    # -- gradings
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def weights(self) -> set[int]:
        return {self.ring.weight(e) for e in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    def weight(self) -> int | None:
        """Weight of a homogeneous polynomial; None for zero."""
        ws = self.weights()
        if not ws:
            return None
        if len(ws) > 1:
            raise WeightError(f"{self} is not weight-homogeneous")
        return ws.pop()

    def variables_used(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, a in enumerate(e):
                if a:
                    used.add(self.ring.variables[i])
        return used

    def mentions(self, names: Iterable[str]) -> bool:
        return bool(self.variables_used() & set(names))

    def has_negative_exponent(self) -> bool:
        return any(a < 0 for e in self.terms for a in e)

    # -- calculus and substitution
    def diff(self, var: str) -> "Poly":
        i = self.ring.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Poly(self.ring, out)

    def subs(self, values: Mapping[str, object]) -> "Poly":
        """Substitute polynomials or scalars for variables (result stays in this ring)."""
        idx = {self.ring.index(v): (val if isinstance(val, Poly) else self.ring.constant(val))
               for v, val in values.items()}
        out = self.ring.zero()
        for e, c in self.terms.items():
            rest = list(e)
            term = self.ring.one()
            for i, val in idx.items():
                if rest[i]:
                    term = term * val ** rest[i]
                    rest[i] = 0
            out = out + term.mul_term(tuple(rest), c)
        return out

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at a point assigning a scalar to every variable that occurs."""
        F = self.ring.field
        vals = [None] * self.ring.nvars
        for v, x in point.items():
            vals[self.ring.index(v)] = F(x)
        total = F.zero
        for e, c in self.terms.items():
            term = c
            for i, a in enumerate(e):
                if a:
                    if vals[i] is None:
                        raise UnknownVariable(f"no value for {self.ring.variables[i]!r}")
                    term = term * vals[i] ** a
            total = total + term
        return total

    def map_to(self, ring: PolyRing, positions: Mapping[int, int] | None = None) -> "Poly":
        """Re-embed in another ring, matching variables by name unless positions is given."""
        if positions is None:
            positions = {i: ring.index(v) for i, v in enumerate(self.ring.variables)
                         if any(e[i] for e in self.terms)}
        out = {}
        for e, c in self.terms.items():
            f = [0] * ring.nvars
            for i, a in enumerate(e):
                if a:
                    if i not in positions:
                        raise UnknownVariable(f"{self.ring.variables[i]!r} has no image")
                    f[positions[i]] += a
            f = tuple(f)
            out[f] = out[f] + c if f in out else c
        return Poly(ring, out)

    # -- printing
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"


# ---------------------------------------------------------------- printing

def _format_monomial(ring: PolyRing, e: Exp) -> str:
    parts = []
    for v, a in zip(ring.variables, e):
        if a == 1:
            parts.append(v)
        elif a:
            parts.append(f"{v}^{a}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    ring = p.ring
    F = ring.field
    out = []
    for e, c in p.sorted_terms():
        mono = _format_monomial(ring, e)
        negative = False
        if F == QQ and c < 0:
            negative, c = True, -c
        if isinstance(F, RationalFunctionField):
            cs = F.format(c)
            simple = c.den == (1,) and len([a for a in c.num if a]) <= 1
            if not simple:
                cs = f"({cs})"
        else:
            cs = F.format(c)
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if not out:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1
            while col - 1 < len(text) and text[col - 1].isspace():
                col += 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", 1, col)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, 1, tok[2] + 1)

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        sign = 1
        if self.peek() == ("op", "+", self.peek()[2]):
            self.take()
        elif self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        p = self.term()
        if sign < 0:
            p = -p
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            q = self.factor()
            if tok[1] == "*":
                p = p * q
            else:
                try:
                    p = p / q
                except ZeroDivisionError as exc:
                    self.fail(str(exc), tok)
        return p

    def factor(self) -> Poly:
        base_tok = self.peek()
        p = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            neg = False
            if self.peek()[:2] == ("op", "-"):
                self.take()
                neg = True
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be an integer", tok)
            n = -tok[1] if neg else tok[1]
            try:
                p = p ** n
            except ZeroDivisionError:
                self.fail("negative exponent on a non-invertible factor", base_tok)
        return p

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return self.ring.constant(val)
        if kind == "name":
            F = self.ring.field
            if F.param is not None and val == F.param:
                return self.ring.constant(F.gen)
            if val not in self.ring._index:
                self.fail(f"unknown variable {val!r}", tok)
            return self.ring.gen(val)
        if kind == "op" and val == "(":
            p = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.fail("expected ')'", self.toks[self.i - 1])
            return p
        self.fail(f"unexpected token {val!r}", tok)


def parse_poly(ring: PolyRing, text: str) -> Poly:
    """Parse ``c*x^a*y^b`` style text; raises ParseError with the column of the problem."""
    p = _Parser(ring, text).parse()
    for e in p.terms:
        for i, a in enumerate(e):
            if a < 0 and not ring.is_laurent_index(i):
                raise ParseError(f"negative exponent on non-Laurent variable {ring.variables[i]!r}", 1, 1)
    return p


def strip_laurent(p: Poly, names: Iterable[str] | None = None) -> tuple[Poly, dict]:
    """Set Laurent variables to 1, returning the stripped polynomial and exponent metadata.

    The metadata maps each stripped variable to the sorted set of exponents
    that occurred, so callers can record the discarded t-weights.
    """
    ring = p.ring
    names = set(ring.laurent if names is None else names)
    target = ring.drop(names)
    drop_idx = [ring.index(v) for v in names]
    meta = {v: set() for v in names}
    out: dict = {}
    for e, c in p.terms.items():
        for v, i in zip(names, drop_idx):
            meta[v].add(e[i])
        f = tuple(a for i, a in enumerate(e) if i not in drop_idx)
        out[f] = out[f] + c if f in out else c
    return Poly(target, out), {v: sorted(s) for v, s in meta.items()}


def as_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


__all__ = ["PolyRing", "Poly", "parse_poly", "format_poly", "strip_laurent", "order_key",
           "exp_add", "exp_sub", "exp_divides", "exp_lcm", "RatFunc"]
