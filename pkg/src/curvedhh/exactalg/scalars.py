"""Exact scalar fields: the rationals, prime fields F_p and F_p(s).

Rationals are plain :class:`fractions.Fraction` values.  Prime-field and
rational-function elements are small immutable classes that refuse to mix
with elements of another characteristic.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import CharacteristicMismatch


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Field:
    """Descriptor of an exact field; calling it coerces a value into the field."""

    characteristic: int = 0
    is_perfect: bool = True
    param: str | None = None

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def is_element(self, value) -> bool:
        raise NotImplementedError

    def check(self, value):
        if not self.is_element(value):
            raise CharacteristicMismatch(f"{value!r} is not an element of {self}")
        return value


class RationalField(Field):
    characteristic = 0

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise CharacteristicMismatch(f"cannot coerce {value!r} into QQ")

    def is_element(self, value) -> bool:
        return isinstance(value, Fraction)

    def to_int_pair(self, value):
        return value.numerator, value.denominator

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def format(self, value) -> str:
        return str(value)


QQ = RationalField()


class Mod:
    """Element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _other(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise CharacteristicMismatch(f"F_{self.p} vs F_{other.p}")
            return other.v
        if isinstance(other, int) and not isinstance(other, bool):
            return other
        raise CharacteristicMismatch(f"cannot combine F_{self.p} element with {other!r}")

    def __add__(self, other):
        return Mod(self.v + self._other(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Mod(self.v - self._other(other), self.p)

    def __rsub__(self, other):
        return Mod(self._other(other) - self.v, self.p)

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        return Mod(self.v * self._other(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.v, self.p)

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return Mod(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._other(other) % self.p
        if o == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Mod(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        return Mod(self._other(other), self.p) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Mod(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Mod({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class PrimeField(Field):
    is_perfect = True

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p

    def __call__(self, value):
        p = self.characteristic
        if isinstance(value, Mod):
            if value.p != p:
                raise CharacteristicMismatch(f"F_{value.p} element in F_{p}")
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return Mod(value, p)
        if isinstance(value, Fraction):
            return Mod(value.numerator, p) / Mod(value.denominator, p)
        if isinstance(value, str):
            return self(Fraction(value))
        raise CharacteristicMismatch(f"cannot coerce {value!r} into F_{p}")

    def is_element(self, value) -> bool:
        return isinstance(value, Mod) and value.p == self.characteristic

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("GF", self.characteristic))

    def __repr__(self):
        return f"GF({self.characteristic})"

    def format(self, value) -> str:
        return str(value.v)


# --- F_p[s] helpers: polynomials as tuples of ints mod p, lowest degree first ---

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b, p):
    n = max(len(a), len(b))
    return _trim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n))


def _pneg(a, p):
    return tuple((-x) % p for x in a)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] = (a[k + i] - c * y) % p
        while a and a[-1] == 0:
            a.pop()
    return _trim(q), _trim(a)


def _pgcd(a, b, p):
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if not a:
        return ()
    inv = pow(a[-1], -1, p)
    return tuple(x * inv % p for x in a)


class RatFunc:
    """Element of F_p(s): reduced fraction num/den with monic denominator."""

    __slots__ = ("num", "den", "p")

    def __init__(self, num, den, p: int, _reduced: bool = False):
        num = _trim(x % p for x in num)
        den = _trim(x % p for x in den)
        if not den:
            raise ZeroDivisionError("zero denominator in F_p(s)")
        if not _reduced:
            if not num:
                den = (1,)
            else:
                g = _pgcd(num, den, p)
                if g != (1,):
                    num = _pdivmod(num, g, p)[0]
                    den = _pdivmod(den, g, p)[0]
            inv = pow(den[-1], -1, p)
            num = tuple(x * inv % p for x in num)
            den = tuple(x * inv % p for x in den)
        self.num = num
        self.den = den
        self.p = p

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.p != self.p:
                raise CharacteristicMismatch(f"F_{self.p}(s) vs F_{other.p}(s)")
            return other
        if isinstance(other, Mod):
            if other.p != self.p:
                raise CharacteristicMismatch(f"F_{self.p}(s) vs F_{other.p}")
            return RatFunc((other.v,), (1,), self.p)
        if isinstance(other, int) and not isinstance(other, bool):
            return RatFunc((other,), (1,), self.p)
        raise CharacteristicMismatch(f"cannot combine F_{self.p}(s) element with {other!r}")

    def __add__(self, other):
        o = self._coerce(other)
        p = self.p
        if self.den == o.den:
            return RatFunc(_padd(self.num, o.num, p), self.den, p)
        return RatFunc(_padd(_pmul(self.num, o.den, p), _pmul(o.num, self.den, p), p),
                       _pmul(self.den, o.den, p), p)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(_pneg(self.num, self.p), self.den, self.p, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = self.p
        return RatFunc(_pmul(self.num, o.num, p), _pmul(self.den, o.den, p), p)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero in F_p(s)")
        return RatFunc(self.den, self.num, self.p)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFunc((1,), (1,), self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.p == other.p and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Mod)):
            try:
                return self == self._coerce(other)
            except CharacteristicMismatch:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den, self.p))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RatFunc({self.num}, {self.den}, {self.p})"

    def __str__(self):
        return format_ratfunc(self)


def _format_spoly(c, name="s"):
    if not c:
        return "0"
    parts = []
    for k in range(len(c) - 1, -1, -1):
        a = c[k]
        if not a:
            continue
        if k == 0:
            mono = str(a)
        else:
            v = name if k == 1 else f"{name}^{k}"
            mono = v if a == 1 else f"{a}*{v}"
        parts.append(mono)
    return " + ".join(parts)


def format_ratfunc(x: RatFunc, name: str = "s") -> str:
    num = _format_spoly(x.num, name)
    if x.den == (1,):
        return num
    return f"({num})/({_format_spoly(x.den, name)})"


class RationalFunctionField(Field):
    """F_p(s) with a single transcendental parameter."""

    is_perfect = False

    def __init__(self, p: int, param: str = "s"):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p
        self.param = param

    def __call__(self, value):
        p = self.characteristic
        if isinstance(value, RatFunc):
            if value.p != p:
                raise CharacteristicMismatch(f"F_{value.p}(s) element in F_{p}(s)")
            return value
        if isinstance(value, Mod):
            if value.p != p:
                raise CharacteristicMismatch(f"F_{value.p} element in F_{p}(s)")
            return RatFunc((value.v,), (1,), p)
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return RatFunc((value,), (1,), p)
        if isinstance(value, Fraction):
            return RatFunc((value.numerator,), (1,), p) / RatFunc((value.denominator,), (1,), p)
        if isinstance(value, str):
            return self(Fraction(value))
        raise CharacteristicMismatch(f"cannot coerce {value!r} into F_{p}(s)")

    @property
    def gen(self) -> RatFunc:
        """The transcendental parameter s."""
        return RatFunc((0, 1), (1,), self.characteristic)

    def is_element(self, value) -> bool:
        return isinstance(value, RatFunc) and value.p == self.characteristic

    def __eq__(self, other):
        return (isinstance(other, RationalFunctionField)
                and other.characteristic == self.characteristic and other.param == self.param)

    def __hash__(self):
        return hash(("GFs", self.characteristic, self.param))

    def __repr__(self):
        return f"GF({self.characteristic})({self.param})"

    def format(self, value) -> str:
        return format_ratfunc(value, self.param)


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_descriptor(desc: str) -> Field:
    """Inverse of ``repr`` for the three supported fields."""
    desc = desc.strip()
    if desc in ("QQ", "Q"):
        return QQ
    if desc.startswith("GF(") and desc.endswith(")"):
        inner = desc[3:]
        if ")(" in inner:
            p, param = inner[:-1].split(")(")
            return RationalFunctionField(int(p), param)
        return PrimeField(int(inner[:-1]))
    raise ValueError(f"unknown field descriptor {desc!r}")


def is_zero(x) -> bool:
    return not x
