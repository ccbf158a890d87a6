"""Exact univariate polynomial arithmetic and sign certification.

Polynomials live in the single variable p with rational coefficients and
every operation is exact.  Coefficients are stored as Python ints where
possible (a Fraction with denominator 1 is normalized to int), which keeps
the hot paths -- kernel powers and Sturm sequences -- in plain integer
arithmetic.

Sign questions on subintervals of [0, 1] are answered by Sturm's method:
root counting uses the squarefree part and a primitive pseudo-remainder
sequence, and certificates classify a polynomial as positive, nonnegative
with interior zeros, identically zero, sign-changing (with an isolating
witness interval), or negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

Rational = Union[int, Fraction]


class ExactDivisionError(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


def _coeff(value) -> Rational:
    """Normalize a coefficient to int or reduced Fraction; reject inexact types."""
    if type(value) is int:
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, int):  # bool and int subclasses
        return int(value)
    raise TypeError(f"exact rational coefficient expected, got {type(value).__name__}")


class Polynomial:
    """Dense polynomial in p, coefficients indexed by degree, trailing zeros stripped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        cs = [_coeff(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: Rational) -> "Polynomial":
        return Polynomial((value,))

    @staticmethod
    def monomial(degree: int, coefficient: Rational = 1) -> "Polynomial":
        return Polynomial((0,) * degree + (coefficient,))

    # -- basic queries -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def leading(self) -> Rational:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def constant_term(self) -> Rational:
        return self.coeffs[0] if self.coeffs else 0

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        out = list(self.coeffs) + [0] * max(0, len(other.coeffs) - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            out[i] -= c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return Polynomial()
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return Polynomial(out)
        scalar = _coeff(other)
        return Polynomial([scalar * c for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Euclidean division over the rationals."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dg = other.degree
        lead = Fraction(other.coeffs[-1])
        quot = [0] * max(0, len(rem) - dg)
        while len(rem) - 1 >= dg and rem:
            shift = len(rem) - 1 - dg
            factor = Fraction(rem[-1]) / lead
            quot[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[i + shift] -= factor * c
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(quot), Polynomial(rem)

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        quot, rem = self.divmod(other)
        if not rem.is_zero:
            raise ExactDivisionError(f"{self!r} is not divisible by {other!r}")
        return quot

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, at: Rational) -> Rational:
        """Exact evaluation by Horner's rule."""
        at = _coeff(at)
        acc: Rational = 0
        for c in reversed(self.coeffs):
            acc = acc * at + c
        return _coeff(Fraction(acc)) if isinstance(acc, Fraction) else acc

    # -- equality / hashing / rendering -------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly[0]"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                term = str(c)
            else:
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                var = "p" if i == 1 else f"p^{i}"
                term = f"{mag}{var}"
                if c < 0 and not parts:
                    term = "-" + term
            if parts:
                parts.append(("- " if c < 0 else "+ ") + (term.lstrip("-") if i else term))
            else:
                parts.append(term)
        return "Poly[" + " ".join(parts) + "]"

    # -- serialization -----------------------------------------------------

    def to_strings(self) -> list[str]:
        """Coefficient strings, degree ascending, exact 'num' or 'num/den' rendering."""
        return [str(c) for c in self.coeffs]

    @staticmethod
    def from_strings(items: Iterable[str]) -> "Polynomial":
        return Polynomial([Fraction(s) for s in items])

    # -- integer scaling ----------------------------------------------------

    def integer_scaled(self) -> tuple[list[int], Fraction]:
        """Return (integer coefficient list, positive scale) with self = scale * ints."""
        den = 1
        for c in self.coeffs:
            if isinstance(c, Fraction):
                den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        return ints, Fraction(1, den)


ZERO = Polynomial()
ONE = Polynomial((1,))
P = Polynomial((0, 1))


def poly_sum(polys: Iterable[Polynomial]) -> Polynomial:
    """Sum with a single accumulator pass (avoids quadratic re-allocation)."""
    acc: list = []
    for q in polys:
        if len(q.coeffs) > len(acc):
            acc.extend([0] * (len(q.coeffs) - len(acc)))
        for i, c in enumerate(q.coeffs):
            acc[i] += c
    return Polynomial(acc)


def poly_dot(left: Iterable[Polynomial], right: Iterable[Polynomial]) -> Polynomial:
    """Exact dot product accumulating into one coefficient buffer."""
    acc: list = []
    for a, b in zip(left, right):
        ca, cb = a.coeffs, b.coeffs
        if not ca or not cb:
            continue
        need = len(ca) + len(cb) - 1
        if need > len(acc):
            acc.extend([0] * (need - len(acc)))
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    acc[i + j] += x * y
    return Polynomial(acc)


# ---------------------------------------------------------------------------
# Integer polynomial helpers (raw coefficient lists, degree ascending).
# ---------------------------------------------------------------------------


def _trim(cs: list[int]) -> list[int]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _content(cs: list[int]) -> int:
    g = 0
    for c in cs:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _primitive(cs: list[int]) -> list[int]:
    """Divide by the positive content; preserves signs."""
    g = _content(cs)
    if g > 1:
        return [c // g for c in cs]
    return list(cs)


def _derivative_int(cs: list[int]) -> list[int]:
    return [i * c for i, c in enumerate(cs)][1:]


def _eval_sign(cs: list[int], point: Fraction) -> int:
    """Exact sign of the integer polynomial at a rational point."""
    num, den = point.numerator, point.denominator
    acc = 0
    scale = 1
    for c in reversed(cs):
        acc = acc * num + c * scale
        scale *= den
    # acc equals den^deg * value; den > 0 so signs agree
    return (acc > 0) - (acc < 0)


def _prem_positive(f: list[int], g: list[int]) -> list[int]:
    """Pseudo-remainder of f by g scaled by a positive constant."""
    rem = list(f)
    dg = len(g) - 1
    lead_g = g[-1]
    steps = 0
    while len(rem) - 1 >= dg and rem:
        lead_r = rem[-1]
        shift = len(rem) - 1 - dg
        rem = [lead_g * c for c in rem]
        for i, gc in enumerate(g):
            rem[i + shift] -= lead_r * gc
        _trim(rem)
        steps += 1
    if lead_g < 0 and steps % 2 == 1:
        rem = [-c for c in rem]
    return rem


def _gcd_int(f: list[int], g: list[int]) -> list[int]:
    """Polynomial gcd over Z, primitive with positive leading coefficient."""
    f, g = _primitive(_trim(list(f))), _primitive(_trim(list(g)))
    if not f:
        base = g
    elif not g:
        base = f
    else:
        if len(f) < len(g):
            f, g = g, f
        while g:
            rem = _primitive(_prem_positive(f, g))
            f, g = g, rem
        base = f
    if not base:
        return []
    if base[-1] < 0:
        base = [-c for c in base]
    return base


def _exact_div_int(f: list[int], g: list[int]) -> list[int]:
    """Exact division in Q[p] of integer polynomials, result must be integral."""
    quot, rem = Polynomial(f).divmod(Polynomial(g))
    if not rem.is_zero:
        raise ExactDivisionError("inexact integer polynomial division")
    out = []
    for c in quot.coeffs:
        if isinstance(c, Fraction):
            raise ExactDivisionError("quotient not integral")
        out.append(c)
    return out


def _squarefree_part(cs: list[int]) -> list[int]:
    g = _gcd_int(cs, _derivative_int(cs))
    if len(g) <= 1:
        return _primitive(list(cs))
    return _primitive(_exact_div_int(cs, g))


def _yun_decomposition(cs: list[int]) -> list[tuple[list[int], int]]:
    """Squarefree decomposition: [(factor_i, i)] with f = const * prod factor_i^i."""
    f = Polynomial(_primitive(_trim(list(cs))))
    if f.degree < 1:
        return []
    df = f.derivative()
    a = Polynomial(_gcd_int(list(f.coeffs), list(df.coeffs)))
    b = f.exact_div(a)
    c = df.exact_div(a)
    out: list[tuple[list[int], int]] = []
    i = 1
    while b.degree >= 1:
        d = c - b.derivative()
        g = Polynomial(_gcd_int(list(b.coeffs), list(d.coeffs)))
        if g.degree >= 1:
            out.append(([int(x) for x in g.coeffs], i))
        b = b.exact_div(g)
        c = d.exact_div(g)
        i += 1
    return out


class _SturmChain:
    """Sturm chain of a squarefree integer polynomial, reused across endpoints."""

    def __init__(self, squarefree: list[int]):
        chain = [_primitive(list(squarefree))]
        deriv = _primitive(_derivative_int(squarefree))
        if deriv:
            chain.append(deriv)
            while True:
                rem = _prem_positive(chain[-2], chain[-1])
                if not rem:
                    break
                chain.append(_primitive([-c for c in rem]))
        self.chain = chain

    def variations(self, point: Fraction) -> int:
        signs = [s for s in (_eval_sign(cs, point) for cs in self.chain) if s != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def count_open(self, lo: Fraction, hi: Fraction) -> int:
        """Distinct roots in the open interval; endpoints must not be roots."""
        return self.variations(lo) - self.variations(hi)


def _exact_div_rational(cs: list[int], root: Fraction) -> list[int]:
    """Divide integer polynomial by (den*p - num) after scaling to stay integral."""
    factor = Polynomial((-root.numerator, root.denominator))
    quot, rem = Polynomial(cs).divmod(factor)
    if not rem.is_zero:
        raise ExactDivisionError("point is not a root")
    ints, _ = quot.integer_scaled()
    return _primitive(ints)


def _strip_endpoint_roots(cs: list[int], lo: Fraction, hi: Fraction) -> list[int]:
    """Divide out roots sitting exactly at the interval endpoints."""
    while len(cs) > 1 and _eval_sign(cs, lo) == 0:
        cs = _exact_div_rational(cs, lo)
    while len(cs) > 1 and _eval_sign(cs, hi) == 0:
        cs = _exact_div_rational(cs, hi)
    return cs


def _count_roots_open(squarefree: list[int], lo: Fraction, hi: Fraction) -> int:
    """Distinct roots of a squarefree integer polynomial strictly inside (lo, hi)."""
    stripped = _strip_endpoint_roots(squarefree, lo, hi)
    if len(stripped) <= 1:
        return 0
    return _SturmChain(stripped).count_open(lo, hi)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor up to scale: primitive, positive leading coefficient."""
    ia, _ = a.integer_scaled()
    ib, _ = b.integer_scaled()
    return Polynomial(_gcd_int(ia, ib))


def sturm_root_count(q: Polynomial, lo: Rational, hi: Rational) -> int:
    """Number of distinct real roots of q strictly inside (lo, hi)."""
    if q.is_zero:
        raise ValueError("root counting requires a nonzero polynomial")
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError("empty interval")
    ints, _ = q.integer_scaled()
    sqf = _squarefree_part(ints)
    if len(sqf) <= 1:
        return 0
    return _count_roots_open(sqf, lo, hi)


# ---------------------------------------------------------------------------
# Sign certification.
# ---------------------------------------------------------------------------

POSITIVE = "positive"
NONNEGATIVE = "nonnegative-with-interior-zeros"
IDENTICALLY_ZERO = "identically-zero"
CHANGES_SIGN = "changes-sign"
NEGATIVE = "negative"

NONNEGATIVE_VERDICTS = frozenset({POSITIVE, NONNEGATIVE, IDENTICALLY_ZERO})


@dataclass(frozen=True)
class Interval:
    """Rational interval with optional closed endpoints."""

    lo: Fraction
    hi: Fraction
    closed_lo: bool = False
    closed_hi: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not self.lo < self.hi:
            raise ValueError("interval endpoints must satisfy lo < hi")

    def __str__(self) -> str:
        left = "[" if self.closed_lo else "("
        right = "]" if self.closed_hi else ")"
        return f"{left}{self.lo},{self.hi}{right}"

    def to_dict(self) -> dict:
        return {
            "lo": str(self.lo),
            "hi": str(self.hi),
            "closed_lo": self.closed_lo,
            "closed_hi": self.closed_hi,
        }

    @staticmethod
    def from_dict(data: dict) -> "Interval":
        return Interval(
            Fraction(data["lo"]),
            Fraction(data["hi"]),
            bool(data["closed_lo"]),
            bool(data["closed_hi"]),
        )


UNIT_OPEN = Interval(0, 1)


@dataclass(frozen=True)
class SignCertificate:
    """Outcome of sign certification of a polynomial on an interval."""

    verdict: str
    interval: Interval
    witness: Optional[Interval] = None

    @property
    def nonnegative(self) -> bool:
        return self.verdict in NONNEGATIVE_VERDICTS

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "interval": self.interval.to_dict()}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out

    @staticmethod
    def from_dict(data: dict) -> "SignCertificate":
        witness = Interval.from_dict(data["witness"]) if "witness" in data else None
        return SignCertificate(data["verdict"], Interval.from_dict(data["interval"]), witness)


def _nonroot_point(avoid: list[list[int]], lo: Fraction, hi: Fraction) -> Fraction:
    """Deterministic rational in (lo, hi) that is a root of none of the given polys."""
    width = hi - lo
    level = 2
    while True:
        for j in range(1, level, 2):
            point = lo + width * Fraction(j, level)
            if all(_eval_sign(cs, point) != 0 for cs in avoid):
                return point
        level *= 2


def _isolate_sign_change(
    qints: list[int], odd: list[int], lo: Fraction, hi: Fraction
) -> Interval:
    """Shrink (lo, hi) to an interval where q provably changes sign.

    odd must have its endpoint roots stripped and at least one root inside.
    """
    chain = _SturmChain(odd)
    a, b = lo, hi

    def ok_endpoint(pt: Fraction) -> bool:
        return _eval_sign(qints, pt) != 0 and _eval_sign(odd, pt) != 0

    while True:
        if ok_endpoint(a) and ok_endpoint(b) and chain.count_open(a, b) == 1:
            if _eval_sign(qints, a) * _eval_sign(qints, b) < 0:
                return Interval(a, b)
        mid = _nonroot_point([qints, odd], a, b)
        if chain.count_open(a, mid) >= 1:
            b = mid
        else:
            a = mid


def certify_sign(q: Polynomial, interval: Interval) -> SignCertificate:
    """Classify the sign behaviour of q on a subinterval of [0, 1].

    The verdict covers the open interior plus any included endpoint.  A zero
    at an included endpoint demotes "positive" to the nonnegative verdict;
    "negative" likewise covers nonpositive polynomials with isolated zeros.
    """
    if interval.lo < 0 or interval.hi > 1:
        raise ValueError("certification interval must lie within [0, 1]")
    if q.is_zero:
        return SignCertificate(IDENTICALLY_ZERO, interval)

    qints, _ = q.integer_scaled()
    endpoint_zero = False
    if interval.closed_lo and _eval_sign(qints, interval.lo) == 0:
        endpoint_zero = True
    if interval.closed_hi and _eval_sign(qints, interval.hi) == 0:
        endpoint_zero = True

    # p and (1-p) are positive on the open interior of any subinterval of
    # [0, 1]; stripping those factors keeps interior sign analysis intact.
    stripped = _primitive(list(qints))
    while stripped and stripped[0] == 0:
        stripped.pop(0)
    one_minus_p = [1, -1]
    while True:
        try:
            candidate = _exact_div_int(stripped, one_minus_p)
        except ExactDivisionError:
            break
        stripped = candidate

    factors = _yun_decomposition(stripped)
    odd = [1]
    even = [1]
    for factor, mult in factors:
        if mult % 2:
            odd = _trim([c for c in (Polynomial(odd) * Polynomial(factor)).coeffs])
        else:
            even = _trim([c for c in (Polynomial(even) * Polynomial(factor)).coeffs])

    lo, hi = interval.lo, interval.hi
    odd = _strip_endpoint_roots(odd, lo, hi) if len(odd) > 1 else odd
    n_odd = _count_roots_open(odd, lo, hi) if len(odd) > 1 else 0
    n_even = _count_roots_open(_squarefree_part(even), lo, hi) if len(even) > 1 else 0

    if n_odd > 0:
        witness = _isolate_sign_change(qints, odd, lo, hi)
        return SignCertificate(CHANGES_SIGN, interval, witness)

    probe = _nonroot_point([qints], lo, hi)
    sign = _eval_sign(qints, probe)
    if sign > 0:
        if n_even > 0 or endpoint_zero:
            return SignCertificate(NONNEGATIVE, interval)
        return SignCertificate(POSITIVE, interval)
    return SignCertificate(NEGATIVE, interval)
