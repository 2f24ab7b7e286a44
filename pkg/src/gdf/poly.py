"""Exact rational polynomials.

:class:`RatPoly` is a dense univariate polynomial (low degree first).
:class:`MPoly` is a small sparse multivariate polynomial used only to
write down and evaluate model equations.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class NotDivisible(ArithmeticError):
    pass


class RatPoly:
    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "u"):
        cs = [frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    @classmethod
    def const(cls, c, var: str = "u") -> RatPoly:
        return cls([c], var)

    @classmethod
    def x(cls, var: str = "u") -> RatPoly:
        return cls([0, 1], var)

    @classmethod
    def from_roots(cls, roots: Iterable, var: str = "u") -> RatPoly:
        out = cls([1], var)
        for r in roots:
            out = out * cls([-frac(r), 1], var)
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_monic(self) -> bool:
        return self.lead == 1

    def monic(self) -> RatPoly:
        if self.is_zero():
            return self
        return RatPoly([c / self.lead for c in self.coeffs], self.var)

    def _wrap(self, other) -> RatPoly:
        return other if isinstance(other, RatPoly) else RatPoly([other], self.var)

    def __add__(self, other) -> RatPoly:
        other = self._wrap(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RatPoly([x + y for x, y in zip(a, b)], self.var)

    __radd__ = __add__

    def __neg__(self) -> RatPoly:
        return RatPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other) -> RatPoly:
        return self + (-self._wrap(other))

    def __rsub__(self, other) -> RatPoly:
        return self._wrap(other) - self

    def __mul__(self, other) -> RatPoly:
        other = self._wrap(other)
        if self.is_zero() or other.is_zero():
            return RatPoly([], self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RatPoly(out, self.var)

    __rmul__ = __mul__

    def divmod(self, other: RatPoly) -> tuple[RatPoly, RatPoly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        d = len(other.coeffs) - 1
        while len(rem) - 1 >= d and rem:
            k = len(rem) - 1 - d
            f = rem[-1] / other.lead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[i + k] -= f * c
            while rem and rem[-1] == 0:
                rem.pop()
        return RatPoly(q, self.var), RatPoly(rem, self.var)

    def exact_divide(self, other: RatPoly) -> RatPoly:
        q, r = self.divmod(other)
        if not r.is_zero():
            raise NotDivisible(f"{other} does not divide {self}")
        return q

    def divides(self, other: RatPoly) -> bool:
        return other.divmod(self)[1].is_zero()

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    evaluate = __call__

    def derivative(self) -> RatPoly:
        return RatPoly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def gcd(self, other: RatPoly) -> RatPoly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def is_squarefree(self) -> bool:
        if self.is_zero():
            return False
        return self.gcd(self.derivative()).degree == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RatPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def to_json(self) -> list[str]:
        return [frac_str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence, var: str = "u") -> RatPoly:
        return cls([frac(c) for c in data], var)

    def __str__(self) -> str:
        return format_terms(
            [(c, ((self.var, i),) if i else ()) for i, c in enumerate(self.coeffs)][::-1]
        )

    def __repr__(self) -> str:
        return f"RatPoly({self})"


def _mono_str(mono) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)


def format_terms(terms) -> str:
    """Render ``[(coeff, ((var, exp), ...)), ...]`` in the given order."""
    parts = []
    for c, mono in terms:
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        m = _mono_str(mono)
        if not m:
            body = frac_str(a)
        elif a == 1:
            body = m
        else:
            body = f"{frac_str(a)}*{m}"
        parts.append((sign, body))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {s} {b}" for s, b in parts[1:])


class MPoly:
    """Sparse polynomial: ``{((var, exp), ...) sorted by var: coeff}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = frac(c)
            if c:
                key = tuple(sorted((v, e) for v, e in mono if e))
                clean[key] = clean.get(key, Fraction(0)) + c
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def var(cls, name: str) -> MPoly:
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c) -> MPoly:
        return cls({(): c})

    @classmethod
    def from_univariate(cls, p: RatPoly, var: str | None = None) -> MPoly:
        name = var or p.var
        return cls({((name, i),): c for i, c in enumerate(p.coeffs)})

    def _wrap(self, other) -> MPoly:
        if isinstance(other, MPoly):
            return other
        if isinstance(other, RatPoly):
            return MPoly.from_univariate(other)
        return MPoly.const(other)

    def __add__(self, other) -> MPoly:
        other = self._wrap(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return MPoly(out)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> MPoly:
        return self + (-self._wrap(other))

    def __rsub__(self, other) -> MPoly:
        return self._wrap(other) - self

    def __mul__(self, other) -> MPoly:
        other = self._wrap(other)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                exps = dict(k1)
                for v, e in k2:
                    exps[v] = exps.get(v, 0) + e
                key = tuple(sorted(exps.items()))
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return MPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MPoly):
            other = self._wrap(other)
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def variables(self) -> set[str]:
        return {v for mono in self.terms for v, _ in mono}

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            term = c
            for v, e in mono:
                term *= frac(point[v]) ** e
            total += term
        return total

    def degree_in(self, var: str) -> int:
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def to_json(self) -> list:
        return [
            {"coeff": frac_str(c), "monomial": {v: e for v, e in mono}}
            for mono, c in self._ordered()
        ]

    @classmethod
    def from_json(cls, data) -> MPoly:
        return cls({tuple(d["monomial"].items()): frac(d["coeff"]) for d in data})

    def _ordered(self):
        def key(item):
            mono, _ = item
            return (-sum(e for _, e in mono), mono)

        return sorted(self.terms.items(), key=key)

    def __str__(self) -> str:
        return format_terms([(c, mono) for mono, c in self._ordered()])

    def __repr__(self) -> str:
        return f"MPoly({self})"
