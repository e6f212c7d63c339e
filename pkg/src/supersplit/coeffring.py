"""Exact rational scalars and multivariate Laurent polynomials.

Every chart of an atlas has a coefficient ring of Laurent polynomials in its
even coordinates.  Only the variables in the ring's ``invertible`` set may
carry negative exponents, so the same variable names describe both a chart
(polynomial ring) and a chart overlap (some variables inverted).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]


class ContextError(ValueError):
    """Raised when two polynomials live in different coefficient rings."""


class NotAUnitError(ArithmeticError):
    """Raised when an inverse is requested for a non-invertible element."""


def as_rational(value: Scalar | str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"not a rational scalar: {value!r}")


def format_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class LaurentRing:
    """Q[x_1^{+-1}, ..., x_n] with negative exponents allowed on ``invertible``."""

    variables: tuple[str, ...]
    invertible: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "invertible", frozenset(self.invertible))
        if len(set(self.variables)) != len(self.variables):
            raise ContextError(f"repeated variable names in {self.variables}")
        unknown = self.invertible - set(self.variables)
        if unknown:
            raise ContextError(f"invertible names {sorted(unknown)} are not variables")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ContextError(f"unknown variable {name!r}") from None

    def allows(self, exps: Exponent) -> bool:
        return all(e >= 0 or v in self.invertible for v, e in zip(self.variables, exps))

    def with_invertible(self, names: Iterable[str]) -> LaurentRing:
        extra = frozenset(names)
        if extra <= self.invertible:
            return self
        return LaurentRing(self.variables, self.invertible | extra)

    def zero(self) -> LaurentPoly:
        return LaurentPoly(self, {})

    def one(self) -> LaurentPoly:
        return self.const(1)

    def const(self, c: Scalar) -> LaurentPoly:
        return LaurentPoly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> LaurentPoly:
        exps = [0] * self.nvars
        exps[self.index(name)] = 1
        return LaurentPoly(self, {tuple(exps): 1})

    def monomial(self, exps: Sequence[int], c: Scalar = 1) -> LaurentPoly:
        return LaurentPoly(self, {tuple(exps): c})


class LaurentPoly:
    """An immutable Laurent polynomial with rational coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: LaurentRing, terms: Mapping[Exponent, Scalar] = None, *, _trusted: bool = False):
        self.ring = ring
        self._hash = None
        if _trusted:
            self._terms = terms
            return
        clean: dict[Exponent, Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != ring.nvars:
                raise ContextError(f"exponent {exps} does not match variables {ring.variables}")
            c = as_rational(c)
            if c == 0:
                continue
            if not ring.allows(exps):
                raise ContextError(f"negative exponent {exps} on a non-invertible variable of {ring}")
            clean[exps] = clean.get(exps, Fraction(0)) + c
            if clean[exps] == 0:
                del clean[exps]
        self._terms = clean

    # -- inspection ---------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return self.ring.variables

    @property
    def invertible(self) -> frozenset[str]:
        return self.ring.invertible

    def terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self._terms.items())

    def items(self):
        return self._terms.items()

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self.terms())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.ring.nvars, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_unit(self) -> bool:
        if len(self._terms) != 1:
            return False
        (exps,) = self._terms
        return all(e == 0 or v in self.ring.invertible for v, e in zip(self.ring.variables, exps))

    # -- ring plumbing ------------------------------------------------------
    def _check(self, other: LaurentPoly) -> None:
        if other.ring is not self.ring and other.ring != self.ring:
            raise ContextError(f"mismatched rings {self.ring} and {other.ring}")

    def _coerce(self, other) -> LaurentPoly | None:
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.ring.const(other)
        return None

    def with_ring(self, ring: LaurentRing) -> LaurentPoly:
        """The same polynomial viewed in a ring with the same variables."""
        if ring is self.ring or ring == self.ring:
            return self
        if ring.variables != self.ring.variables:
            raise ContextError(f"cannot move {self.ring.variables} polynomial into {ring.variables}")
        for exps in self._terms:
            if not ring.allows(exps):
                raise ContextError(f"{self} is not regular in {ring}")
        return LaurentPoly(ring, self._terms, _trusted=True)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for exps, c in other._terms.items():
            v = out.get(exps, 0) + c
            if v:
                out[exps] = v
            else:
                out.pop(exps, None)
        return LaurentPoly(self.ring, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self.ring, {e: -c for e, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, c: Scalar) -> LaurentPoly:
        c = as_rational(c)
        if c == 0:
            return self.ring.zero()
        return LaurentPoly(self.ring, {e: v * c for e, v in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return LaurentPoly(self.ring, out, _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> LaurentPoly:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.unit_invert() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def unit_invert(self) -> LaurentPoly:
        """Inverse of a monomial unit c*x^e."""
        if len(self._terms) != 1:
            raise NotAUnitError(f"{self} is not a monomial unit")
        ((exps, c),) = self._terms.items()
        inv = tuple(-e for e in exps)
        if not self.ring.allows(inv):
            raise NotAUnitError(f"{self} is not invertible in {self.ring}")
        return LaurentPoly(self.ring, {inv: 1 / c}, _trusted=True)

    def derivative(self, name: str) -> LaurentPoly:
        k = self.ring.index(name)
        out = {}
        for exps, c in self._terms.items():
            if exps[k]:
                e = list(exps)
                e[k] -= 1
                out[tuple(e)] = c * exps[k]
        return LaurentPoly(self.ring, out, _trusted=True)

    def compose(self, images: Sequence[LaurentPoly], ring: LaurentRing) -> LaurentPoly:
        """Substitute ``images[i]`` (polynomials in ``ring``) for variable i."""
        if len(images) != self.ring.nvars:
            raise ContextError("wrong number of images")
        cache: dict[tuple[int, int], LaurentPoly] = {}
        total = ring.zero()
        for exps, c in self._terms.items():
            term = ring.const(c)
            for i, e in enumerate(exps):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = images[i].with_ring(ring) ** e
                    term = term * cache[(i, e)]
            total = total + term
        return total

    # -- comparison and display ---------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.ring.variables == other.ring.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return not self._terms
            return self._terms == {(0,) * self.ring.nvars: other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.variables, frozenset(self._terms.items())))
        return self._hash

    def __str__(self) -> str:
        return render_terms([(c, monomial_factors(self.ring.variables, e)) for e, c in self.terms()])

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def monomial_factors(names: Sequence[str], exps: Exponent) -> list[str]:
    out = []
    for name, e in zip(names, exps):
        if e == 1:
            out.append(name)
        elif e:
            out.append(f"{name}^{e}")
    return out


def render_terms(terms: Sequence[tuple[Fraction, Sequence[str]]]) -> str:
    """Join ``(coefficient, factors)`` pairs into canonical text.

    Every term keeps its coefficient, so ``x`` renders as ``1*x``.
    """
    if not terms:
        return "0"
    parts = []
    for k, (c, factors) in enumerate(terms):
        body = "*".join([format_rational(abs(c))] + list(factors))
        if k == 0:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append((" + " if c > 0 else " - ") + body)
    return "".join(parts)


def ring_arith(a: LaurentPoly, b: LaurentPoly | None, op: str) -> LaurentPoly:
    """Functional form of ``+``, ``*`` and unary ``-``."""
    if op == "add":
        a._check(b)
        return a + b
    if op == "mul":
        a._check(b)
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")


def unit_invert(a: LaurentPoly) -> LaurentPoly:
    return a.unit_invert()
