"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from supersplit.coeffring import LaurentPoly, LaurentRing
from supersplit.grassmann import ChartSignature, SuperElement
from supersplit.svector import VectorField

RING = LaurentRing(("x", "y"), frozenset({"x"}))

coefficients = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def chart(q: int, invertible: bool = True) -> ChartSignature:
    return ChartSignature(("x",), tuple(f"t{i + 1}" for i in range(q)), frozenset({"x"} if invertible else ()))


@st.composite
def laurent_polys(draw, ring: LaurentRing = RING, max_terms: int = 3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(-2 if v in ring.invertible else 0, 2)) for v in ring.variables)
        terms[exps] = draw(coefficients)
    return LaurentPoly(ring, terms)


@st.composite
def odd_sets(draw, q: int):
    return tuple(sorted(draw(st.sets(st.integers(0, q - 1), max_size=q)))) if q else ()


@st.composite
def elements(draw, sig: ChartSignature, max_terms: int = 4, parity: int | None = None):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        odd = draw(odd_sets(sig.q))
        if parity is not None and len(odd) % 2 != parity:
            continue
        exps = tuple(draw(st.integers(-2 if n in sig.invertible else 0, 2)) for n in sig.even_names)
        terms[(odd, exps)] = draw(coefficients)
    return SuperElement(sig, terms)


@st.composite
def fields(draw, sig: ChartSignature, parity: int | None = None, max_terms: int = 2):
    comps = {}
    for name in sig.names:
        p = None if parity is None else (parity + int(sig.is_odd(name))) % 2
        comps[name] = draw(elements(sig, max_terms, p))
    return VectorField(sig, comps)


def small(sig: ChartSignature):
    return elements(sig, 3)


__all__ = ["RING", "chart", "coefficients", "elements", "fields", "laurent_polys", "odd_sets", "small", "Fraction"]
