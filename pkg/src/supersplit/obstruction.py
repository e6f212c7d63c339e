"""Automorphisms close to the identity, exp/log, and the primary obstruction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping

from .atlas import Atlas, AtlasError, require_valid, split_transition
from .cech import Cochain1, FieldModel, SolveResult, find_proportionality, solve_coboundary
from .grassmann import ChartSignature, SuperElement
from .koszul import euler_cocycle
from .svector import VectorField


class ChartAutomorphism:
    """An even algebra automorphism of a chart, given by coordinate images."""

    def __init__(self, signature: ChartSignature, images: Mapping[str, SuperElement], level: int = 0):
        self.signature = signature
        self.images = {z: images.get(z, SuperElement.coordinate(signature, z)).with_signature(signature)
                       for z in signature.names}
        for z, f in self.images.items():
            if (f.is_odd() if signature.is_odd(z) else f.is_even()) is False:
                raise ValueError(f"image of {z} has the wrong parity")
        self.level = level
        if level and not self.in_level(level):
            raise ValueError(f"automorphism is not in level {level}")

    @classmethod
    def identity(cls, sig: ChartSignature) -> ChartAutomorphism:
        return cls(sig, {})

    def __call__(self, f: SuperElement) -> SuperElement:
        return f.with_signature(self.signature).substitute(self.images, self.signature)

    def compose(self, other: ChartAutomorphism) -> ChartAutomorphism:
        """(self o other)(f) = self(other(f))."""
        return ChartAutomorphism(self.signature, {z: self(other.images[z]) for z in self.signature.names})

    def displacement(self, z: str) -> SuperElement:
        return self.images[z] - SuperElement.coordinate(self.signature, z)

    def in_level(self, m: int) -> bool:
        """images(z) - z lies in J^(m + deg z), deg z = 1 for odd coordinates."""
        return all(self.displacement(z).in_power(m + int(self.signature.is_odd(z))) for z in self.signature.names)

    def level_of(self) -> int:
        """Largest m with membership in level m (q + 1 for the identity)."""
        m = 0
        while m <= self.signature.q and self.in_level(m + 1):
            m += 1
        return m

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChartAutomorphism):
            return NotImplemented
        return self.images == other.images

    def __repr__(self) -> str:
        return "ChartAutomorphism(" + ", ".join(f"{z} -> {f}" for z, f in self.images.items()) + ")"


def exp_derivation(v: VectorField) -> ChartAutomorphism:
    """exp v = sum v^k / k!, a finite sum for even fields of degree at least 1."""
    if not v.is_even():
        raise ValueError("only even fields exponentiate to automorphisms")
    if v and v.filtration_degree() < 1:
        raise ValueError("exp needs filtration degree at least 1")
    sig = v.signature
    images = {}
    for z in sig.names:
        term = SuperElement.coordinate(sig, z)
        total = term
        k = 1
        # terminates because each application raises the J-degree
        while True:
            term = v.apply(term)
            if not term:
                break
            total = total + term.scale(Fraction(1, factorial(k)))
            k += 1
        images[z] = total
    level = v.filtration_degree() if v else 0
    return ChartAutomorphism(sig, images, level)


def log_automorphism(g: ChartAutomorphism, m: int | None = None) -> VectorField:
    """log g = sum_{k>=1} (-1)^(k+1) (g - 1)^k / k, read off on coordinates."""
    sig = g.signature
    if m is not None and m >= 1 and not g.in_level(m):
        raise ValueError(f"automorphism is not in level {m}")
    if not g.in_level(1):
        raise ValueError("log needs an automorphism of level at least 1")
    comps = {}
    for z in sig.names:
        total = SuperElement.zero(sig)
        cur = SuperElement.coordinate(sig, z)
        k = 1
        while True:
            cur = g(cur) - cur
            if not cur:
                break
            sign = 1 if k % 2 else -1
            total = total + cur.scale(Fraction(sign, k))
            k += 1
        comps[z] = total
    return VectorField(sig, comps)


def comparison_automorphism(a: Atlas, alpha: int, beta: int) -> ChartAutomorphism:
    """Pull chart alpha coordinates through the split inverse and then the transition."""
    t = a.transition(alpha, beta)
    hat_inv = split_transition(t).inverse
    images = {z: t.pullback(hat_inv.images[z]) for z in t.source_signature.names}
    return ChartAutomorphism(t.source_signature, images)


def obstruction_model(a: Atlas) -> FieldModel:
    """Degree-2 fields of the split model, d/dx block only."""
    return FieldModel(_split(a), 2, even_only=True)


def _split(a: Atlas) -> Atlas:
    return a.with_transitions([split_transition(t) for t in a.transitions.values()])


def _project_even(v: VectorField) -> VectorField:
    p = v.signature.p
    return VectorField(v.signature, list(v.components[:p]) + [SuperElement.zero(v.signature)] * v.signature.q)


def primary_obstruction(a: Atlas) -> Cochain1:
    require_valid(a)
    model = obstruction_model(a)
    entries = {}
    for alpha, beta in a.pairs():
        c = comparison_automorphism(a, alpha, beta)
        if not c.in_level(2):
            raise AtlasError(f"comparison on {alpha}-{beta} is not in level 2")
        entries[(alpha, beta)] = _project_even(log_automorphism(c).graded_part(2))
    return Cochain1(model, entries)


def jacobian_obstruction(a: Atlas) -> Cochain1:
    """Independent route: inverse reduced Jacobian times the degree-2 part of even images."""
    from .atlas import jacobian_matrix
    from .linalg import poly_inverse

    model = obstruction_model(a)
    entries = {}
    for alpha, beta in a.pairs():
        t = a.transition(alpha, beta)
        sig = t.source_signature
        jinv = poly_inverse(jacobian_matrix(t), sig.ring)
        parts = [t.images[y].graded_part(2) for y in t.target_signature.even_names]
        comps = {}
        for mu, x in enumerate(sig.even_names):
            acc = SuperElement.zero(sig)
            for nu, n in enumerate(parts):
                acc = acc + SuperElement.from_poly(sig, jinv[mu][nu]) * n
            comps[x] = acc
        entries[(alpha, beta)] = VectorField(sig, comps)
    return Cochain1(model, entries)


def obstruction_verdict(c: Cochain1, window=None) -> tuple[str, SolveResult]:
    res = solve_coboundary(c, window)
    if res.solved:
        return "TRIVIAL", res
    return ("NONTRIVIAL" if res.definitive else "UNDECIDED"), res


@dataclass
class CompareReport:
    euler_block: Cochain1
    obstruction: Cochain1
    constant: Fraction | None
    passed: bool | None
    detail: str

    def render(self) -> str:
        lines = ["euler degree-2 block:"]
        lines += ["  " + s for s in self.euler_block.render().splitlines()]
        lines.append("primary obstruction:")
        lines += ["  " + s for s in self.obstruction.render().splitlines()]
        lines.append("constant: " + ("none" if self.constant is None else str(self.constant)))
        lines.append("result: " + {True: "PASS", False: "FAIL", None: "UNDECIDED"}[self.passed])
        if self.detail:
            lines.append(self.detail)
        return "\n".join(lines)


EULER_CONSTANT = Fraction(-2)


def euler_obstruction_compare(a: Atlas, window=None) -> CompareReport:
    """Compare the degree-2 Euler class with -2 times the primary obstruction."""
    eta = primary_obstruction(a)
    model = eta.model
    e = euler_cocycle(a)
    block = Cochain1(model, {k: _project_even(v.graded_part(2)) for k, v in e.entries.items()})
    diff = solve_coboundary(block - eta.scale(EULER_CONSTANT), window)
    if not diff.solved:
        return CompareReport(block, eta, None, False if diff.definitive else None,
                             "degree-2 Euler class differs from -2 times the obstruction class")
    constant = None
    detail = ""
    if not solve_coboundary(eta, window).solved:
        prop = find_proportionality(block, eta, window)
        constant = prop.constants[0] if prop.solved else None
    else:
        detail = "both classes vanish"
    return CompareReport(block, eta, constant, True, detail)
