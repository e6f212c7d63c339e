"""Splitting: the Euler differential, staged lifts, Koszul's iteration and split coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Mapping, Sequence

from .atlas import Atlas, TransitionMap, is_split_presentation, require_valid, split_model_of
from .cech import Cochain0, Cochain1, FieldModel, coboundary, solve_coboundary
from .connection import ChristoffelData, check_global
from .grassmann import ChartSignature, SuperElement
from .svector import VectorField, euler_field, pushforward


class LiftError(ArithmeticError):
    """Raised when an inductive invariant of the iteration fails."""


# -- the Euler differential and staged lifts ---------------------------------------

@dataclass
class StageReport:
    degree: int
    verdict: str
    route: str
    correction: Cochain0 | None = None


@dataclass
class LiftReport:
    cocycle: Cochain1
    stages: list[StageReport]
    verdict: str
    family: dict[int, VectorField] | None = None
    window: tuple[int, int] | None = None

    def render(self) -> str:
        lines = ["cocycle:"]
        lines += ["  " + line for line in self.cocycle.render().splitlines()]
        for s in self.stages:
            lines.append(f"stage {s.degree}: {s.verdict} ({s.route})")
        lines.append(f"verdict: {self.verdict}")
        if self.window is not None and self.verdict == "UNDECIDED":
            lines.append(f"window: [{self.window[0]}, {self.window[1]}]")
        return "\n".join(lines)


def _lowest_degree(c: Cochain1) -> int | None:
    degs = set()
    for v in c.entries.values():
        degs |= v.degrees()
    return min(degs) if degs else None


def _graded_cochain(c: Cochain1, model: FieldModel, m: int) -> Cochain1:
    return Cochain1(model, {k: v.graded_part(m) for k, v in c.entries.items()})


def staged_lift(a: Atlas, family: Mapping[int, VectorField], first_stage: int,
                window: tuple[int, int] | None = None) -> LiftReport:
    """Correct a chart family degree by degree until it is global.

    Corrections are solved in the graded pieces of the split model.  Failure
    at ``first_stage`` is definitive; later failures are undecided because
    earlier corrections were one choice among many.
    """
    split = split_model_of(a)
    full = FieldModel(a)
    fam = dict(family)
    initial = coboundary(Cochain0(full, fam))
    parity = next((v.parity() for v in fam.values() if v), 0)
    stages: list[StageReport] = []
    current = initial
    used_window = None
    while True:
        m = _lowest_degree(current)
        if m is None:
            return LiftReport(initial, stages, "SPLIT", fam, used_window)
        if m < first_stage:
            raise LiftError(f"cocycle has a part of degree {m} below the first stage {first_stage}")
        model = FieldModel(split, m)
        part = _graded_cochain(current, model, m)
        res = solve_coboundary(part, window)
        if res.window is not None:
            used_window = res.window
        if not res.solved:
            definitive = res.definitive and m == first_stage
            verdict = "NONSPLIT" if definitive else "UNDECIDED"
            stages.append(StageReport(m, "UNSOLVABLE" if definitive else "UNDECIDED", res.route))
            return LiftReport(initial, stages, verdict, None, res.window or used_window or window)
        stages.append(StageReport(m, "SOLVED", res.route, res.cochain))
        for alpha in fam:
            corr = res.cochain[alpha].with_signature(fam[alpha].signature)
            fam[alpha] = fam[alpha] - corr
        current = coboundary(Cochain0(full, fam))
        current = current.map_entries(lambda v: v.even_part() if parity == 0 else v.odd_part())


def euler_cocycle(a: Atlas) -> Cochain1:
    model = FieldModel(a)
    return coboundary(Cochain0(model, {alpha: euler_field(sig) for alpha, sig in a.charts.items()}))


def euler_differential(a: Atlas, window: tuple[int, int] | None = None) -> LiftReport:
    require_valid(a)
    family = {alpha: euler_field(sig) for alpha, sig in a.charts.items()}
    report = staged_lift(a, family, 2, window)
    for v in report.cocycle.entries.values():
        if not v.is_even():
            raise LiftError("the Euler cocycle is not even")
        if v.graded_part(1):
            raise LiftError("the Euler cocycle has a degree-1 part")
    return report


# -- Koszul iteration ----------------------------------------------------------------

@dataclass
class LiftFamily:
    order: int
    fields: dict[int, VectorField]


@dataclass
class KoszulResult:
    fields: dict[int, VectorField]
    residuals: dict[int, VectorField]
    newton_steps: list[tuple[int, int]] = field(default_factory=list)

    def render(self) -> str:
        lines = []
        for alpha, h in self.fields.items():
            lines.append(f"H chart {alpha} = {h}")
        for alpha, r in self.residuals.items():
            lines.append(f"residual chart {alpha} = {r}")
        return "\n".join(lines)


def fixed_point_residual(conn: ChristoffelData, h: VectorField) -> VectorField:
    return conn.covariant_derivative(h, h) - h


def koszul_step(conn: ChristoffelData, h: VectorField, order: int) -> VectorField:
    """Two applications of v -> (nabla_H v - l v)/(l - 1)."""
    if order <= 1:
        raise ValueError("the Koszul step needs order at least 2")
    inv = Fraction(1, order - 1)
    h_alg = (conn.covariant_derivative(h, h) - h.scale(order)).scale(inv)
    return (conn.covariant_derivative(h, h_alg) - h_alg.scale(order)).scale(inv)


def newton_correction(conn: ChristoffelData, h: VectorField, order: int) -> VectorField:
    """Remove the degree-``order`` residual using the eigenvalues l+1 and l-1 of the linearization."""
    r = fixed_point_residual(conn, h).graded_part(order)
    nr = conn.covariant_derivative(r, h) + conn.covariant_derivative(h, r) - r
    nr = nr.graded_part(order)
    c = (r.scale(2 * order) - nr).scale(Fraction(1, (order - 1) * (order + 1)))
    return h - c


def _check_compatible(a: Atlas, fields: Mapping[int, VectorField], order: int) -> None:
    for alpha, beta in a.pairs():
        t = a.transition(alpha, beta)
        diff = pushforward(fields[beta], t) - fields[alpha].with_signature(t.source_signature)
        if not diff.in_filtration(order):
            raise LiftError(f"lift family incompatible modulo order {order} on {alpha}-{beta}: {diff}")


def koszul_iterate(a: Atlas, conn: Mapping[int, ChristoffelData], start: LiftFamily | None = None,
                   check_connection: bool = True) -> KoszulResult:
    require_valid(a)
    if check_connection:
        report = check_global(conn, a)
        if not report.passed:
            raise LiftError("connection is not global and even: " + "; ".join(c.name for c in report.failures()))
    if start is None:
        start = LiftFamily(2, {alpha: euler_field(sig) for alpha, sig in a.charts.items()})
    if start.order < 2:
        raise ValueError("lift order must be at least 2")
    fields = dict(start.fields)
    for alpha, h in fields.items():
        if h.initial_form() != euler_field(h.signature):
            raise LiftError(f"chart {alpha} start does not have the Euler field as initial form")
    _check_compatible(a, fields, start.order)
    q = a.q
    newton: list[tuple[int, int]] = []
    for order in range(start.order, q + 1):
        for alpha in fields:
            h = koszul_step(conn[alpha], fields[alpha], order)
            if not fixed_point_residual(conn[alpha], h).in_filtration(order + 1):
                h = newton_correction(conn[alpha], h, order)
                newton.append((alpha, order))
            if not fixed_point_residual(conn[alpha], h).in_filtration(order + 1):
                raise LiftError(f"residual on chart {alpha} not removed at order {order}")
            fields[alpha] = h
        _check_compatible(a, fields, order + 1)
    residuals = {alpha: fixed_point_residual(conn[alpha], h) for alpha, h in fields.items()}
    if any(r for r in residuals.values()):
        raise LiftError("fixed-point equation fails")
    _check_compatible(a, fields, q + 2)
    return KoszulResult(fields, residuals, newton)


# -- splitting operators -------------------------------------------------------------

def derivation_power_apply(h: VectorField, f: SuperElement, poly: Sequence[Fraction]) -> SuperElement:
    """sum_k poly[k] * H^k(f)."""
    total = SuperElement.zero(f.signature)
    cur = f
    for k, c in enumerate(poly):
        if k:
            cur = h.apply(cur)
        if c:
            total = total + cur.scale(c)
    return total


def apply_product(h: VectorField, f: SuperElement, roots: Sequence[int], scale: Fraction = Fraction(1)) -> SuperElement:
    """scale * prod_j (H - j) applied to f."""
    out = f
    for j in roots:
        out = h.apply(out) - out.scale(j)
    return out.scale(scale)


def projector(h: VectorField, m: int, q: int) -> Callable[[SuperElement], SuperElement]:
    """Lagrange projector onto the H-eigenvalue m among 0..q."""
    roots = [j for j in range(q + 1) if j != m]
    denom = Fraction(1)
    for j in roots:
        denom *= m - j
    return lambda f: apply_product(h, f, roots, 1 / denom)


def splitting_operator(h: VectorField, m: int, f: SuperElement) -> SuperElement:
    """m*f - H(f)."""
    return f.scale(m) - h.apply(f)


def zero_projector_product(h: VectorField, f: SuperElement, q: int) -> SuperElement:
    """prod_{j=1..q}(j - H) f / q!, which agrees with the weight-0 projector."""
    out = f
    for j in range(1, q + 1):
        out = out.scale(j) - h.apply(out)
    return out.scale(Fraction(1, factorial(q)))


def odd_projector_product(h: VectorField, f: SuperElement, q: int, constant: int | None = None) -> SuperElement:
    """prod_{j=2..q}(j - H) f / constant, defaulting to (q-1)!."""
    out = f
    for j in range(2, q + 1):
        out = out.scale(j) - h.apply(out)
    return out.scale(Fraction(1, constant if constant is not None else factorial(q - 1)))


def alternating_factorial_constant(q: int) -> int:
    """sum_{k=0}^{q-1} (-1)^k (q-k)!, which equals (q-1)! only for q <= 2."""
    return sum((-1) ** k * factorial(q - k) for k in range(q))


@dataclass
class ProjectorCheck:
    idempotent: bool
    orthogonal: bool
    complete: bool

    @property
    def passed(self) -> bool:
        return self.idempotent and self.orthogonal and self.complete


def check_projectors(h: VectorField, q: int, tests: Sequence[SuperElement]) -> ProjectorCheck:
    projs = [projector(h, m, q) for m in range(q + 1)]
    idem = orth = comp = True
    for f in tests:
        images = [p(f) for p in projs]
        total = SuperElement.zero(f.signature)
        for m, g in enumerate(images):
            total = total + g
            if projs[m](g) != g:
                idem = False
            for k, p in enumerate(projs):
                if k != m and p(g):
                    orth = False
        if total != f:
            comp = False
    return ProjectorCheck(idem, orth, comp)


def coordinate_test_functions(sig: ChartSignature) -> list[SuperElement]:
    coords = [SuperElement.coordinate(sig, z) for z in sig.names]
    tests = list(coords)
    for i, f in enumerate(coords):
        for g in coords[i:]:
            tests.append(f * g)
    return tests


@dataclass
class SplitResult:
    atlas: Atlas
    changes: dict[int, TransitionMap]
    projector_checks: dict[int, ProjectorCheck]
    euler_in_new: dict[int, bool]

    def render(self) -> str:
        lines = []
        for alpha, t in self.changes.items():
            for z, f in t.images.items():
                lines.append(f"chart {alpha}: new {z} = {f}")
        for alpha, chk in self.projector_checks.items():
            lines.append(f"chart {alpha}: projectors {'PASS' if chk.passed else 'FAIL'}")
        return "\n".join(lines)


def splitting_map(a: Atlas, fields: Mapping[int, VectorField]) -> SplitResult:
    q = a.q
    for alpha, beta in a.pairs():
        t = a.transition(alpha, beta)
        if pushforward(fields[beta], t) != fields[alpha].with_signature(t.source_signature):
            raise LiftError(f"field family is not global on {alpha}-{beta}")
    changes: dict[int, TransitionMap] = {}
    checks: dict[int, ProjectorCheck] = {}
    for alpha, sig in a.charts.items():
        h = fields[alpha].with_signature(sig)
        if h.initial_form() != euler_field(sig):
            raise LiftError(f"chart {alpha} field does not have the Euler field as initial form")
        p0, p1 = projector(h, 0, q), projector(h, 1, q)
        images = {x: p0(SuperElement.coordinate(sig, x)) for x in sig.even_names}
        images.update({t: p1(SuperElement.coordinate(sig, t)) for t in sig.odd_names})
        checks[alpha] = check_projectors(h, q, coordinate_test_functions(sig))
        if not checks[alpha].passed:
            raise LiftError(f"projectors fail on chart {alpha}")
        changes[alpha] = TransitionMap(alpha, alpha, sig, sig, images)
    new_transitions = []
    for alpha, beta in a.pairs():
        t = a.transition(alpha, beta)
        src = t.source_signature
        back = {z: f.with_signature(src) for z, f in changes[alpha].inverse.images.items()}
        images = {}
        for z in t.target_signature.names:
            new_b = changes[beta].images[z].with_signature(t.target_signature)
            old_a = t.pullback(new_b)
            images[z] = old_a.substitute(back, src)
        new_transitions.append(TransitionMap(alpha, beta, src, t.target_signature, images))
    out = a.with_transitions(new_transitions)
    euler_ok = {}
    for alpha, sig in a.charts.items():
        moved = pushforward(fields[alpha].with_signature(sig), changes[alpha].inverse)
        euler_ok[alpha] = moved == euler_field(sig)
    if not is_split_presentation(out):
        raise LiftError("rewritten atlas is not split")
    return SplitResult(out, changes, checks, euler_ok)


def koszul_split(a: Atlas, conn: Mapping[int, ChristoffelData]) -> tuple[KoszulResult, SplitResult]:
    k = koszul_iterate(a, conn)
    return k, splitting_map(a, k.fields)
