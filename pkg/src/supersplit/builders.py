"""Fixture constructors: P^1 families, affine charts and cotangent supermanifolds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .atlas import Atlas, TransitionMap, jacobian_matrix, require_valid
from .cech import BundleModel, BundleValue, Cochain0, Cochain1, FieldModel, cocycle_check, coboundary
from .coeffring import Scalar
from .connection import ChristoffelData, transport_connection
from .grassmann import ChartSignature, ParityError, SuperElement
from .koszul import LiftReport, staged_lift
from .obstruction import exp_derivation
from .svector import VectorField, derham_field, euler_field, pushforward, super_bracket


def chart(even: Sequence[str], odd: Sequence[str], invertible: Sequence[str] = ()) -> ChartSignature:
    return ChartSignature(tuple(even), tuple(odd), frozenset(invertible))


def odd_names(prefix: str, q: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(q))


# -- P^1 families ---------------------------------------------------------------

def p1_family(weights: Sequence[int], deformation: Mapping[tuple[int, ...], tuple[Scalar, int]] | SuperElement | None = None,
              name: str = "") -> Atlas:
    """Two charts (x | t) and (y | e) with y = 1/x + corrections, e_i = t_i / x^(k_i).

    ``deformation`` maps an odd index subset to (coefficient, power of x),
    or is an even element of the overlap ring lying in J^2.
    """
    q = len(weights)
    s0 = chart(("x",), odd_names("t", q))
    s1 = chart(("y",), odd_names("e", q))
    ov = s0.with_invertible(["x"])
    x = SuperElement.coordinate(ov, "x")
    xinv = x.invert()
    if isinstance(deformation, SuperElement):
        extra = deformation.with_signature(ov)
    else:
        extra = SuperElement.zero(ov)
        for odd, (coeff, power) in (deformation or {}).items():
            extra = extra + SuperElement(ov, {(tuple(odd), (power,)): coeff})
    if not extra.is_even():
        raise ParityError("deformation terms must be even")
    if not extra.in_power(2):
        raise ValueError("deformation terms must lie in J^2")
    images = {"y": xinv + extra}
    for i, k in enumerate(weights):
        images[s1.odd_names[i]] = SuperElement.coordinate(ov, s0.odd_names[i]) * xinv ** k
    t = TransitionMap.build(0, 1, s0, s1, images, ["x"])
    return Atlas({0: s0, 1: s1}, [t], name=name)


def fix_s2() -> Atlas:
    return p1_family((2, 2), name="FIX-S2")


def fix_ns2() -> Atlas:
    return p1_family((2, 2), {(0, 1): (1, -3)}, name="FIX-NS2")


def p1_weights11_deformed() -> Atlas:
    return p1_family((1, 1), {(0, 1): (1, -1)}, name="P1-11-deformed")


def reduced_p1() -> Atlas:
    return projective_reduced(1)


def line_bundle(n: int, reduced: Atlas | None = None, kind: str = "section") -> BundleModel:
    """O(n) on the two-chart P^1: s_0(x) = x^n s_1(1/x), so the frame matrix is x^-n."""
    from .atiyah import line_bundle_matrices

    reduced = reduced or reduced_p1()
    return BundleModel(reduced, line_bundle_matrices(reduced, -n), kind)


# -- affine fixtures ----------------------------------------------------------------

def affine_chart(q: int = 2) -> Atlas:
    """A single chart C^{1|q}."""
    return Atlas({0: chart(("x",), odd_names("t", q))}, name=f"C1|{q}")


def fix_aff2(twist: Fraction | int = 0) -> Atlas:
    """Two copies of C^{1|2} glued by y = x + twist * x t1 t2, e = t."""
    s0 = chart(("x",), ("t1", "t2"))
    s1 = chart(("y",), ("e1", "e2"))
    x = SuperElement.coordinate(s0, "x")
    t1 = SuperElement.coordinate(s0, "t1")
    t2 = SuperElement.coordinate(s0, "t2")
    images = {"y": x + (x * t1 * t2).scale(twist), "e1": t1, "e2": t2}
    name = "FIX-AFF2" if not twist else "FIX-AFF2-twisted"
    return Atlas({0: s0, 1: s1}, [TransitionMap.build(0, 1, s0, s1, images)], name=name)


def fix_aff2_twisted() -> Atlas:
    return fix_aff2(1)


def shear_automorphism(sig: ChartSignature, coeff: SuperElement | None = None) -> TransitionMap:
    """x -> x + c * t1 t2 on a chart with one even and at least two odd coordinates."""
    x = SuperElement.coordinate(sig, sig.even_names[0])
    t1 = SuperElement.coordinate(sig, sig.odd_names[0])
    t2 = SuperElement.coordinate(sig, sig.odd_names[1])
    c = coeff if coeff is not None else SuperElement.one(sig)
    images = {z: SuperElement.coordinate(sig, z) for z in sig.names}
    images[sig.even_names[0]] = x + c * t1 * t2
    return TransitionMap(0, 0, sig, sig, images)


def twisted_connection(sig: ChartSignature, coeff: SuperElement | None = None) -> ChristoffelData:
    """The flat connection of the sheared coordinates, written in the original ones."""
    return transport_connection(ChristoffelData.flat(sig), shear_automorphism(sig, coeff))


def flat_connections(a: Atlas) -> dict[int, ChristoffelData]:
    return {alpha: ChristoffelData.flat(sig) for alpha, sig in a.charts.items()}


# -- projective spaces and cotangent supermanifolds -----------------------------

_REDUCED_NAMES = {1: (("x",), ("y",)), 2: (("x1", "x2"), ("u1", "u2"), ("v1", "v2"))}
_ODD_PREFIX = ("t", "e", "s")


def projective_reduced(n: int) -> Atlas:
    """The standard affine charts of P^n for n = 1, 2 (no odd coordinates)."""
    if n not in _REDUCED_NAMES:
        raise ValueError("only P^1 and P^2 are provided")
    names = _REDUCED_NAMES[n]
    charts = {i: chart(names[i], ()) for i in range(n + 1)}
    transitions = []
    for a in range(n + 1):
        for b in range(a + 1, n + 1):
            transitions.append(_projective_transition(n, a, b, charts))
    return Atlas(charts, transitions, name=f"P{n}")


def _projective_transition(n: int, a: int, b: int, charts: Mapping[int, ChartSignature]) -> TransitionMap:
    # chart i has coordinates X_j / X_i for j != i, in increasing j
    src = charts[a]
    others_a = [j for j in range(n + 1) if j != a]
    others_b = [j for j in range(n + 1) if j != b]
    piv = src.even_names[others_a.index(b)]
    ov = src.with_invertible([piv])
    hom = {a: SuperElement.one(ov)}
    for j, name in zip(others_a, src.even_names):
        hom[j] = SuperElement.coordinate(ov, name)
    pinv = hom[b].invert()
    images = {name: hom[j] * pinv for j, name in zip(others_b, charts[b].even_names)}
    return TransitionMap.build(a, b, src, charts[b], images, [piv])


def cotangent_split(reduced: Atlas) -> Atlas:
    """Odd coordinates transform like the differentials of the even ones."""
    charts = {}
    for alpha, sig in reduced.charts.items():
        charts[alpha] = chart(sig.even_names, odd_names(_ODD_PREFIX[alpha % 3] if alpha < 3 else f"o{alpha}_", sig.p))
    transitions = []
    for (alpha, beta), t in reduced.transitions.items():
        src = charts[alpha].with_invertible(t.source_signature.invertible)
        jac = jacobian_matrix(t)
        images = {}
        for y in charts[beta].even_names:
            images[y] = SuperElement.from_poly(src, t.images[y].body().with_ring(src.ring))
        for nu, e in enumerate(charts[beta].odd_names):
            acc = SuperElement.zero(src)
            for mu, th in enumerate(src.odd_names):
                acc = acc + SuperElement.from_poly(src, jac[nu][mu].with_ring(src.ring)) * SuperElement.coordinate(src, th)
            images[e] = acc
        transitions.append(TransitionMap.build(alpha, beta, charts[alpha], charts[beta], images,
                                               t.source_signature.invertible))
    return Atlas(charts, transitions, name=f"PiT*{reduced.name}" if reduced.name else "")


def form_model(reduced: Atlas) -> BundleModel:
    return BundleModel(reduced, None, "form", rank=reduced.p)


def omega_cocycle(reduced: Atlas, entries: Mapping[tuple[int, int], Mapping[str, SuperElement]]) -> Cochain1:
    """A 1-form cochain from {pair: {even name: coefficient of d(name)}}."""
    model = form_model(reduced)
    out = {}
    for key, comps in entries.items():
        sig = reduced.transition(*key).source_signature
        out[key] = BundleValue(sig, {(sig.even_names.index(x),): f.with_signature(sig) for x, f in comps.items()})
    return Cochain1(model, out)


def log_ratio_generator(reduced: Atlas) -> Cochain1:
    """omega_ab = d log(X_b / X_a), expressed in chart a."""
    entries = {}
    for a, b in reduced.pairs():
        t = reduced.transition(a, b)
        sig = t.source_signature
        others = [j for j in range(len(reduced.charts)) if j != a]
        name = sig.even_names[others.index(b)]
        x = SuperElement.coordinate(sig, name)
        entries[(a, b)] = {name: x.invert()}
    return omega_cocycle(reduced, entries)


def omega_coboundary(reduced: Atlas, forms: Mapping[int, Mapping[str, SuperElement]]) -> Cochain1:
    model = form_model(reduced)
    vals = {}
    for alpha, comps in forms.items():
        sig = reduced.charts[alpha]
        vals[alpha] = BundleValue(sig, {(sig.even_names.index(x),): f.with_signature(sig) for x, f in comps.items()})
    return coboundary(Cochain0(model, vals))


def derham_shear(sig: ChartSignature, coeffs: Sequence[SuperElement]) -> VectorField:
    """Omega * d^X with Omega = sum_mu w_mu t_mu."""
    omega = SuperElement.zero(sig)
    for w, th in zip(coeffs, sig.odd_names):
        omega = omega + w.with_signature(sig) * SuperElement.coordinate(sig, th)
    return omega * derham_field(sig)


def cotangent_build(reduced: Atlas, omega: Cochain1 | None = None, name: str = "") -> Atlas:
    """The split cotangent transitions followed by exp(omega_ab d^X)."""
    require_valid(reduced)
    if omega is not None and not cocycle_check(omega):
        raise ValueError("omega is not a cocycle")
    split = cotangent_split(reduced)
    if omega is None or omega.is_zero():
        return Atlas(split.charts, split.transitions.values(), name=name or split.name)
    transitions = []
    for key, t in split.transitions.items():
        sig = t.source_signature
        form = omega[key]
        coeffs = [SuperElement(sig, dict(form[(mu,)].items())) for mu in range(sig.p)]
        shear = exp_derivation(derham_shear(sig, coeffs))
        images = {z: f.substitute(shear.images, sig) for z, f in t.images.items()}
        transitions.append(TransitionMap(t.source, t.target, sig, t.target_signature, images))
    return Atlas(split.charts, transitions, name=name)


def fix_cot(generator: bool = True) -> Atlas:
    red = projective_reduced(2)
    if not generator:
        return cotangent_build(red, None, name="FIX-COT(0)")
    return cotangent_build(red, log_ratio_generator(red), name="FIX-COT(omega)")


def omega_shear_cochain(a: Atlas, omega: Cochain1) -> Cochain1:
    """The cochain {Omega_ab d^X} in the degree-2 d/dx block of the split model."""
    from .obstruction import obstruction_model

    model = obstruction_model(a)
    entries = {}
    for key in a.pairs():
        sig = a.transition(*key).source_signature
        form = omega[key]
        coeffs = [SuperElement(sig, dict(form[(mu,)].items())) for mu in range(sig.p)]
        entries[key] = derham_shear(sig, coeffs)
    return Cochain1(model, entries)


# -- lifting checks ---------------------------------------------------------------

@dataclass
class DeRhamReport:
    cocycle: Cochain1
    self_bracket_zero: bool

    @property
    def passed(self) -> bool:
        return self.cocycle.is_zero() and self.self_bracket_zero

    def render(self) -> str:
        lines = ["de Rham lift cocycle:"]
        lines += ["  " + s for s in self.cocycle.render().splitlines()]
        lines.append("[d, d] = 0: " + ("yes" if self.self_bracket_zero else "no"))
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def is_cotangent_type(a: Atlas) -> bool:
    return a.p == a.q


def de_rham_lift_check(a: Atlas) -> DeRhamReport:
    if not is_cotangent_type(a):
        raise ValueError("the de Rham field needs a cotangent-type atlas")
    model = FieldModel(a)
    fam = {alpha: derham_field(sig) for alpha, sig in a.charts.items()}
    c = coboundary(Cochain0(model, fam))
    zero = all(not super_bracket(v, v) for v in fam.values())
    return DeRhamReport(c, zero)


@dataclass
class GammaProbe:
    bracket_residuals: dict[int, VectorField]
    initial_cocycle: Cochain1
    lift: LiftReport | None

    @property
    def hypothesis_bracket(self) -> bool:
        return all(not r for r in self.bracket_residuals.values())

    @property
    def hypothesis_lift(self) -> bool | None:
        if self.lift is None:
            return False
        return {"SPLIT": True, "NONSPLIT": False}.get(self.lift.verdict)

    def render(self) -> str:
        lines = []
        for alpha, r in self.bracket_residuals.items():
            lines.append(f"chart {alpha}: [gamma, d] - euler = {r}")
        lines.append("bracket hypothesis: " + ("holds" if self.hypothesis_bracket else "fails"))
        if self.lift is None:
            lines.append("lift hypothesis: fails (initial form is not global)")
            lines += ["  " + s for s in self.initial_cocycle.render().splitlines()]
        else:
            lines.append(f"lift hypothesis: {self.lift.verdict}")
        return "\n".join(lines)


def radial_odd_field(sig: ChartSignature) -> VectorField:
    """sum_mu x_mu d/dt_mu."""
    return VectorField(sig, {t: SuperElement.coordinate(sig, x) for x, t in zip(sig.even_names, sig.odd_names)})


def gamma_probe(a: Atlas, family: Mapping[int, VectorField] | None = None, window=None) -> GammaProbe:
    """Test an odd degree -1 family against the bracket and lifting hypotheses."""
    fam = dict(family) if family is not None else {alpha: radial_odd_field(sig) for alpha, sig in a.charts.items()}
    residuals = {}
    for alpha, g in fam.items():
        sig = a.charts[alpha]
        residuals[alpha] = super_bracket(g, derham_field(sig)) - euler_field(sig)
    c = coboundary(Cochain0(FieldModel(a), fam))
    initial = c.map_entries(lambda v: v.graded_part(-1))
    lift = staged_lift(a, fam, 1, window) if initial.is_zero() else None
    return GammaProbe(residuals, initial, lift)


def pushforward_preserves_bracket(a: Atlas, u: Mapping[int, VectorField], v: Mapping[int, VectorField]) -> bool:
    for alpha, beta in a.pairs():
        t = a.transition(alpha, beta)
        lhs = pushforward(super_bracket(u[beta], v[beta]), t)
        rhs = super_bracket(pushforward(u[beta], t), pushforward(v[beta], t))
        if lhs != rhs:
            return False
    return True


def c13() -> Atlas:
    return affine_chart(3)


ALL_FIXTURES = {
    "fix_s2": fix_s2,
    "fix_ns2": fix_ns2,
    "p1_11_deformed": p1_weights11_deformed,
    "fix_aff2": fix_aff2,
    "fix_aff2_twisted": fix_aff2_twisted,
    "c12": lambda: affine_chart(2),
    "c13": c13,
    "p1": reduced_p1,
    "p2": lambda: projective_reduced(2),
    "fix_cot0": lambda: fix_cot(False),
    "fix_cot": fix_cot,
}


def golden_documents() -> dict[str, str]:
    """File name -> SMA text for every fixture, plus connection and 1-form files."""
    from .sma import render_atlas, render_document

    docs = {f"{name}.sma": render_atlas(build()) for name, build in ALL_FIXTURES.items()}
    red = projective_reduced(2)
    docs["p2_omega.sma"] = render_document(red, cocycle=log_ratio_generator(red), include_atlas=False)
    c12 = affine_chart(2)
    docs["c12_twisted_connection.sma"] = render_document(c12, {0: twisted_connection(c12.charts[0])},
                                                         include_atlas=False)
    c13 = affine_chart(3)
    docs["c13_twisted_connection.sma"] = render_document(c13, {0: twisted_connection(c13.charts[0])},
                                                         include_atlas=False)
    tw = fix_aff2_twisted()
    g1 = ChristoffelData.flat(tw.charts[1])
    docs["fix_aff2_twisted_connection.sma"] = render_document(
        tw, {0: transport_connection(g1, tw.transition(0, 1)), 1: g1}, include_atlas=False)
    docs["fix_aff2_connection.sma"] = render_document(fix_aff2(), flat_connections(fix_aff2()), include_atlas=False)
    return docs

