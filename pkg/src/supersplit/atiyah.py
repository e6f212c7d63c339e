"""Atiyah cocycles of bundles and the affine Atiyah cocycle of an atlas.

The bundle cocycle on a pair is ``g^-1 dg`` where ``g`` maps frame
components on the lower chart to those on the higher one.  The affine
cocycle is the flat connection of the higher chart written in the lower
chart's coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .atlas import Atlas, jacobian_matrix, reduced_data, require_valid, split_model_of
from .cech import (BundleModel, BundleValue, ClassComparison, Cochain1, TensorModel, compare_classes,
                   find_proportionality, solve_coboundary)
from .connection import ChristoffelData, SymmetricTensor, check_global, inhomogeneous_term
from .grassmann import ChartSignature, SuperElement
from .linalg import PolyMatrix, poly_inverse, poly_transpose
from .obstruction import obstruction_model, primary_obstruction
from .svector import VectorField

OBSTRUCTION_CONSTANT = Fraction(-1)


def bundle_atiyah(reduced: Atlas, matrices: Mapping[tuple[int, int], PolyMatrix]) -> Cochain1:
    model = BundleModel(reduced, matrices, "endo_form")
    entries = {}
    for key in reduced.pairs():
        sig = reduced.transition(*key).source_signature
        g = matrices[key]
        ginv = poly_inverse(g, sig.ring)
        r = len(g)
        comps = {}
        for mu, x in enumerate(sig.even_names):
            dg = [[e.derivative(x) for e in row] for row in g]
            for i in range(r):
                for j in range(r):
                    acc = sig.ring.zero()
                    for k in range(r):
                        acc = acc + ginv[i][k] * dg[k][j]
                    if acc:
                        comps[(mu, i, j)] = SuperElement.from_poly(sig, acc)
        entries[key] = BundleValue(sig, comps)
    return Cochain1(model, entries)


def tangent_matrices(reduced: Atlas) -> dict[tuple[int, int], PolyMatrix]:
    return {key: jacobian_matrix(reduced.transitions[key]) for key in reduced.pairs()}


def dual_matrices(matrices: Mapping[tuple[int, int], PolyMatrix], reduced: Atlas) -> dict[tuple[int, int], PolyMatrix]:
    return {key: poly_transpose(poly_inverse(g, reduced.transition(*key).source_signature.ring))
            for key, g in matrices.items()}


def dualize_endo(c: Cochain1, model: BundleModel) -> Cochain1:
    """A -> -A^T, the isomorphism End(E*) -> End(E)."""
    entries = {}
    for key, v in c.entries.items():
        entries[key] = BundleValue(v.signature, {(mu, j, i): -g for (mu, i, j), g in v.components.items()})
    return Cochain1(model, entries)


def affine_atiyah(a: Atlas) -> Cochain1:
    """Full affine cocycle valued in graded-symmetric tensors."""
    model = TensorModel(a)
    entries = {}
    for key in a.pairs():
        gamma = inhomogeneous_term(a.transition(*key))
        entries[key] = SymmetricTensor(gamma.signature, gamma.components)
    return Cochain1(model, entries)


def _reduce_element(f: SuperElement, sig: ChartSignature) -> SuperElement:
    return SuperElement(sig, {((), e): c for (odd, e), c in f.items() if not odd})


@dataclass
class AtiyahBlocks:
    evev: Cochain1
    mixed: Cochain1
    obstruction: Cochain1
    reduced: Atlas
    odd_matrices: dict

    def render(self) -> str:
        lines = []
        for title, c in (("evev", self.evev), ("mixed", self.mixed), ("obstruction", self.obstruction)):
            lines.append(f"{title} block:")
            lines += ["  " + s for s in c.render().splitlines()]
        return "\n".join(lines)


def affine_atiyah_restricted(a: Atlas) -> AtiyahBlocks:
    require_valid(a)
    reduced, odd_mats = reduced_data(a)
    split = split_model_of(a)
    full = affine_atiyah(a)
    evev_model = BundleModel(reduced, tangent_matrices(reduced), "endo_form")
    mixed_model = BundleModel(reduced, odd_mats, "endo_form", rank=a.q)
    obs_model = obstruction_model(a)
    evev, mixed, obs = {}, {}, {}
    for key, gamma in full.entries.items():
        sig = gamma.signature
        rsig = reduced.transition(*key).source_signature
        ssig = split.transition(*key).source_signature
        ev, mx = {}, {}
        obs_comps = {x: SuperElement.zero(ssig) for x in sig.even_names}
        for (a_, b_, c_), g in gamma.components.items():
            body = _reduce_element(g, rsig)
            if not body:
                continue
            oa, ob, oc = sig.is_odd(a_), sig.is_odd(b_), sig.is_odd(c_)
            if not oa and not ob and not oc:
                mu, nu, lam = (sig.even_names.index(n) for n in (a_, b_, c_))
                ev[(mu, lam, nu)] = body
            elif not oa and ob and oc:
                mu = sig.even_names.index(a_)
                i, j = sig.odd_names.index(b_), sig.odd_names.index(c_)
                mx[(mu, j, i)] = body
            elif oa and ob and not oc:
                i, j = sig.odd_names.index(a_), sig.odd_names.index(b_)
                if i < j:
                    theta = SuperElement(ssig, {((i, j), (0,) * sig.p): 1})
                    obs_comps[c_] = obs_comps[c_] + SuperElement(ssig, dict(body.items())) * theta
        evev[key] = BundleValue(rsig, ev)
        mixed[key] = BundleValue(rsig, mx)
        obs[key] = VectorField(ssig, obs_comps)
    return AtiyahBlocks(Cochain1(evev_model, evev), Cochain1(mixed_model, mixed), Cochain1(obs_model, obs),
                        reduced, odd_mats)


@dataclass
class DWReport:
    blocks: AtiyahBlocks
    comparisons: dict[str, ClassComparison]
    obstruction_zero: bool
    constant: Fraction | None
    lines: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool | None:
        vals = [c.equal for c in self.comparisons.values()]
        if any(v is False for v in vals):
            return False
        if any(v is None for v in vals):
            return None
        return True

    def render(self) -> str:
        out = [self.blocks.render()]
        for name, c in self.comparisons.items():
            out.append(f"{name}: {c.verdict} ({c.route})")
        out.append("obstruction block: " + ("ZERO" if self.obstruction_zero else "NONZERO"))
        if self.constant is not None:
            out.append(f"obstruction constant: {self.constant}")
        out.append("decomposition: " + {True: "PASS", False: "FAIL", None: "UNDECIDED"}[self.passed])
        return "\n".join(out)


def dw_verify(a: Atlas, window=None) -> DWReport:
    blocks = affine_atiyah_restricted(a)
    reduced = blocks.reduced
    at_tangent = bundle_atiyah(reduced, tangent_matrices(reduced))
    odd_dual = dual_matrices(blocks.odd_matrices, reduced)
    at_odd_dual = bundle_atiyah(reduced, odd_dual)
    at_odd = dualize_endo(at_odd_dual, blocks.mixed.model)
    eta = primary_obstruction(a)
    comparisons = {
        "at T_X": compare_classes(blocks.evev, at_tangent.with_model(blocks.evev.model), window),
        "at odd bundle": compare_classes(blocks.mixed, at_odd, window),
        "obstruction": compare_classes(blocks.obstruction, eta.scale(OBSTRUCTION_CONSTANT), window),
    }
    zero = blocks.obstruction.is_zero() or bool(solve_coboundary(blocks.obstruction, window).solved)
    constant = None
    if not zero:
        prop = find_proportionality(blocks.obstruction, eta, window)
        constant = prop.constants[0] if prop.solved else None
    return DWReport(blocks, comparisons, zero, constant)


def initial_form_defects(a: Atlas) -> list[tuple]:
    """Entries where a and its split model differ in filtration degree 0 or below.

    A tensor term t_I dz_A dz_B d/dz_C has degree |I| + deg A + deg B - deg C.
    """
    full = affine_atiyah(a).entries
    split = affine_atiyah(split_model_of(a)).entries
    bad = []
    for key in full:
        diff = full[key] - split[key].with_signature(full[key].signature)
        sig = diff.signature
        for (x, y, z), g in diff.components.items():
            shift = int(sig.is_odd(x)) + int(sig.is_odd(y)) - int(sig.is_odd(z))
            for (odd, _), _ in g.items():
                if len(odd) + shift <= 0:
                    bad.append((key, (x, y, z)))
                    break
    return bad


def connection_from_trivial_class(a: Atlas, window=None) -> dict[int, ChristoffelData] | None:
    """A global connection built from a solution of delta s = affine cocycle, or None."""
    cocycle = affine_atiyah(a)
    res = solve_coboundary(cocycle, window)
    if not res.solved:
        return None
    out = {}
    for alpha, s in res.cochain.entries.items():
        out[alpha] = ChristoffelData(s.signature, {k: -v for k, v in s.components.items()})
    return out


def atiyah_verdict(c: Cochain1, window=None) -> str:
    res = solve_coboundary(c, window)
    if res.solved:
        return "TRIVIAL"
    return "NONTRIVIAL" if res.definitive else "UNDECIDED"


def line_bundle_matrices(reduced: Atlas, exponent: int) -> dict[tuple[int, int], PolyMatrix]:
    """The two-chart line bundle whose transition on the overlap is x^exponent."""
    out = {}
    for key in reduced.pairs():
        ring = reduced.transition(*key).source_signature.ring
        out[key] = [[ring.monomial((exponent,) + (0,) * (ring.nvars - 1))]]
    return out


def check_constructed_connection(a: Atlas, window=None) -> tuple[dict[int, ChristoffelData] | None, bool]:
    conn = connection_from_trivial_class(a, window)
    if conn is None:
        return None, False
    return conn, check_global(conn, a).passed

