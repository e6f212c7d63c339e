"""Cech 0- and 1-cochains, the coboundary, and an exact coboundary solver.

Values live in a sheaf described by a ``SheafModel``: vector fields,
(2,1)-tensors, or sections of a bundle on the reduced space.  Every model
has a finite list of slots per chart; a value is a combination of basis
elements ``x^e * b_slot``.

Solving ``delta s = c`` uses a grading.  When every transition is
homogeneous for weights assigned to the coordinates, the coboundary
preserves weight and a homogeneous 0-cochain has at most one exponent per
slot.  Each weight is then a finite exact linear system and the answer is
definitive.  Without enough grading the solver enumerates exponents inside
a window and a failure is only reported as undecided.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .atlas import Atlas, AtlasError, jacobian_matrix
from .coeffring import ContextError, Exponent
from .connection import SymmetricTensor, transport_tensor
from .grassmann import ChartSignature, SuperElement
from .linalg import PolyMatrix, SparseSystem, nullspace, poly_inverse, row_reduce
from .svector import VectorField, pushforward

DEFAULT_WINDOW = (-12, 12)
Weight = tuple[Fraction, ...]


def degree_window(env: Mapping[str, str] | None = None) -> tuple[int, int]:
    """The exponent window, overridable by ``SUPERSPLIT_WINDOW`` ("LO,HI" or "N")."""
    env = os.environ if env is None else env
    raw = env.get("SUPERSPLIT_WINDOW", "").strip()
    if not raw:
        return DEFAULT_WINDOW
    try:
        if "," in raw:
            lo, hi = (int(v) for v in raw.split(","))
        else:
            hi = int(raw)
            lo = -hi
    except ValueError:
        raise ValueError(f"bad SUPERSPLIT_WINDOW {raw!r}; expected 'LO,HI' or 'N'") from None
    if lo > hi:
        raise ValueError(f"empty SUPERSPLIT_WINDOW {raw!r}")
    return lo, hi


def _subsets(q: int) -> list[tuple[int, ...]]:
    return [s for k in range(q + 1) for s in combinations(range(q), k)]


# -- bundle values ----------------------------------------------------------------

class BundleValue:
    """Components of a section, a 1-form or an endomorphism-valued 1-form."""

    __slots__ = ("signature", "components")

    def __init__(self, signature: ChartSignature, components: Mapping[tuple, SuperElement] | None = None):
        self.signature = signature
        self.components = {}
        for k, v in (components or {}).items():
            v = v.with_signature(signature)
            if v:
                self.components[tuple(k)] = v

    def __getitem__(self, key) -> SuperElement:
        return self.components.get(tuple(key), SuperElement.zero(self.signature))

    def with_signature(self, sig: ChartSignature) -> BundleValue:
        return BundleValue(sig, self.components)

    def _combine(self, other: BundleValue, sign: int) -> BundleValue:
        keys = set(self.components) | set(other.components)
        return BundleValue(self.signature, {k: self[k] + other[k].with_signature(self.signature).scale(sign) for k in keys})

    def __add__(self, other: BundleValue) -> BundleValue:
        return self._combine(other, 1)

    def __sub__(self, other: BundleValue) -> BundleValue:
        return self._combine(other, -1)

    def __neg__(self) -> BundleValue:
        return self.scale(-1)

    def scale(self, c) -> BundleValue:
        return BundleValue(self.signature, {k: v.scale(c) for k, v in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        if isinstance(other, BundleValue):
            return self.signature.names == other.signature.names and self.components == other.components
        return NotImplemented

    def __str__(self) -> str:
        if not self.components:
            return "0"
        return ", ".join(f"{list(k)}: {v}" for k, v in sorted(self.components.items()))

    def __repr__(self) -> str:
        return f"BundleValue({self})"


# -- sheaf models -----------------------------------------------------------------

class SheafModel:
    """Interface shared by the concrete sheaves below."""

    atlas: Atlas

    def slots(self, alpha: int) -> list[Hashable]:
        raise NotImplementedError

    def zero(self, sig: ChartSignature) -> Any:
        raise NotImplementedError

    def element(self, sig: ChartSignature, slot: Hashable, exps: Exponent, coeff: Fraction = Fraction(1)) -> Any:
        raise NotImplementedError

    def decompose(self, value: Any) -> dict[tuple[Hashable, Exponent], Fraction]:
        raise NotImplementedError

    def transport(self, alpha: int, beta: int, value: Any, sig: ChartSignature | None = None) -> Any:
        raise NotImplementedError

    def weight_constraints(self) -> list[dict[Hashable, Fraction]]:
        return coordinate_constraints(self.atlas)

    def slot_offset(self, alpha: int, slot: Hashable, grading: Grading) -> Weight:
        raise NotImplementedError

    def is_zero(self, value: Any) -> bool:
        return value.is_zero()

    def render(self, value: Any) -> str:
        return str(value)

    def chart_signature(self, alpha: int) -> ChartSignature:
        return self.atlas.charts[alpha]

    def pair_signature(self, alpha: int, beta: int) -> ChartSignature:
        return self.atlas.transition(alpha, beta).source_signature


def coordinate_constraints(a: Atlas) -> list[dict[Hashable, Fraction]]:
    """Linear relations making every transition image homogeneous."""
    rows = []
    for (alpha, beta), t in a.transitions.items():
        src = t.source_signature
        for z, img in t.images.items():
            for (odd, exps), _ in img.items():
                row: dict[Hashable, Fraction] = {}
                for x, e in zip(src.even_names, exps):
                    if e:
                        key = ("coord", alpha, x)
                        row[key] = row.get(key, 0) + e
                for i in odd:
                    key = ("coord", alpha, src.odd_names[i])
                    row[key] = row.get(key, 0) + 1
                key = ("coord", beta, z)
                row[key] = row.get(key, 0) - 1
                rows.append({k: Fraction(v) for k, v in row.items() if v})
    return rows


class Grading:
    """A basis of weight assignments compatible with every transition."""

    def __init__(self, model: SheafModel):
        a = model.atlas
        unknowns: list[Hashable] = [("coord", alpha, z) for alpha, sig in a.charts.items() for z in sig.names]
        constraints = model.weight_constraints()
        for row in constraints:
            for k in row:
                if k not in unknowns:
                    unknowns.append(k)
        self.unknowns = unknowns
        index = {k: i for i, k in enumerate(unknowns)}
        matrix = [[row.get(k, Fraction(0)) for k in unknowns] for row in constraints]
        basis = nullspace(matrix, len(unknowns)) if matrix else nullspace([], len(unknowns))
        self.rank = len(basis)
        self._weights = {k: tuple(vec[i] for vec in basis) for k, i in index.items()}
        self._solve_cache: dict[tuple[int, Weight], Exponent | None | str] = {}
        self.charts = {alpha: sig for alpha, sig in a.charts.items()}

    def weight(self, key: Hashable) -> Weight:
        return self._weights.get(key, (Fraction(0),) * self.rank)

    def coord(self, alpha: int, name: str) -> Weight:
        return self.weight(("coord", alpha, name))

    def zero(self) -> Weight:
        return (Fraction(0),) * self.rank

    def add(self, *ws: Weight) -> Weight:
        return tuple(sum(parts, Fraction(0)) for parts in zip(*ws)) if ws else self.zero()

    def neg(self, w: Weight) -> Weight:
        return tuple(-v for v in w)

    def monomial(self, alpha: int, exps: Exponent, odd: Iterable[int] = ()) -> Weight:
        sig = self.charts[alpha]
        parts = [tuple(e * v for v in self.coord(alpha, x)) for x, e in zip(sig.even_names, exps) if e]
        parts += [self.coord(alpha, sig.odd_names[i]) for i in odd]
        return self.add(*parts) if parts else self.zero()

    def even_rank(self, alpha: int) -> int:
        sig = self.charts[alpha]
        rows = [list(self.coord(alpha, x)) for x in sig.even_names]
        return len(row_reduce(rows)[1]) if rows and self.rank else 0

    def definite(self, alpha: int) -> bool:
        return self.even_rank(alpha) == self.charts[alpha].p

    def exponent_for(self, alpha: int, target: Weight) -> Exponent | None:
        """The unique exponent vector e with weight(x^e) = target, if integral."""
        key = (alpha, target)
        if key in self._solve_cache:
            return self._solve_cache[key]
        sig = self.charts[alpha]
        p = sig.p
        # columns are weight components: sum_mu e_mu w(x_mu)_k = target_k
        rows = [[self.coord(alpha, x)[k] for x in sig.even_names] + [target[k]] for k in range(self.rank)]
        result: Exponent | None
        if p == 0:
            result = () if all(v == 0 for v in target) else None
        else:
            red, pivots = row_reduce(rows) if rows else ([], [])
            if p in pivots or len([c for c in pivots if c < p]) < p:
                result = None
            else:
                vals = [Fraction(0)] * p
                for row, pc in zip(red, pivots):
                    vals[pc] = row[p]
                result = tuple(int(v) for v in vals) if all(v.denominator == 1 for v in vals) else None
        self._solve_cache[key] = result
        return result

    def exponents_in_window(self, alpha: int, target: Weight, window: tuple[int, int]) -> list[Exponent]:
        sig = self.charts[alpha]
        out = []
        for exps in product(range(window[0], window[1] + 1), repeat=sig.p):
            if self.monomial(alpha, exps) == target:
                out.append(exps)
        return out


class FieldModel(SheafModel):
    """Vector fields, optionally of a single filtration degree.

    With ``even_only`` the d/dt components are dropped, which is the
    quotient of the degree-m graded piece onto its d/dx block.
    """

    def __init__(self, atlas: Atlas, degree: int | None = None, even_only: bool = False):
        self.atlas = atlas
        self.degree = degree
        self.even_only = even_only
        self._slots: dict[int, list[tuple[str, tuple[int, ...]]]] = {}

    def slots(self, alpha: int) -> list[tuple[str, tuple[int, ...]]]:
        if alpha not in self._slots:
            sig = self.atlas.charts[alpha]
            out = []
            for z in sig.names:
                odd = sig.is_odd(z)
                if odd and self.even_only:
                    continue
                for s in _subsets(sig.q):
                    if self.degree is None or len(s) - int(odd) == self.degree:
                        out.append((z, s))
            self._slots[alpha] = out
        return self._slots[alpha]

    def zero(self, sig: ChartSignature) -> VectorField:
        return VectorField.zero(sig)

    def element(self, sig, slot, exps, coeff=Fraction(1)) -> VectorField:
        z, odd = slot
        return VectorField(sig, {z: SuperElement(sig, {(odd, tuple(exps)): coeff})})

    def decompose(self, value: VectorField) -> dict:
        out = {}
        for z, c in zip(value.signature.names, value.components):
            for (odd, exps), coeff in c.items():
                out[((z, odd), exps)] = coeff
        return out

    def _project(self, v: VectorField) -> VectorField:
        if self.degree is not None:
            v = v.graded_part(self.degree)
        if self.even_only:
            p = v.signature.p
            v = VectorField(v.signature, list(v.components[:p]) + [SuperElement.zero(v.signature)] * v.signature.q)
        return v

    def transport(self, alpha, beta, value, sig=None) -> VectorField:
        t = self.atlas.transition(alpha, beta)
        return self._project(pushforward(value, t, sig))

    def slot_offset(self, alpha, slot, grading) -> Weight:
        z, odd = slot
        return grading.add(grading.monomial(alpha, (0,) * self.atlas.p, odd), grading.neg(grading.coord(alpha, z)))


class TensorModel(SheafModel):
    """Graded-symmetric (2,1)-tensors, stored for lower indices A <= B."""

    def __init__(self, atlas: Atlas):
        self.atlas = atlas

    def slots(self, alpha: int) -> list[tuple[str, str, str, tuple[int, ...]]]:
        sig = self.atlas.charts[alpha]
        names = sig.names
        out = []
        for i, a in enumerate(names):
            for b in names[i:]:
                if a == b and sig.is_odd(a):
                    continue
                for c in names:
                    for s in _subsets(sig.q):
                        out.append((a, b, c, s))
        return out

    def zero(self, sig: ChartSignature) -> SymmetricTensor:
        return SymmetricTensor(sig)

    def element(self, sig, slot, exps, coeff=Fraction(1)) -> SymmetricTensor:
        a, b, c, odd = slot
        val = SuperElement(sig, {(odd, tuple(exps)): coeff})
        comps = {(a, b, c): val}
        if a != b:
            sign = -1 if sig.is_odd(a) and sig.is_odd(b) else 1
            comps[(b, a, c)] = val.scale(sign)
        return SymmetricTensor(sig, comps)

    def decompose(self, value: SymmetricTensor) -> dict:
        names = value.signature.names
        out = {}
        for (a, b, c), g in value.components.items():
            if names.index(a) > names.index(b):
                continue
            for (odd, exps), coeff in g.items():
                out[((a, b, c, odd), exps)] = coeff
        return out

    def transport(self, alpha, beta, value, sig=None) -> SymmetricTensor:
        return transport_tensor(value, self.atlas.transition(alpha, beta), sig)

    def slot_offset(self, alpha, slot, grading) -> Weight:
        a, b, c, odd = slot
        return grading.add(grading.monomial(alpha, (0,) * self.atlas.p, odd), grading.coord(alpha, c),
                           grading.neg(grading.coord(alpha, a)), grading.neg(grading.coord(alpha, b)))


class BundleModel(SheafModel):
    """Sections, 1-forms or End-valued 1-forms of a vector bundle on a purely even atlas.

    ``matrices[(a, b)]`` maps frame components on chart a to those on chart
    b, so sections transform as ``s_a = g^-1 * pullback(s_b)``.
    """

    KINDS = ("section", "form", "endo_form")

    def __init__(self, atlas: Atlas, matrices: Mapping[tuple[int, int], PolyMatrix] | None = None,
                 kind: str = "section", rank: int | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown bundle kind {kind!r}")
        if atlas.q:
            raise ContextError("bundle models live on a purely even atlas")
        self.atlas = atlas
        self.kind = kind
        self.matrices = dict(matrices or {})
        if rank is None:
            rank = len(next(iter(self.matrices.values()))) if self.matrices else 1
        self.rank = rank
        for key in atlas.pairs():
            if key not in self.matrices:
                if kind == "form":
                    ring = atlas.transition(*key).source_signature.ring
                    self.matrices[key] = [[ring.const(int(i == j)) for j in range(rank)] for i in range(rank)]
                else:
                    raise ContextError(f"missing bundle transition for {key}")
        self._inverse: dict[tuple[int, int], PolyMatrix] = {}

    def slots(self, alpha: int) -> list[tuple]:
        p, r = self.atlas.p, self.rank
        if self.kind == "section":
            return [(i,) for i in range(r)]
        if self.kind == "form":
            return [(mu,) for mu in range(p)]
        return [(mu, i, j) for mu in range(p) for i in range(r) for j in range(r)]

    def zero(self, sig: ChartSignature) -> BundleValue:
        return BundleValue(sig)

    def element(self, sig, slot, exps, coeff=Fraction(1)) -> BundleValue:
        return BundleValue(sig, {slot: SuperElement(sig, {((), tuple(exps)): coeff})})

    def decompose(self, value: BundleValue) -> dict:
        out = {}
        for slot, g in value.components.items():
            for (_, exps), coeff in g.items():
                out[(slot, exps)] = coeff
        return out

    def matrix(self, alpha: int, beta: int, sig: ChartSignature) -> list[list[SuperElement]]:
        g = self.matrices[(alpha, beta)]
        return [[SuperElement.from_poly(sig, e.with_ring(sig.ring)) for e in row] for row in g]

    def inverse_matrix(self, alpha: int, beta: int, sig: ChartSignature) -> list[list[SuperElement]]:
        if (alpha, beta) not in self._inverse:
            ring = self.atlas.transition(alpha, beta).source_signature.ring
            self._inverse[(alpha, beta)] = poly_inverse(self.matrices[(alpha, beta)], ring)
        g = self._inverse[(alpha, beta)]
        return [[SuperElement.from_poly(sig, e.with_ring(sig.ring)) for e in row] for row in g]

    def transport(self, alpha, beta, value, sig=None) -> BundleValue:
        if alpha > beta:
            raise AtlasError("bundle transport is defined from a higher chart to a lower one")
        t = self.atlas.transition(alpha, beta)
        sig = sig or t.source_signature
        pulled = {k: t.pullback(v.with_signature(v.signature.with_invertible(t.target_signature.invertible)), sig)
                  for k, v in value.components.items()}
        zero = SuperElement.zero(sig)
        r, p = self.rank, self.atlas.p
        out: dict[tuple, SuperElement] = {}
        if self.kind == "section":
            ginv = self.inverse_matrix(alpha, beta, sig)
            for i in range(r):
                acc = zero
                for j in range(r):
                    if (j,) in pulled:
                        acc = acc + ginv[i][j] * pulled[(j,)]
                out[(i,)] = acc
            return BundleValue(sig, out)
        jac = [[SuperElement.from_poly(sig, e.with_ring(sig.ring)) for e in row] for row in jacobian_matrix(t)]
        if self.kind == "form":
            for mu in range(p):
                acc = zero
                for nu in range(p):
                    if (nu,) in pulled:
                        acc = acc + jac[nu][mu] * pulled[(nu,)]
                out[(mu,)] = acc
            return BundleValue(sig, out)
        g = self.matrix(alpha, beta, sig)
        ginv = self.inverse_matrix(alpha, beta, sig)
        for nu in range(p):
            a = [[pulled.get((nu, i, j), zero) for j in range(r)] for i in range(r)]
            if all(not e for row in a for e in row):
                continue
            conj = _matmul(_matmul(ginv, a, zero), g, zero)
            for mu in range(p):
                if not jac[nu][mu]:
                    continue
                for i in range(r):
                    for j in range(r):
                        if conj[i][j]:
                            out[(mu, i, j)] = out.get((mu, i, j), zero) + jac[nu][mu] * conj[i][j]
        return BundleValue(sig, out)

    def weight_constraints(self) -> list[dict[Hashable, Fraction]]:
        rows = coordinate_constraints(self.atlas)
        if self.kind == "form":
            return rows
        for (alpha, beta), g in self.matrices.items():
            src = self.atlas.transition(alpha, beta).source_signature
            for i, row in enumerate(g):
                for j, entry in enumerate(row):
                    for exps, _ in entry.items():
                        cons: dict[Hashable, Fraction] = {}
                        for x, e in zip(src.even_names, exps):
                            if e:
                                cons[("coord", alpha, x)] = Fraction(e)
                        # weight of g_ij is u^alpha_j - u^beta_i
                        cons[("frame", alpha, j)] = cons.get(("frame", alpha, j), 0) - 1
                        cons[("frame", beta, i)] = cons.get(("frame", beta, i), 0) + 1
                        rows.append({k: Fraction(v) for k, v in cons.items() if v})
        return rows

    def slot_offset(self, alpha, slot, grading) -> Weight:
        sig = self.atlas.charts[alpha]
        if self.kind == "section":
            return grading.weight(("frame", alpha, slot[0]))
        if self.kind == "form":
            return grading.coord(alpha, sig.even_names[slot[0]])
        mu, i, j = slot
        return grading.add(grading.coord(alpha, sig.even_names[mu]), grading.weight(("frame", alpha, i)),
                           grading.neg(grading.weight(("frame", alpha, j))))


def _matmul(a, b, zero):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = zero
            for t in range(k):
                if a[i][t] and b[t][j]:
                    acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


# -- cochains ---------------------------------------------------------------------

class Cochain0:
    def __init__(self, model: SheafModel, entries: Mapping[int, Any]):
        self.model = model
        self.entries = {alpha: entries.get(alpha, model.zero(model.chart_signature(alpha)))
                        for alpha in model.atlas.chart_ids()}

    def __getitem__(self, alpha: int):
        return self.entries[alpha]

    def __add__(self, other: Cochain0) -> Cochain0:
        return Cochain0(self.model, {a: self.entries[a] + other.entries[a] for a in self.entries})

    def __sub__(self, other: Cochain0) -> Cochain0:
        return Cochain0(self.model, {a: self.entries[a] - other.entries[a] for a in self.entries})

    def __neg__(self) -> Cochain0:
        return Cochain0(self.model, {a: v.scale(-1) for a, v in self.entries.items()})

    def scale(self, c) -> Cochain0:
        return Cochain0(self.model, {a: v.scale(c) for a, v in self.entries.items()})

    def is_zero(self) -> bool:
        return all(self.model.is_zero(v) for v in self.entries.values())

    def render(self) -> str:
        return "\n".join(f"chart {a}: {self.model.render(v)}" for a, v in self.entries.items())


class Cochain1:
    """Entries for pairs a < b, expressed in chart a on the overlap."""

    def __init__(self, model: SheafModel, entries: Mapping[tuple[int, int], Any]):
        self.model = model
        out = {}
        for key in model.atlas.pairs():
            sig = model.pair_signature(*key)
            value = entries.get(key)
            out[key] = model.zero(sig) if value is None else value.with_signature(sig)
        unknown = set(entries) - set(out)
        if unknown:
            raise ContextError(f"cochain entries for non-overlapping pairs {sorted(unknown)}")
        self.entries = out

    def __getitem__(self, key: tuple[int, int]):
        return self.entries[key]

    def _combine(self, other: Cochain1, sign: int) -> Cochain1:
        if other.model.atlas is not self.model.atlas and other.model.atlas != self.model.atlas:
            raise ContextError("cochains over different atlases")
        return Cochain1(self.model, {k: v + other.entries[k].scale(sign) for k, v in self.entries.items()})

    def __add__(self, other: Cochain1) -> Cochain1:
        return self._combine(other, 1)

    def __sub__(self, other: Cochain1) -> Cochain1:
        return self._combine(other, -1)

    def __neg__(self) -> Cochain1:
        return self.scale(-1)

    def scale(self, c) -> Cochain1:
        return Cochain1(self.model, {k: v.scale(c) for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return all(self.model.is_zero(v) for v in self.entries.values())

    def map_entries(self, fn, model: SheafModel | None = None) -> Cochain1:
        return Cochain1(model or self.model, {k: fn(v) for k, v in self.entries.items()})

    def with_model(self, model: SheafModel) -> Cochain1:
        return Cochain1(model, self.entries)

    def render(self) -> str:
        return "\n".join(f"entry {a} {b} = {self.model.render(v)}" for (a, b), v in self.entries.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain1):
            return NotImplemented
        return self.entries.keys() == other.entries.keys() and all(
            self.entries[k] == other.entries[k] for k in self.entries)


def coboundary(c0: Cochain0) -> Cochain1:
    model = c0.model
    out = {}
    for alpha, beta in model.atlas.pairs():
        sig = model.pair_signature(alpha, beta)
        moved = model.transport(alpha, beta, c0[beta], sig)
        out[(alpha, beta)] = moved - c0[alpha].with_signature(sig)
    return Cochain1(model, out)


def cocycle_defects(c1: Cochain1) -> list[tuple[int, int, int]]:
    model = c1.model
    bad = []
    for alpha, beta, gamma in model.atlas.triples():
        sig = model.atlas.triple_signature(alpha, (beta, gamma))
        sig_b = model.atlas.triple_signature(beta, (alpha, gamma))
        moved = model.transport(alpha, beta, c1[(beta, gamma)].with_signature(sig_b), sig)
        total = moved - c1[(alpha, gamma)].with_signature(sig) + c1[(alpha, beta)].with_signature(sig)
        if not model.is_zero(total):
            bad.append((alpha, beta, gamma))
    return bad


def cocycle_check(c1: Cochain1) -> bool:
    return not cocycle_defects(c1)


# -- solving ----------------------------------------------------------------------

@dataclass
class SolveResult:
    cochain: Cochain0 | None
    definitive: bool
    route: str
    constants: list[Fraction] = field(default_factory=list)
    window: tuple[int, int] | None = None

    @property
    def solved(self) -> bool:
        return self.cochain is not None

    @property
    def verdict(self) -> str:
        if self.solved:
            return "SOLVED"
        return "UNSOLVABLE" if self.definitive else "UNDECIDED"


class NotACocycleError(ValueError):
    """Raised when a coboundary is requested for a non-cocycle."""


class _Basis:
    """Cached transports of basis elements."""

    def __init__(self, model: SheafModel):
        self.model = model
        self._cache: dict = {}

    def moved(self, alpha: int, beta: int, slot, exps) -> dict:
        key = (alpha, beta, slot, exps)
        if key not in self._cache:
            m = self.model
            sig_b = m.atlas.transition(alpha, beta).target_signature
            val = m.element(sig_b, slot, exps)
            self._cache[key] = m.decompose(m.transport(alpha, beta, val, m.pair_signature(alpha, beta)))
        return self._cache[key]


def _terms_by_weight(model: SheafModel, grading: Grading, c1: Cochain1) -> dict[Weight, dict]:
    out: dict[Weight, dict] = {}
    for (alpha, beta), value in c1.entries.items():
        for (slot, exps), coeff in model.decompose(value).items():
            w = grading.add(grading.monomial(alpha, exps), model.slot_offset(alpha, slot, grading))
            out.setdefault(w, {})[((alpha, beta), slot, exps)] = coeff
    return out


def solve_coboundary(c1: Cochain1, window: tuple[int, int] | None = None, extra: Sequence[Cochain1] = (),
                     route: str = "auto", check: bool = True) -> SolveResult:
    """Find s with delta s = c1 + sum k_i * extra_i.

    ``route`` is "auto", "laurent" (two-chart fast path), "graded" or
    "window".  The returned constants are the k_i.
    """
    model = c1.model
    if check and not cocycle_check(c1):
        raise NotACocycleError("input is not a cocycle")
    if route in ("auto", "laurent") and not extra:
        profile = laurent_profile(model)
        if profile is not None:
            return _solve_laurent(c1, profile)
        if route == "laurent":
            raise ValueError("the two-chart Laurent route does not apply to this sheaf")
    window = window or degree_window()
    grading = Grading(model)
    force_window = route == "window"
    definite = {alpha: grading.definite(alpha) and not force_window for alpha in model.atlas.chart_ids()}
    targets = _terms_by_weight(model, grading, c1)
    extra_terms = [_terms_by_weight(model, grading, e) for e in extra]
    weights = set(targets)
    for et in extra_terms:
        weights |= set(et)
    basis = _Basis(model)
    system = SparseSystem()
    definitive = all(definite.values())
    for w in sorted(weights):
        unknowns = []
        for alpha in model.atlas.chart_ids():
            ring = model.chart_signature(alpha).ring
            for slot in model.slots(alpha):
                need = grading.add(w, grading.neg(model.slot_offset(alpha, slot, grading)))
                if definite[alpha]:
                    e = grading.exponent_for(alpha, need)
                    candidates = [e] if e is not None else []
                else:
                    candidates = grading.exponents_in_window(alpha, need, window)
                for e in candidates:
                    if ring.allows(e):
                        unknowns.append((alpha, slot, e))
        rows: dict[tuple, dict] = {}
        for alpha, slot, e in unknowns:
            for a, b in model.atlas.pairs():
                if b == alpha:
                    for (s2, e2), coeff in basis.moved(a, b, slot, e).items():
                        rows.setdefault(((a, b), s2, e2), {})[("s", alpha, slot, e)] = coeff
                if a == alpha:
                    row = rows.setdefault(((a, b), slot, e), {})
                    row[("s", alpha, slot, e)] = row.get(("s", alpha, slot, e), 0) - 1
        rhs = targets.get(w, {})
        for k, et in enumerate(extra_terms):
            for key, coeff in et.get(w, {}).items():
                rows.setdefault(key, {})[("k", k)] = -coeff
        for key in set(rhs) - set(rows):
            rows[key] = {}
        for key, row in rows.items():
            system.add(row, rhs.get(key, Fraction(0)))
    solution = system.solve()
    route_name = "graded" if definitive else "window"
    if solution is None:
        return SolveResult(None, definitive, route_name, window=None if definitive else window)
    entries: dict[int, Any] = {}
    for key, val in solution.items():
        if key[0] != "s":
            continue
        _, alpha, slot, e = key
        sig = model.chart_signature(alpha)
        term = model.element(sig, slot, e, val)
        entries[alpha] = entries[alpha] + term if alpha in entries else term
    constants = [solution.get(("k", k), Fraction(0)) for k in range(len(extra))]
    c0 = Cochain0(model, entries)
    return SolveResult(c0, True, route_name, constants, None if definitive else window)


# -- two-chart Laurent route ------------------------------------------------------

@dataclass
class LaurentProfile:
    """For each chart-1 slot s: transport(y^k b_s) = coeff_s * c^k * x^(shift_s - k) b_(image_s)."""

    c: Fraction
    slot_map: dict
    coeffs: dict
    shifts: dict


def laurent_profile(model: SheafModel) -> LaurentProfile | None:
    a = model.atlas
    if len(a.charts) != 2 or a.p != 1 or a.pairs() != [(0, 1)]:
        return None
    if any(sig.invertible for sig in a.charts.values()):
        return None
    t = a.transition(0, 1)
    y = t.target_signature.even_names[0]
    img = t.images[y]
    if len(list(img.items())) != 1:
        return None
    ((odd, exps), c), = img.items()
    if odd or exps != (-1,):
        return None
    slot_map, coeffs, shifts = {}, {}, {}
    for slot in model.slots(1):
        moved = _Basis(model).moved(0, 1, slot, (0,))
        if len(moved) != 1:
            return None
        ((s2, e2), coeff), = moved.items()
        slot_map[slot] = s2
        coeffs[slot] = coeff
        shifts[slot] = e2[0]
    if sorted(map(repr, slot_map.values())) != sorted(map(repr, model.slots(0))):
        return None
    return LaurentProfile(c, slot_map, coeffs, shifts)


def _solve_laurent(c1: Cochain1, prof: LaurentProfile) -> SolveResult:
    model = c1.model
    back = {s2: s for s, s2 in prof.slot_map.items()}
    s0: dict = {}
    s1: dict = {}
    for (slot, exps), coeff in model.decompose(c1[(0, 1)]).items():
        j = exps[0]
        if j >= 0:
            s0[(slot, j)] = s0.get((slot, j), 0) - coeff
            continue
        src = back[slot]
        k = prof.shifts[src] - j
        if k < 0:
            return SolveResult(None, True, "laurent")
        s1[(src, k)] = s1.get((src, k), 0) + coeff / (prof.coeffs[src] * prof.c ** k)
    entries = {}
    for alpha, terms in ((0, s0), (1, s1)):
        sig = model.chart_signature(alpha)
        val = model.zero(sig)
        for (slot, j), coeff in terms.items():
            if coeff:
                val = val + model.element(sig, slot, (j,), coeff)
        entries[alpha] = val
    return SolveResult(Cochain0(model, entries), True, "laurent")


def h1_dimension(model: SheafModel) -> int:
    """dim H^1 for two-chart Laurent sheaves: gaps between the two spans."""
    prof = laurent_profile(model)
    if prof is None:
        raise ValueError("h1_dimension needs a two-chart Laurent sheaf")
    return sum(max(0, -a - 1) for a in prof.shifts.values())


def h1_gap_basis(model: SheafModel) -> list[Cochain1]:
    """One cocycle per missing monomial; together they represent a basis of H^1."""
    prof = laurent_profile(model)
    if prof is None:
        raise ValueError("h1_gap_basis needs a two-chart Laurent sheaf")
    sig = model.pair_signature(0, 1)
    out = []
    for src, shift in prof.shifts.items():
        for j in range(shift + 1, 0):
            out.append(Cochain1(model, {(0, 1): model.element(sig, prof.slot_map[src], (j,))}))
    return out


# -- class comparison -------------------------------------------------------------

@dataclass
class ClassComparison:
    equal: bool | None
    definitive: bool
    route: str
    witness: Cochain0 | None = None

    @property
    def verdict(self) -> str:
        if self.equal is None:
            return "UNDECIDED"
        return "EQUAL" if self.equal else "DIFFERENT"


def compare_classes(c1: Cochain1, c2: Cochain1, window: tuple[int, int] | None = None,
                    route: str = "auto") -> ClassComparison:
    res = solve_coboundary(c1 - c2, window, route=route)
    if res.solved:
        return ClassComparison(True, True, res.route, res.cochain)
    return ClassComparison(False if res.definitive else None, res.definitive, res.route)


def class_equal(c1: Cochain1, c2: Cochain1, window: tuple[int, int] | None = None) -> bool:
    return bool(compare_classes(c1, c2, window).equal)


def is_trivial(c1: Cochain1, window: tuple[int, int] | None = None) -> str:
    """TRIVIAL, NONTRIVIAL or UNDECIDED."""
    res = solve_coboundary(c1, window)
    if res.solved:
        return "TRIVIAL"
    return "NONTRIVIAL" if res.definitive else "UNDECIDED"


def find_proportionality(c1: Cochain1, c2: Cochain1, window: tuple[int, int] | None = None) -> SolveResult:
    """Solve c1 = k * c2 + delta s for the scalar k (returned as constants[0])."""
    return solve_coboundary(c1, window, extra=[c2.scale(-1)])
