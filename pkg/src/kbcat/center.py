"""Centers restricted to a finite window of indecomposable complexes.

A natural family assigns to each window object an endomorphism class.  The
center is cut out by naturality against a spanning set of morphisms; the
triangle center adds compatibility with the shift, transported along recorded
isomorphisms ``X_j -> S(X_i)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from .addcat import CategoryPresentation
from .complexes import (
    ChainMap,
    Complex,
    HomKb,
    compose,
    hom_kb,
    homotopic,
    identity_map,
    is_iso_kb,
    shift_map,
    stalk,
)
from .exactlin import EchelonSpan, LinearSolver, Mat, kernel_basis, rank
from .report import Report


class NaturalityFailure(RuntimeError):
    pass


@dataclass
class Window:
    objects: list[Complex]
    spanning: list[tuple[int, int, ChainMap]] = dc_field(default_factory=list)
    sigma_pairs: list[tuple[int, int, ChainMap]] = dc_field(default_factory=list)
    labels: list[str] = dc_field(default_factory=list)
    descriptor: dict = dc_field(default_factory=dict)
    preferred_end: dict[int, list[ChainMap]] = dc_field(default_factory=dict)

    def __post_init__(self):
        if not self.labels:
            self.labels = [repr(x) for x in self.objects]
        self._index = {x: i for i, x in enumerate(self.objects)}
        for i, j, f in self.spanning:
            if f.src != self.objects[i] or f.tgt != self.objects[j]:
                raise ValueError(f"spanning morphism {i}->{j} has wrong endpoints")

    def index(self, x: Complex) -> int | None:
        return self._index.get(x)

    def end(self, i: int) -> HomKb:
        x = self.objects[i]
        pref = (identity_map(x),) + tuple(self.preferred_end.get(i, ()))
        return hom_kb(x, x, preferred=pref)

    def check_sigma_pairs(self) -> list[tuple[int, int]]:
        """Indices of sigma pairs whose map is not an isomorphism (should be empty)."""
        return [(i, j) for i, j, phi in self.sigma_pairs if not is_iso_kb(phi)]

    def __len__(self) -> int:
        return len(self.objects)


@dataclass
class NaturalFamily:
    window: Window
    coords: list[np.ndarray]

    def component(self, i: int) -> ChainMap:
        return self.window.end(i).combine(self.coords[i])

    def vector(self) -> np.ndarray:
        field = self.window.objects[0].field
        if not self.coords:
            return field.zeros(0)
        return np.concatenate(self.coords).astype(field.dtype, copy=False)

    def is_zero(self) -> bool:
        return not np.any(self.vector() != 0)


def _offsets(w: Window) -> tuple[list[int], int]:
    offs, pos = [], 0
    for i in range(len(w.objects)):
        offs.append(pos)
        pos += w.end(i).dim
    return offs, pos


def _naturality_rows(w: Window, offs: list[int], nvars: int, with_sigma: bool) -> list[np.ndarray]:
    field = w.objects[0].field
    rows: list[np.ndarray] = []

    def add_block(space: HomKb, left: list[tuple[int, ChainMap, int]]):
        # left: (offset, map, sign) contributions per unknown
        block = field.zeros(space.dim, nvars)
        for col, g, sign in left:
            c = space.coords(g)
            block[:, col] = field.norm(block[:, col] + (c if sign > 0 else -c))
        for r in range(space.dim):
            rows.append(block[r])

    for a, b, f in w.spanning:
        ea, eb = w.end(a), w.end(b)
        space = hom_kb(w.objects[a], w.objects[b])
        contrib = []
        for k, e in enumerate(ea.reps):
            contrib.append((offs[a] + k, compose(f, e), +1))
        for k, e in enumerate(eb.reps):
            contrib.append((offs[b] + k, compose(e, f), -1))
        add_block(space, contrib)
    if with_sigma:
        for i, j, phi in w.sigma_pairs:
            ei, ej = w.end(i), w.end(j)
            space = hom_kb(phi.src, phi.tgt)
            contrib = []
            for k, e in enumerate(ej.reps):
                contrib.append((offs[j] + k, compose(phi, e), +1))
            for k, e in enumerate(ei.reps):
                contrib.append((offs[i] + k, compose(shift_map(e, 1), phi), -1))
            add_block(space, contrib)
    return rows


def _split(w: Window, offs: list[int], vec: np.ndarray) -> list[np.ndarray]:
    out = []
    for i in range(len(w.objects)):
        out.append(np.array(vec[offs[i] : offs[i] + w.end(i).dim], dtype=vec.dtype))
    return out


def _solve_families(w: Window, with_sigma: bool) -> list[NaturalFamily]:
    field = w.objects[0].field
    offs, nvars = _offsets(w)
    rows = _naturality_rows(w, offs, nvars, with_sigma)
    if not rows:
        basis = [np.eye(1, nvars, k, dtype=field.dtype)[0] for k in range(nvars)]
        basis = [field.array(v, (nvars,)) for v in basis]
    else:
        m = Mat(field, np.array(rows, dtype=field.dtype).reshape(len(rows), nvars), _trusted=True)
        basis = kernel_basis(m)
    fams = [NaturalFamily(w, _split(w, offs, v)) for v in basis]
    for fam in fams:
        bad = naturality_violations(fam, with_sigma)
        if bad:
            raise NaturalityFailure(f"solved family fails naturality at {bad[:3]}")
    return fams


def naturality_violations(fam: NaturalFamily, with_sigma: bool = False) -> list[str]:
    """Re-verify naturality through homotopy tests, independent of the coordinate solve."""
    w = fam.window
    comps = [fam.component(i) for i in range(len(w.objects))]
    bad = []
    for a, b, f in w.spanning:
        if not homotopic(compose(f, comps[a]), compose(comps[b], f)):
            bad.append(f"{w.labels[a]} -> {w.labels[b]}")
    if with_sigma:
        for i, j, phi in w.sigma_pairs:
            if not homotopic(compose(phi, comps[j]), compose(shift_map(comps[i], 1), phi)):
                bad.append(f"shift {w.labels[i]} ~ {w.labels[j]}")
    return bad


def solve_center(w: Window) -> list[NaturalFamily]:
    return _solve_families(w, with_sigma=False)


def solve_triangle_center(w: Window) -> list[NaturalFamily]:
    return _solve_families(w, with_sigma=True)


def family_from_components(w: Window, comps: Mapping[int, ChainMap]) -> NaturalFamily:
    """Coordinates of a family given by chain maps (identity where missing)."""
    coords = []
    for i, x in enumerate(w.objects):
        f = comps.get(i, identity_map(x))
        coords.append(w.end(i).coords(f))
    return NaturalFamily(w, coords)


def in_span(families: Sequence[NaturalFamily], fam: NaturalFamily) -> bool:
    field = fam.window.objects[0].field
    n = fam.vector().shape[0]
    span = EchelonSpan(field, n)
    for f in families:
        span.add(f.vector())
    return span.contains(fam.vector())


# center of the presentation itself


def presentation_center(p: CategoryPresentation) -> list[dict[str, np.ndarray]]:
    """Basis of families ``eta_P`` in End(P) commuting with every Hom basis element."""
    field = p.field
    labels = list(p.labels)
    offs, pos = {}, 0
    for lbl in labels:
        offs[lbl] = pos
        pos += len(p.basis(lbl, lbl))
    nvars = pos
    rows = []
    for (s, t), basis in p.homs.items():
        es, et = p.basis(s, s), p.basis(t, t)
        for f in basis:
            nr = p.dim(t) * p.dim(s)
            block = field.zeros(nr, nvars)
            for k, e in enumerate(es):
                block[:, offs[s] + k] = field.norm(block[:, offs[s] + k] + (f.real @ e.real).flat())
            for k, e in enumerate(et):
                block[:, offs[t] + k] = field.norm(block[:, offs[t] + k] - (e.real @ f.real).flat())
            rows.extend(block)
    if rows:
        m = Mat(field, np.array(rows, dtype=field.dtype).reshape(len(rows), nvars), _trusted=True)
        basis = kernel_basis(m)
    else:
        basis = [field.array([1 if j == k else 0 for j in range(nvars)], (nvars,)) for k in range(nvars)]
    out = []
    for v in basis:
        out.append({lbl: np.array(v[offs[lbl] : offs[lbl] + len(p.basis(lbl, lbl))], dtype=field.dtype) for lbl in labels})
    return out


def _end_realization(p: CategoryPresentation, lbl: str, coords) -> Mat:
    field = p.field
    out = Mat.zeros(field, p.dim(lbl), p.dim(lbl))
    for c, b in zip(coords, p.basis(lbl, lbl)):
        if c != 0:
            out = out + b.real.scale(c)
    return out


def induce(w: Window, p: CategoryPresentation, fam: Mapping[str, np.ndarray]) -> NaturalFamily:
    """Apply a family of the presentation degreewise to every window complex."""
    field = p.field
    coords = []
    for i, x in enumerate(w.objects):
        parts = {}
        for n in x.degrees:
            blocks = [_end_realization(p, lbl, fam[lbl]) for lbl in x.comps[n]]
            sizes = [b.rows for b in blocks]
            grid = [[blocks[a] if a == b else None for b in range(len(blocks))] for a in range(len(blocks))]
            parts[n] = Mat.block(field, grid, sizes, sizes)
        coords.append(w.end(i).coords(ChainMap(x, x, parts)))
    return NaturalFamily(w, coords)


def stalk_indices(w: Window, p: CategoryPresentation) -> dict[str, int | None]:
    return {lbl: w.index(stalk(p, lbl, 0)) for lbl in p.labels}


def restrict(w: Window, p: CategoryPresentation, fam: NaturalFamily, stalks: Mapping[str, int]) -> np.ndarray:
    """Concatenated End(P)-coordinates of the degree-0 parts on the stalks."""
    field = p.field
    out = []
    for lbl in p.labels:
        comp = fam.component(stalks[lbl])
        c = p.coords(lbl, lbl, comp.part(0))
        out.append(c)
    return np.concatenate(out).astype(field.dtype, copy=False) if out else field.zeros(0)


def _columns(field, vecs: Sequence[np.ndarray], nrows: int) -> Mat:
    arr = field.zeros(nrows, len(vecs))
    for j, v in enumerate(vecs):
        arr[:, j] = v
    return Mat(field, arr, _trusted=True)


@dataclass
class ResIndResult:
    report: Report
    res_matrix: list[list]
    kernel: list[NaturalFamily]
    center_dim: int
    presentation_center_dim: int
    surjective: bool
    injective: bool


def res_ind_check(w: Window, p: CategoryPresentation, *, triangle: bool = True) -> ResIndResult:
    field = p.field
    rep = Report("res-ind", {"window": w.descriptor, "triangle": triangle})
    stalks = stalk_indices(w, p)
    missing = [lbl for lbl, i in stalks.items() if i is None]
    rep.add("window contains degree-0 stalks", not missing, expected=[], computed=missing,
            citation="restriction to the additive category")
    if missing:
        return ResIndResult(rep, [], [], 0, 0, False, False)
    zt = solve_triangle_center(w) if triangle else solve_center(w)
    zp = presentation_center(p)
    rep.extra["res_domain_dim"] = len(zt)
    rep.extra["presentation_center_dim"] = len(zp)

    def pvec(fam: Mapping[str, np.ndarray]) -> np.ndarray:
        return np.concatenate([fam[lbl] for lbl in p.labels]).astype(field.dtype, copy=False)

    plen = sum(len(p.basis(lbl, lbl)) for lbl in p.labels)
    zp_solver = LinearSolver(_columns(field, [pvec(f) for f in zp], plen))
    res_cols = []
    landed = True
    for fam in zt:
        r = restrict(w, p, fam, stalks)
        c = zp_solver.solve(r)
        if c is None:
            landed = False
            c = field.zeros(len(zp))
        res_cols.append(c)
    rep.add("restrictions are natural on the additive category", landed, expected=True, computed=landed,
            citation="restriction map")
    res = _columns(field, res_cols, len(zp))
    res_rank = rank(res) if len(zt) and len(zp) else 0

    # ind: each presentation family, induced degreewise, must lie in the window center
    nt = sum(w.end(i).dim for i in range(len(w.objects)))
    zt_solver = LinearSolver(_columns(field, [f.vector() for f in zt], nt))
    ind_cols = []
    ind_ok = True
    for fam in zp:
        v = induce(w, p, fam).vector()
        c = zt_solver.solve(v)
        if c is None:
            ind_ok = False
            c = field.zeros(len(zt))
        ind_cols.append(c)
    rep.add("induced families lie in the window center", ind_ok, expected=True, computed=ind_ok,
            citation="induction map")
    ind = _columns(field, ind_cols, len(zt))
    if len(zp):
        comp = res @ ind if len(zt) else Mat.zeros(field, len(zp), len(zp))
        is_id = comp == Mat.identity(field, len(zp))
    else:
        comp, is_id = None, True
    rep.add("res o ind = id", is_id, expected="identity", computed=comp.to_json() if comp is not None else [],
            citation="res o ind is the identity")
    surj = res_rank == len(zp)
    kern_vecs = kernel_basis(res) if len(zt) else []
    kernel = []
    for kv in kern_vecs:
        vec = field.zeros(nt)
        for c, f in zip(kv, zt):
            if c != 0:
                vec = field.norm(vec + c * f.vector())
        offs, _ = _offsets(w)
        kernel.append(NaturalFamily(w, _split(w, offs, vec)))
    inj = not kernel
    rep.add("res surjective", surj, expected=True, computed=surj, citation="res o ind = id forces surjectivity")
    rep.extra["res_injective"] = "yes" if inj else "no"
    rep.extra["res_injective_scope"] = "window-relative"
    rep.extra["res_rank"] = res_rank
    rep.extra["res_matrix"] = res.to_json()
    rep.extra["kernel_dim"] = len(kernel)
    return ResIndResult(rep, res.to_json(), kernel, len(zt), len(zp), surj, inj)


def kernel_nilpotency_check(
    families: Sequence[NaturalFamily],
    d: int,
    w: Window | None = None,
    p: CategoryPresentation | None = None,
) -> Report:
    """Every product of ``d`` kernel families is null-homotopic on every window object."""
    rep = Report("nilpotency", {"d": d, "families": len(families)})
    if d < 1:
        raise ValueError("d must be positive")
    if not families:
        rep.add("products of kernel elements vanish", True, expected="all null", computed="no kernel elements",
                citation="nilpotency of the restriction kernel")
        return rep
    w = w or families[0].window
    if p is not None:
        stalks = stalk_indices(w, p)
        for k, fam in enumerate(families):
            vanish = all(i is None or w.end(i).is_null(fam.component(i)) for i in stalks.values())
            rep.add(f"kernel element {k} vanishes on stalks", vanish, expected=True, computed=vanish,
                    citation="kernel of the restriction map")
    comps = [[fam.component(i) for i in range(len(w.objects))] for fam in families]
    # products commute in the center, so multisets suffice
    for combo in itertools.combinations_with_replacement(range(len(families)), d):
        bad = []
        for i, x in enumerate(w.objects):
            prod = comps[combo[0]][i]
            for k in combo[1:]:
                prod = compose(comps[k][i], prod)
            if not w.end(i).is_null(prod):
                bad.append(w.labels[i])
        rep.add(f"product {list(combo)} null on window", not bad, expected=[], computed=bad,
                citation="nilpotency of the restriction kernel")
    return rep


def lemma_ric_family(w: Window, deltas: Mapping[int, tuple[ChainMap, object]]) -> NaturalFamily:
    """Family ``Id + lam_X Delta_X`` on the given objects and ``Id`` elsewhere.

    ``deltas`` maps a window index to ``(Delta_X, lam_X)``.  Naturality is checked
    against every spanning morphism before returning.
    """
    comps = {}
    for i, (delta, lam) in deltas.items():
        x = w.objects[i]
        comps[i] = identity_map(x) + delta.scale(x.field(lam))
    fam = family_from_components(w, comps)
    bad = naturality_violations(fam)
    if bad:
        raise NaturalityFailure(f"family is not natural at {bad[:5]}")
    return fam


@dataclass
class Connectivity:
    edges: list[tuple[int, int]]
    components: list[list[str]]
    connected: bool
    non_degenerate: bool


def block_connectivity(w: Window) -> Connectivity:
    n = len(w.objects)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = []
    non_deg = False
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            h = hom_kb(w.objects[a], w.objects[b])
            if h.dim:
                non_deg = True
                if a < b or not hom_kb(w.objects[b], w.objects[a]).dim:
                    edges.append((min(a, b), max(a, b)))
                parent[find(a)] = find(b)
    if not non_deg:
        # radical endomorphisms also witness non-degeneracy
        non_deg = any(w.end(i).dim > 1 for i in range(n))
    groups: dict[int, list[str]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(w.labels[i])
    comps = sorted(groups.values(), key=lambda g: w.labels.index(g[0]))
    return Connectivity(sorted(set(edges)), comps, len(comps) <= 1, non_deg)
