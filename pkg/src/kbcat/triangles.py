"""Diagnostics on the triangulated structure of K^b.

Exactness is decided by comparing a candidate triangle with the cone triangle
of its first map: ``X -u-> Y -v-> Z -w-> SX`` is exact iff some chain map
``h: Z -> Cone(u)`` satisfies ``h v ~ incl`` and ``proj h ~ w`` and is an
isomorphism in K^b.  The existence of ``h`` is one linear system.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .complexes import (
    ChainMap,
    Complex,
    HomKb,
    Triangle,
    boundary_of,
    compose,
    cone,
    flatten,
    hom_kb,
    identity_map,
    is_iso_kb,
    layout,
    _hom_data,
)
from .exactlin import EchelonSpan, LinearSolver, Mat, kernel_basis, solve


class NotIndecomposable(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


YES, NO, UNDETERMINED = "yes", "no", "undetermined"


@dataclass
class ExactnessResult:
    ok: bool
    certificate: ChainMap | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _stack_columns(field, columns: Sequence[Sequence[np.ndarray]], sizes: Sequence[int]) -> Mat:
    """Each column is a list of blocks, one per equation group."""
    nrows = sum(sizes)
    arr = field.zeros(nrows, len(columns))
    for j, blocks in enumerate(columns):
        pos = 0
        for blk, sz in zip(blocks, sizes):
            if sz:
                arr[pos : pos + sz, j] = blk
            pos += sz
    return Mat(field, arr, _trusted=True)


def is_exact_triangle(t: Triangle) -> ExactnessResult:
    u, v, w = t.u, t.v, t.w
    from .complexes import is_chain_map

    for name, f in (("u", u), ("v", v), ("w", w)):
        if not is_chain_map(f):
            return ExactnessResult(False, None, f"{name} is not a chain map")
    y, z = v.src, v.tgt
    c, ct = cone(u)
    incl, proj = ct.v, ct.w
    sx = w.tgt
    field = z.field

    # unknowns: h in chain maps Z -> C, homotopies S: Y -> C[-1], T: Z -> SX[-1]
    hbasis = _hom_data(z, c).chain_basis
    sbasis = _hom_data(y, c).homotopy_basis
    tbasis = _hom_data(z, sx).homotopy_basis
    slots_yc = layout(y, c, 0)
    slots_zx = layout(z, sx, 0)
    n1 = sum(r * q for _, r, q in slots_yc)
    n2 = sum(r * q for _, r, q in slots_zx)
    zero1, zero2 = field.zeros(n1), field.zeros(n2)
    cols = []
    for b in hbasis:
        cols.append([flatten(compose(b, v), slots_yc), flatten(compose(proj, b), slots_zx)])
    for s in sbasis:
        cols.append([field.norm(-flatten(boundary_of(s), slots_yc)), zero2])
    for s in tbasis:
        cols.append([zero1, field.norm(-flatten(boundary_of(s), slots_zx))])
    rhs = np.concatenate([flatten(incl, slots_yc), flatten(w, slots_zx)]).astype(field.dtype, copy=False)
    if not cols:
        sol = None if np.any(rhs != 0) else field.zeros(0)
    else:
        sol = solve(_stack_columns(field, cols, [n1, n2]), rhs)
    if sol is None:
        return ExactnessResult(False, None, "no comparison map commutes with the cone triangle")
    h = ChainMap(z, c, {})
    for coef, b in zip(sol[: len(hbasis)], hbasis):
        if coef != 0:
            h = h + b.scale(coef)
    # Any comparison map between exact triangles that is the identity on X
    # and Y is an isomorphism, so one solution decides exactness.
    if not is_iso_kb(h):
        return ExactnessResult(False, None, "comparison map is not an isomorphism in K^b")
    return ExactnessResult(True, h, "")


def _solves(h_space: HomKb, columns: list[np.ndarray], rhs: np.ndarray) -> bool:
    field = h_space.field
    if not columns:
        return not np.any(rhs != 0)
    arr = field.zeros(h_space.dim, len(columns))
    for j, col in enumerate(columns):
        arr[:, j] = col
    return solve(Mat(field, arr, _trusted=True), rhs) is not None


def is_section(f: ChainMap) -> bool:
    """Is there ``h`` with ``h f ~ id``?"""
    x, y = f.src, f.tgt
    end = hom_kb(x, x)
    back = hom_kb(y, x)
    if end.dim == 0:
        return True
    cols = [end.coords(compose(h, f)) for h in back.reps]
    return _solves(end, cols, end.coords(identity_map(x)))


def is_retraction(f: ChainMap) -> bool:
    """Is there ``h`` with ``f h ~ id``?"""
    x, y = f.src, f.tgt
    end = hom_kb(y, y)
    back = hom_kb(y, x)
    if end.dim == 0:
        return True
    cols = [end.coords(compose(f, h)) for h in back.reps]
    return _solves(end, cols, end.coords(identity_map(y)))


@dataclass
class EndAnalysis:
    object: Complex
    dim: int
    basis: list[ChainMap]
    is_local: str
    radical_basis: list[ChainMap] | None = None
    detail: str = ""


def end_analysis(x: Complex) -> EndAnalysis:
    ident = identity_map(x)
    h = hom_kb(x, x, preferred=(ident,))
    basis = list(h.reps)
    if h.dim == 0:
        return EndAnalysis(x, 0, basis, NO, None, "zero object in K^b")
    if h.dim == 1:
        return EndAnalysis(x, 1, basis, YES, [], "End is the ground field")
    field = x.field
    if h.dim == 2:
        r = basis[1]
        beta, alpha = h.coords(compose(r, r))  # r^2 = beta + alpha r
        # End = k[t]/(t^2 - alpha t - beta) is local iff the quadratic has a
        # repeated root or no root in k
        if field.kind == "Fp" and field.p == 2:
            if alpha % 2 == 0:
                # t^2 + beta = (t + beta)^2 in characteristic 2
                rho = r - ident.scale(beta) if beta else r
                return EndAnalysis(x, 2, basis, YES, [rho], "End is local with square-zero radical")
            has_root = any((t * t + alpha * t + beta) % 2 == 0 for t in (0, 1))
            if has_root:
                return EndAnalysis(x, 2, basis, NO, None, "End splits into two idempotents")
            return EndAnalysis(x, 2, basis, YES, [], "End is a quadratic field extension")
        disc = field.norm(np.array([alpha * alpha + 4 * beta], dtype=field.dtype))[0]
        if disc == 0:
            half = field.div(alpha, field(2))
            rho = r - ident.scale(half) if half != 0 else r
            return EndAnalysis(x, 2, basis, YES, [rho], "End is local with square-zero radical")
        if field.is_square(disc):
            return EndAnalysis(x, 2, basis, NO, None, "End splits into two idempotents")
        return EndAnalysis(x, 2, basis, YES, [], "End is a quadratic field extension")
    # dim > 2: look for an obvious nontrivial idempotent among basis elements
    for b in basis[1:]:
        for e in (b, ident - b):
            if h.is_null(compose(e, e) - e) and not h.is_null(e) and not h.is_null(ident - e):
                return EndAnalysis(x, h.dim, basis, NO, None, "nontrivial idempotent found")
    return EndAnalysis(x, h.dim, basis, UNDETERMINED, None, "dimension above 2")


def _window_objects(window) -> list[Complex]:
    return list(getattr(window, "objects", window))


def _quotient_functionals(end: HomKb, radical: Sequence[ChainMap]) -> tuple[LinearSolver, int]:
    """Solver whose trailing coordinates give the class in End / rad."""
    field = end.field
    span = EchelonSpan(field, end.dim)
    vecs = []
    for r in radical:
        c = end.coords(r)
        if span.add(c):
            vecs.append(c)
    nrad = len(vecs)
    for i in range(end.dim):
        e = field.zeros(end.dim)
        e[i] = field.one
        if span.add(e):
            vecs.append(e)
    arr = field.zeros(end.dim, len(vecs))
    for j, v in enumerate(vecs):
        arr[:, j] = v
    return LinearSolver(Mat(field, arr, _trusted=True)), nrad


def non_retraction_basis(b: Complex, z: Complex, z_end: EndAnalysis) -> list[ChainMap]:
    """Basis of the maps ``g: B -> Z`` that are not retractions (``Z`` local).

    ``g`` is a non-retraction iff ``g h`` lies in the radical of End(Z) for
    every ``h: Z -> B``; this is a linear condition on ``g``.
    """
    return _non_split(b, z, z_end, retraction=True)


def non_section_basis(x: Complex, a: Complex, x_end: EndAnalysis) -> list[ChainMap]:
    """Basis of the maps ``f: X -> A`` with ``h f`` in rad End(X) for every ``h: A -> X``."""
    return _non_split(x, a, x_end, retraction=False)


def _non_split(p: Complex, q: Complex, end_info: EndAnalysis, retraction: bool) -> list[ChainMap]:
    field = p.field
    local_obj = q if retraction else p
    end = hom_kb(local_obj, local_obj, preferred=(identity_map(local_obj),))
    space = hom_kb(p, q)
    if space.dim == 0:
        return []
    back = hom_kb(q, p)
    solver, nrad = _quotient_functionals(end, end_info.radical_basis or [])
    rows = []
    for h in back.reps:
        images = []
        for g in space.reps:
            comp = compose(g, h) if retraction else compose(h, g)
            coords = solver.solve(end.coords(comp))
            images.append(coords[nrad:])
        for k in range(end.dim - nrad):
            rows.append([im[k] for im in images])
    if not rows:
        return list(space.reps)
    m = Mat(field, field.array(rows, (len(rows), space.dim)), _trusted=True)
    return [space.combine(v) for v in kernel_basis(m)]


@dataclass
class AlmostVanishingResult:
    ok: bool
    window_size: int
    failures: list[str] = dc_field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def is_almost_vanishing(w: ChainMap, window) -> AlmostVanishingResult:
    """Window-relative test of ``f w ~ 0`` and ``w g ~ 0`` for non-sections ``f`` and non-retractions ``g``."""
    z, x = w.src, w.tgt
    objs = _window_objects(window)
    if hom_kb(z, x).is_null(w):
        return AlmostVanishingResult(False, len(objs), ["map is zero in K^b"])
    za, xa = end_analysis(z), end_analysis(x)
    for name, ea in (("source", za), ("target", xa)):
        if ea.is_local != YES:
            raise NotIndecomposable(f"{name} {ea.object!r}: End local = {ea.is_local} ({ea.detail})")
    sources = objs if z in objs else objs + [z]
    targets = objs if x in objs else objs + [x]
    failures = []
    for b in sources:
        tgt_space = hom_kb(b, x)
        for g in non_retraction_basis(b, z, za):
            if not tgt_space.is_null(compose(w, g)):
                failures.append(f"w o g nonzero for g: {b!r} -> {z!r}")
    for a in targets:
        tgt_space = hom_kb(z, a)
        for f in non_section_basis(x, a, xa):
            if not tgt_space.is_null(compose(f, w)):
                failures.append(f"f o w nonzero for f: {x!r} -> {a!r}")
    return AlmostVanishingResult(not failures, len(objs), failures)


def scaled(t: Triangle, lam) -> Triangle:
    return Triangle(t.u, t.v, t.w.scale(lam))


def check_scaling_hypotheses(t: Triangle, window=None) -> EndAnalysis:
    z = t.v.tgt
    ea = end_analysis(z)
    if hom_kb(t.v.src, z).is_null(t.v) or hom_kb(z, t.w.tgt).is_null(t.w):
        raise HypothesisViolated("second and third maps must be nonzero in K^b")
    if ea.is_local != YES or ea.dim > 2:
        raise HypothesisViolated(f"End(Z) has dim {ea.dim}, local={ea.is_local}")
    if ea.dim == 2:
        if not ea.radical_basis:
            raise HypothesisViolated("End(Z) is two-dimensional without a nilpotent element")
        delta = ea.radical_basis[0]
        if not hom_kb(t.v.src, z).is_null(compose(delta, t.v)):
            raise HypothesisViolated("radical element does not kill the second map")
        if not hom_kb(z, t.w.tgt).is_null(compose(t.w, delta)):
            raise HypothesisViolated("third map does not kill the radical element")
        if window is not None and not is_almost_vanishing(delta, window):
            raise HypothesisViolated("radical element is not almost vanishing on the window")
    return ea


def scaling_test(t: Triangle, lam, window=None) -> bool:
    """Exactness of ``(u, v, lam w)`` after checking the rigidity hypotheses on End(Z)."""
    check_scaling_hypotheses(t, window)
    return is_exact_triangle(scaled(t, t.u.src.field(lam))).ok


def rotate(t: Triangle) -> Triangle:
    """``(v, w, -S u)``."""
    from .complexes import shift_map

    return Triangle(t.v, t.w, -shift_map(t.u, 1))


def exact_all(triangles: Iterable[Triangle]) -> bool:
    return all(is_exact_triangle(t).ok for t in triangles)
