"""Bounded complexes over a presented additive category and Hom in K^b.

Conventions:

* shift: ``shift(X, k)^n = X^(n+k)`` with differential ``(-1)^k d^(n+k)``; a
  shifted chain map keeps its components, ``shift(f, k)^n = f^(n+k)``.
* cone of ``f: X -> Y``: ``Cone^n = X^(n+1) + Y^n`` with differential
  ``[[-d_X^(n+1), 0], [-f^(n+1), d_Y^n]]``; the cone triangle is
  ``X -f-> Y -incl-> Cone -proj-> shift(X, 1)`` with plain inclusion and
  projection.  With this sign the brutal truncation triangle, whose first map
  is minus a differential, is literally a cone triangle.

Hom spaces in K^b are computed as chain maps (kernel of the commutation
operator) modulo the image of the homotopy operator ``s -> d s + s d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .addcat import CategoryPresentation, Mor, Obj, ValidationReport, hom_space
from .exactlin import EchelonSpan, LinearSolver, Mat, quotient_indices


class Complex:
    """A bounded complex; components and differentials outside the support are zero."""

    __slots__ = ("pres", "comps", "diffs", "name", "_hash")

    def __init__(
        self,
        pres: CategoryPresentation,
        components: Mapping[int, Sequence[str]],
        differentials: Mapping[int, Mat] | None = None,
        name: str = "",
    ):
        self.pres = pres
        self.name = name
        self.comps: dict[int, tuple[str, ...]] = {
            int(n): tuple(c) for n, c in sorted(components.items()) if len(c)
        }
        for labels in self.comps.values():
            for lbl in labels:
                pres.dim(lbl)
        self.diffs: dict[int, Mat] = {}
        for n, m in (differentials or {}).items():
            n = int(n)
            if not isinstance(m, Mat):
                m = Mat(pres.field, m)
            shape = (self.dim(n + 1), self.dim(n))
            if m.shape != shape:
                raise ValueError(f"differential in degree {n} has shape {m.shape}, expected {shape}")
            if m.shape[0] and m.shape[1] and not m.is_zero():
                self.diffs[n] = m
        self._hash = hash(
            (
                id(pres),
                tuple(self.comps.items()),
                tuple((n, m) for n, m in sorted(self.diffs.items())),
            )
        )

    # structure

    def obj(self, n: int) -> Obj:
        return Obj(self.pres, self.comps.get(n, ()))

    def dim(self, n: int) -> int:
        return sum(self.pres.dim(s) for s in self.comps.get(n, ()))

    def d(self, n: int) -> Mat:
        m = self.diffs.get(n)
        if m is None:
            return Mat.zeros(self.pres.field, self.dim(n + 1), self.dim(n))
        return m

    @property
    def degrees(self) -> list[int]:
        return list(self.comps)

    @property
    def field(self):
        return self.pres.field

    @property
    def total_dim(self) -> int:
        return sum(self.dim(n) for n in self.comps)

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.pres is other.pres
            and self.comps == other.comps
            and self.diffs == other.diffs
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.name:
            return self.name
        parts = [f"{n}:{'+'.join(c)}" for n, c in self.comps.items()]
        return f"Complex({', '.join(parts) or '0'})"


def stalk(pres: CategoryPresentation, labels: Sequence[str] | str, degree: int = 0, name: str = "") -> Complex:
    if isinstance(labels, str):
        labels = (labels,)
    return Complex(pres, {degree: tuple(labels)}, name=name)


def zero_complex(pres: CategoryPresentation) -> Complex:
    return Complex(pres, {})


def validate_complex(x: Complex) -> ValidationReport:
    rep = ValidationReport()
    for n, m in x.diffs.items():
        rep.add(f"d^{n} in Hom span", Mor(x.obj(n), x.obj(n + 1), m).in_span())
    for n in x.degrees:
        dd = x.d(n + 1) @ x.d(n)
        rep.add(f"d^{n + 1} o d^{n} = 0", dd.is_zero())
    return rep


def shift(x: Complex, k: int = 1) -> Complex:
    sign = -1 if k % 2 else 1
    comps = {n - k: c for n, c in x.comps.items()}
    diffs = {n - k: m.scale(sign) if sign < 0 else m for n, m in x.diffs.items()}
    name = ""
    if x.name:
        name = f"S^{k}({x.name})" if k != 1 else f"S({x.name})"
    return Complex(x.pres, comps, diffs, name=name)


def truncate_ge(x: Complex, a: int) -> Complex:
    """Brutal truncation keeping degrees >= a (a subcomplex)."""
    comps = {n: c for n, c in x.comps.items() if n >= a}
    diffs = {n: m for n, m in x.diffs.items() if n >= a}
    return Complex(x.pres, comps, diffs)


# graded maps


class GradedMap:
    """Family of realized maps ``src^n -> tgt^(n + degree)``."""

    degree = 0
    __slots__ = ("src", "tgt", "parts", "_hash")

    def __init__(self, src: Complex, tgt: Complex, parts: Mapping[int, Mat] | None = None):
        if src.pres is not tgt.pres:
            raise ValueError("source and target live over different presentations")
        self.src = src
        self.tgt = tgt
        k = self.degree
        field = src.field
        clean: dict[int, Mat] = {}
        for n, m in (parts or {}).items():
            n = int(n)
            if not isinstance(m, Mat):
                m = Mat(field, m)
            shape = (tgt.dim(n + k), src.dim(n))
            if m.shape != shape:
                raise ValueError(f"component in degree {n} has shape {m.shape}, expected {shape}")
            if shape[0] and shape[1] and not m.is_zero():
                clean[n] = m
        self.parts = dict(sorted(clean.items()))
        self._hash = None

    def part(self, n: int) -> Mat:
        m = self.parts.get(n)
        if m is None:
            return Mat.zeros(self.src.field, self.tgt.dim(n + self.degree), self.src.dim(n))
        return m

    def _same(self, other: "GradedMap"):
        if type(other) is not type(self) or other.src != self.src or other.tgt != self.tgt:
            raise ValueError("maps have different type, source or target")

    def _new(self, parts):
        return type(self)(self.src, self.tgt, parts)

    def __add__(self, other):
        self._same(other)
        keys = set(self.parts) | set(other.parts)
        return self._new({n: self.part(n) + other.part(n) for n in keys})

    def __sub__(self, other):
        self._same(other)
        keys = set(self.parts) | set(other.parts)
        return self._new({n: self.part(n) - other.part(n) for n in keys})

    def __neg__(self):
        return self._new({n: -m for n, m in self.parts.items()})

    def scale(self, c):
        return self._new({n: m.scale(c) for n, m in self.parts.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (
            type(other) is type(self)
            and self.src == other.src
            and self.tgt == other.tgt
            and self.parts == other.parts
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.src, self.tgt, tuple(self.parts.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {m!r}" for n, m in self.parts.items())
        return f"{type(self).__name__}({self.src!r} -> {self.tgt!r}; {body})"


class ChainMap(GradedMap):
    degree = 0
    __slots__ = ()

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        return compose(self, other)


class Homotopy(GradedMap):
    degree = -1
    __slots__ = ()


class GradedMap1(GradedMap):
    """Degree +1 maps; the codomain of the commutation operator."""

    degree = 1
    __slots__ = ()


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """``g o f`` for chain maps (degreewise product)."""
    if g.src != f.tgt:
        raise ValueError(f"cannot compose: {g.src!r} is not {f.tgt!r}")
    parts = {n: g.part(n) @ m for n, m in f.parts.items() if n in g.parts}
    return ChainMap(f.src, g.tgt, parts)


def compose_chain(*maps: ChainMap) -> ChainMap:
    """``maps[0] o maps[1] o ... o maps[-1]``."""
    out = maps[-1]
    for g in reversed(maps[:-1]):
        out = compose(g, out)
    return out


def identity_map(x: Complex) -> ChainMap:
    f = x.field
    return ChainMap(x, x, {n: Mat.identity(f, x.dim(n)) for n in x.degrees})


def zero_map(x: Complex, y: Complex) -> ChainMap:
    return ChainMap(x, y, {})


def shift_map(f: ChainMap, k: int = 1) -> ChainMap:
    return ChainMap(shift(f.src, k), shift(f.tgt, k), {n - k: m for n, m in f.parts.items()})


def commutator(f: GradedMap) -> GradedMap1:
    """``d_Y o f - f o d_X`` for a degree-0 map, a degree +1 map."""
    x, y = f.src, f.tgt
    parts = {}
    for n in x.degrees:
        if not x.dim(n) or not y.dim(n + 1):
            continue
        parts[n] = y.d(n) @ f.part(n) - f.part(n + 1) @ x.d(n)
    return GradedMap1(x, y, parts)


def is_chain_map(f: GradedMap) -> bool:
    return commutator(f).is_zero()


def boundary_of(s: Homotopy) -> ChainMap:
    """``d_Y o s + s o d_X``."""
    x, y = s.src, s.tgt
    parts = {}
    for n in x.degrees:
        if not y.dim(n):
            continue
        parts[n] = y.d(n - 1) @ s.part(n) + s.part(n + 1) @ x.d(n)
    return ChainMap(x, y, parts)


# flattening into coordinate vectors


def layout(x: Complex, y: Complex, degree: int) -> list[tuple[int, int, int]]:
    """Slots ``(n, rows, cols)`` of nonzero blocks for maps of the given degree."""
    out = []
    for n in sorted(set(x.degrees)):
        r, c = y.dim(n + degree), x.dim(n)
        if r and c:
            out.append((n, r, c))
    return out


def flatten(f: GradedMap, slots=None) -> np.ndarray:
    if slots is None:
        slots = layout(f.src, f.tgt, f.degree)
    field = f.src.field
    chunks = [f.part(n).flat() for n, _, _ in slots]
    if not chunks:
        return field.zeros(0)
    return np.concatenate(chunks).astype(field.dtype, copy=False)


def unflatten(cls, x: Complex, y: Complex, vec, slots=None) -> GradedMap:
    if slots is None:
        slots = layout(x, y, cls.degree)
    field = x.field
    parts = {}
    pos = 0
    for n, r, c in slots:
        block = np.array(vec[pos : pos + r * c], dtype=field.dtype).reshape(r, c)
        parts[n] = Mat(field, block, _trusted=True)
        pos += r * c
    return cls(x, y, parts)


def degreewise_basis(cls, x: Complex, y: Complex) -> list[GradedMap]:
    """Basis of all degreewise morphisms of the given map type, ordered by degree."""
    out = []
    for n, _, _ in layout(x, y, cls.degree):
        for m in hom_space(x.pres, x.obj(n), y.obj(n + cls.degree)):
            out.append(cls(x, y, {n: m.real}))
    return out


def _matrix_of(field, images: Sequence[np.ndarray], nrows: int) -> Mat:
    arr = field.zeros(nrows, len(images))
    for j, v in enumerate(images):
        if nrows:
            arr[:, j] = v
    return Mat(field, arr, _trusted=True)


class HomKb:
    """Hom(X, Y) in K^b with fixed representatives and a coordinate map."""

    def __init__(self, x: Complex, y: Complex, preferred: Sequence[ChainMap] = ()):
        self.src, self.tgt = x, y
        field = x.field
        self.field = field
        self.slots = layout(x, y, 0)
        n0 = sum(r * c for _, r, c in self.slots)
        self.ambient_dim = n0

        data = _hom_data(x, y)
        self.chain_basis: list[ChainMap] = data.chain_basis
        self.null_images: list[np.ndarray] = data.null_images
        self.homotopy_solver: LinearSolver = data.homotopy_solver
        self.homotopy_basis: list[Homotopy] = data.homotopy_basis
        self.null_dim = data.null_dim

        for f in preferred:
            if f.src != x or f.tgt != y:
                raise ValueError("preferred representative has the wrong endpoints")
        total = list(preferred) + self.chain_basis
        vecs = [flatten(f, self.slots) for f in total]
        idx = quotient_indices(field, n0, self.null_images, vecs)
        self.reps: list[ChainMap] = [total[i] for i in idx]
        self.dim = len(self.reps)
        cols = [flatten(f, self.slots) for f in self.reps] + list(self.null_images)
        self._coord_solver = LinearSolver(_matrix_of(field, cols, n0))

    def coords(self, f: ChainMap) -> np.ndarray:
        """Coordinates of the class of ``f`` in the representative basis."""
        if f.src != self.src or f.tgt != self.tgt:
            raise ValueError("map has the wrong endpoints")
        sol = self._coord_solver.solve(flatten(f, self.slots))
        if sol is None:
            raise ValueError("not a chain map between these complexes")
        return sol[: self.dim]

    def is_null(self, f: ChainMap) -> bool:
        return not np.any(self.coords(f) != 0)

    def combine(self, coeffs) -> ChainMap:
        out = zero_map(self.src, self.tgt)
        for c, r in zip(coeffs, self.reps):
            if c != 0:
                out = out + r.scale(c)
        return out


@dataclass
class _HomData:
    chain_basis: list
    null_images: list
    homotopy_solver: LinearSolver
    homotopy_basis: list
    null_dim: int


@lru_cache(maxsize=8192)
def _hom_data(x: Complex, y: Complex) -> _HomData:
    field = x.field
    slots0 = layout(x, y, 0)
    n0 = sum(r * c for _, r, c in slots0)
    basis0 = degreewise_basis(ChainMap, x, y)
    slots1 = layout(x, y, 1)
    n1 = sum(r * c for _, r, c in slots1)
    comm = _matrix_of(field, [flatten(commutator(b), slots1) for b in basis0], n1)
    solver = LinearSolver(comm)
    chain_basis = []
    for v in solver.kernel():
        parts = {}
        for coef, b in zip(v, basis0):
            if coef != 0:
                for n, m in b.parts.items():
                    parts[n] = parts[n] + m.scale(coef) if n in parts else m.scale(coef)
        chain_basis.append(ChainMap(x, y, parts))

    hbasis = degreewise_basis(Homotopy, x, y)
    null_images = [flatten(boundary_of(s), slots0) for s in hbasis]
    hmat = _matrix_of(field, null_images, n0)
    hsolver = LinearSolver(hmat)
    return _HomData(chain_basis, null_images, hsolver, hbasis, hsolver.rank)


@lru_cache(maxsize=8192)
def _hom_kb_cached(x: Complex, y: Complex, preferred: tuple) -> HomKb:
    return HomKb(x, y, preferred)


def hom_kb(x: Complex, y: Complex, preferred: Sequence[ChainMap] = ()) -> HomKb:
    return _hom_kb_cached(x, y, tuple(preferred))


def clear_caches() -> None:
    _hom_data.cache_clear()
    _hom_kb_cached.cache_clear()


def chain_map_space(x: Complex, y: Complex) -> list[ChainMap]:
    return list(_hom_data(x, y).chain_basis)


def null_homotopy_witness(f: ChainMap) -> Homotopy | None:
    """A homotopy ``s`` with ``f = d s + s d`` (canonical solution), or None."""
    data = _hom_data(f.src, f.tgt)
    sol = data.homotopy_solver.solve(flatten(f, layout(f.src, f.tgt, 0)))
    if sol is None:
        return None
    out = Homotopy(f.src, f.tgt, {})
    for c, s in zip(sol, data.homotopy_basis):
        if c != 0:
            out = out + s.scale(c)
    return out


def is_null_homotopic(f: ChainMap) -> bool:
    return _is_null(f)


def _is_null(f: ChainMap) -> bool:
    data = _hom_data(f.src, f.tgt)
    return data.homotopy_solver.solve(flatten(f, layout(f.src, f.tgt, 0))) is not None


def homotopic(f: ChainMap, g: ChainMap) -> bool:
    return _is_null(f - g)


def is_contractible(x: Complex) -> bool:
    return _is_null(identity_map(x))


@dataclass(frozen=True)
class Triangle:
    """Candidate triangle ``X -u-> Y -v-> Z -w-> shift(X)``."""

    u: ChainMap
    v: ChainMap
    w: ChainMap

    def __post_init__(self):
        if self.u.tgt != self.v.src or self.v.tgt != self.w.src:
            raise ValueError("triangle maps are not composable")
        if self.w.tgt != shift(self.u.src, 1):
            raise ValueError("third map must land in the shift of the first object")

    @property
    def objects(self) -> tuple[Complex, Complex, Complex]:
        return self.u.src, self.v.src, self.w.src


def cone(f: ChainMap) -> tuple[Complex, Triangle]:
    x, y = f.src, f.tgt
    field = x.field
    degs = sorted({n - 1 for n in x.degrees} | set(y.degrees))
    comps = {n: x.comps.get(n + 1, ()) + y.comps.get(n, ()) for n in degs}
    diffs = {}
    for n in degs:
        rows = [x.dim(n + 2), y.dim(n + 1)]
        cols = [x.dim(n + 1), y.dim(n)]
        diffs[n] = Mat.block(
            field,
            [[-x.d(n + 1), None], [-f.part(n + 1), y.d(n)]],
            rows,
            cols,
        )
    c = Complex(x.pres, comps, diffs)
    incl = ChainMap(
        y,
        c,
        {n: Mat.block(field, [[None], [Mat.identity(field, y.dim(n))]], [x.dim(n + 1), y.dim(n)], [y.dim(n)]) for n in y.degrees},
    )
    sx = shift(x, 1)
    proj = ChainMap(
        c,
        sx,
        {n: Mat.block(field, [[Mat.identity(field, x.dim(n + 1)), None]], [x.dim(n + 1)], [x.dim(n + 1), y.dim(n)]) for n in degs},
    )
    return c, Triangle(f, incl, proj)


def is_iso_kb(f: ChainMap) -> bool:
    c, _ = cone(f)
    return is_contractible(c)


def brutal_truncation_triangle(x: Complex, n: int) -> Triangle:
    """``S^(n-1)(X^-n) -> sigma_{>=1-n} X -> sigma_{>=-n} X -> S^n(X^-n)``.

    The first map is minus the differential ``d^-n``; the second the inclusion;
    the third the projection onto the degree ``-n`` component.
    """
    pres = x.pres
    field = x.field
    top = x.comps.get(-n, ())
    a = Complex(pres, {1 - n: top})
    hi = truncate_ge(x, 1 - n)
    lo = truncate_ge(x, -n)
    f = ChainMap(a, hi, {1 - n: -x.d(-n)})
    i = ChainMap(hi, lo, {k: Mat.identity(field, hi.dim(k)) for k in hi.degrees})
    target = shift(a, 1)
    pi = ChainMap(lo, target, {-n: Mat.identity(field, lo.dim(-n))})
    return Triangle(f, i, pi)


def cohomology_dims(x: Complex) -> dict[int, int]:
    from .exactlin import rank

    out = {}
    for n in x.degrees:
        ker = x.dim(n) - rank(x.d(n))
        im = rank(x.d(n - 1))
        out[n] = ker - im
    return out


def direct_sum_complex(x: Complex, y: Complex) -> Complex:
    field = x.field
    degs = sorted(set(x.degrees) | set(y.degrees))
    comps = {n: x.comps.get(n, ()) + y.comps.get(n, ()) for n in degs}
    diffs = {
        n: Mat.block(field, [[x.d(n), None], [None, y.d(n)]], [x.dim(n + 1), y.dim(n + 1)], [x.dim(n), y.dim(n)])
        for n in degs
    }
    return Complex(x.pres, comps, diffs)


def span_of_classes(h: HomKb, maps: Iterable[ChainMap]) -> int:
    """Dimension of the span of the classes of ``maps`` inside ``h``."""
    span = EchelonSpan(h.field, h.dim)
    for f in maps:
        span.add(h.coords(f))
    return len(span)
