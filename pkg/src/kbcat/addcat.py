"""Finite additive categories given by a faithful linear realization.

A presentation lists indecomposable objects with the dimension of an
underlying vector space, and for each ordered pair of objects a basis of the
Hom space realized as matrices ``dim(tgt) x dim(src)``.  Objects of the additive
category are formal direct sums (tuples of labels); morphisms store the
block-assembled realized matrix, so composition is a single matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from .exactlin import EchelonSpan, Field, LinearSolver, Mat, independent_subset


class UnknownLabel(KeyError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class HomBasisElement:
    label: str
    real: Mat


@dataclass(frozen=True)
class Check:
    """One line of a validation report."""

    name: str
    ok: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[Check] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(ok), detail))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


class CategoryPresentation:
    """Indecomposables, Hom bases and their realizing matrices.

    ``homs`` maps ``(src, tgt)`` to a list of ``HomBasisElement``; missing pairs
    have zero Hom space.
    """

    def __init__(
        self,
        field: Field,
        objects: Sequence[tuple[str, int]],
        homs: Mapping[tuple[str, str], Sequence[HomBasisElement]],
        name: str = "",
    ):
        self.field = field
        self.name = name
        self.labels = tuple(lbl for lbl, _ in objects)
        self.dims = {lbl: int(d) for lbl, d in objects}
        if len(self.dims) != len(self.labels):
            raise ValueError("duplicate object labels")
        for lbl, d in self.dims.items():
            if d <= 0:
                raise ValueError(f"object {lbl!r} must have positive dimension")
        self.homs: dict[tuple[str, str], tuple[HomBasisElement, ...]] = {}
        for (s, t), basis in homs.items():
            if s not in self.dims or t not in self.dims:
                raise UnknownLabel(f"Hom({s}, {t}) names an unknown object")
            self.homs[(s, t)] = tuple(basis)
        self._solvers: dict[tuple[str, str], LinearSolver] = {}

    def __repr__(self) -> str:
        return f"CategoryPresentation({self.name or '?'}, {self.field}, {list(self.labels)})"

    def dim(self, label: str) -> int:
        try:
            return self.dims[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def basis(self, s: str, t: str) -> tuple[HomBasisElement, ...]:
        self.dim(s), self.dim(t)
        return self.homs.get((s, t), ())

    def coords(self, s: str, t: str, m: Mat) -> np.ndarray | None:
        """Coordinates of a realized block in the Hom(s, t) basis (None if outside the span)."""
        key = (s, t)
        solver = self._solvers.get(key)
        if solver is None:
            basis = self.basis(s, t)
            cols = [b.real.flat() for b in basis]
            n = self.dim(s) * self.dim(t)
            arr = self.field.zeros(n, len(cols))
            for j, c in enumerate(cols):
                arr[:, j] = c
            solver = LinearSolver(Mat(self.field, arr, _trusted=True))
            self._solvers[key] = solver
        return solver.solve(m.flat())

    def obj(self, *labels: str) -> "Obj":
        return Obj(self, tuple(labels))

    def zero_obj(self) -> "Obj":
        return Obj(self, ())


@dataclass(frozen=True)
class Obj:
    """Formal direct sum of indecomposables; the empty tuple is the zero object."""

    pres: CategoryPresentation = dc_field(compare=False, repr=False)
    summands: tuple[str, ...] = ()

    def __post_init__(self):
        for s in self.summands:
            self.pres.dim(s)

    @property
    def sizes(self) -> list[int]:
        return [self.pres.dim(s) for s in self.summands]

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    def __add__(self, other: "Obj") -> "Obj":
        return Obj(self.pres, self.summands + other.summands)

    def __str__(self) -> str:
        return "+".join(self.summands) if self.summands else "0"


@dataclass(frozen=True)
class Mor:
    src: Obj
    tgt: Obj
    real: Mat

    def __post_init__(self):
        if self.real.shape != (self.tgt.dim, self.src.dim):
            raise ShapeMismatch(
                f"realization has shape {self.real.shape}, expected {(self.tgt.dim, self.src.dim)}"
            )

    @property
    def pres(self) -> CategoryPresentation:
        return self.src.pres

    def blocks(self):
        """Yield ``(i, j, s, t, block)`` for target summand i and source summand j."""
        r0 = 0
        for i, t in enumerate(self.tgt.summands):
            rs = self.pres.dim(t)
            c0 = 0
            for j, s in enumerate(self.src.summands):
                cs = self.pres.dim(s)
                yield i, j, s, t, Mat(self.pres.field, self.real.a[r0 : r0 + rs, c0 : c0 + cs].copy(), _trusted=True)
                c0 += cs
            r0 += rs

    def in_span(self) -> bool:
        return all(self.pres.coords(s, t, b) is not None for _, _, s, t, b in self.blocks())

    def __add__(self, other: "Mor") -> "Mor":
        return Mor(self.src, self.tgt, self.real + other.real)

    def __neg__(self) -> "Mor":
        return Mor(self.src, self.tgt, -self.real)

    def scale(self, c) -> "Mor":
        return Mor(self.src, self.tgt, self.real.scale(c))

    def is_zero(self) -> bool:
        return self.real.is_zero()


DEBUG = False


def compose(g: Mor, f: Mor) -> Mor:
    """``g o f``."""
    if g.src.summands != f.tgt.summands:
        raise ShapeMismatch(f"cannot compose {g.src} <- {f.tgt}")
    out = Mor(f.src, g.tgt, g.real @ f.real)
    if DEBUG and not out.in_span():
        raise ShapeMismatch("composite leaves the Hom span; presentation is not closed")
    return out


def identity(x: Obj) -> Mor:
    return Mor(x, x, Mat.identity(x.pres.field, x.dim))


def zero_mor(x: Obj, y: Obj) -> Mor:
    return Mor(x, y, Mat.zeros(x.pres.field, y.dim, x.dim))


def direct_sum(f: Mor, g: Mor) -> Mor:
    field = f.pres.field
    real = Mat.block(
        field,
        [[f.real, None], [None, g.real]],
        [f.tgt.dim, g.tgt.dim],
        [f.src.dim, g.src.dim],
    )
    return Mor(f.src + g.src, f.tgt + g.tgt, real)


def block_elementary(x: Obj, y: Obj, i: int, j: int, m: Mat) -> Mat:
    """Realized matrix Y <- X that is ``m`` in block (i, j) and zero elsewhere."""
    field = x.pres.field
    out = field.zeros(y.dim, x.dim)
    r0 = sum(y.sizes[:i])
    c0 = sum(x.sizes[:j])
    out[r0 : r0 + m.rows, c0 : c0 + m.cols] = m.a
    return Mat(field, out, _trusted=True)


def hom_space(p: CategoryPresentation, x: Obj, y: Obj) -> list[Mor]:
    """Block-elementary basis of Hom(X, Y): source summand, then target summand, then basis order."""
    out = []
    for j, s in enumerate(x.summands):
        for i, t in enumerate(y.summands):
            for b in p.basis(s, t):
                out.append(Mor(x, y, block_elementary(x, y, i, j, b.real)))
    return out


def hom_dim(p: CategoryPresentation, x: Obj, y: Obj) -> int:
    return sum(len(p.basis(s, t)) for s in x.summands for t in y.summands)


def validate_presentation(p: CategoryPresentation) -> ValidationReport:
    rep = ValidationReport()
    field = p.field
    for (s, t), basis in sorted(p.homs.items()):
        shape_ok = all(b.real.shape == (p.dim(t), p.dim(s)) for b in basis)
        rep.add(f"shape Hom({s},{t})", shape_ok)
        if not shape_ok:
            continue
        n = p.dim(s) * p.dim(t)
        idx = independent_subset(field, n, [b.real.flat() for b in basis])
        rep.add(f"faithful Hom({s},{t})", len(idx) == len(basis), f"rank {len(idx)} of {len(basis)}")
    if not rep.ok:
        return rep
    for lbl in p.labels:
        ident = Mat.identity(field, p.dim(lbl))
        rep.add(f"identity in End({lbl})", p.coords(lbl, lbl, ident) is not None)
    for (s, t), b1 in sorted(p.homs.items()):
        for (t2, u), b2 in sorted(p.homs.items()):
            if t2 != t:
                continue
            bad = [
                (x.label, y.label)
                for x in b1
                for y in b2
                if p.coords(s, u, y.real @ x.real) is None
            ]
            rep.add(f"closure Hom({t},{u})oHom({s},{t})", not bad, f"outside span: {bad}" if bad else "")
    return rep


def presentation_from_json(doc: dict, name: str = "") -> CategoryPresentation:
    fdoc = doc.get("field", {"kind": "Q"})
    kind = str(fdoc.get("kind", "Q"))
    field = Field("Q") if kind.upper() == "Q" else Field("Fp", int(fdoc["p"]))
    objects = [(o["label"], int(o["dim"])) for o in doc["objects"]]
    homs = {}
    for h in doc.get("homs", []):
        basis = [HomBasisElement(b["label"], Mat(field, b["matrix"])) for b in h["basis"]]
        homs[(h["src"], h["tgt"])] = basis
    return CategoryPresentation(field, objects, homs, name=name)


def presentation_to_json(p: CategoryPresentation) -> dict:
    return {
        "field": p.field.to_json(),
        "objects": [{"label": lbl, "dim": p.dims[lbl]} for lbl in p.labels],
        "homs": [
            {"src": s, "tgt": t, "basis": [{"label": b.label, "matrix": b.real.to_json()} for b in basis]}
            for (s, t), basis in p.homs.items()
        ],
    }


def span_contains(field: Field, n: int, vectors, v) -> bool:
    span = EchelonSpan(field, n)
    for w in vectors:
        span.add(w)
    return span.contains(v)
