"""Exact linear algebra over the rationals or a prime field.

Matrices are small and dense.  Rational entries are ``fractions.Fraction``
objects in numpy object arrays; prime-field entries are least nonnegative
residues, stored as ``int64`` when the characteristic is small enough for
products to fit, otherwise as Python ints in object arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

# p below this bound keeps every dot product of length <= 2**13 inside int64
_INT64_PRIME_BOUND = 2**25


class SubspaceNotContained(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """The ground field: ``Field("Q")`` or ``Field("Fp", p)``."""

    kind: str = "Q"
    p: int | None = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.p is not None:
                raise ValueError("the rationals carry no characteristic")
        elif self.kind == "Fp":
            if self.p is None or not _is_prime(int(self.p)):
                raise ValueError(f"characteristic must be prime, got {self.p!r}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``"q"`` / ``"Q"`` or ``"fp:7"``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls("Q")
        if t.startswith("fp:"):
            return cls("Fp", int(t[3:]))
        raise ValueError(f"cannot parse field {text!r}")

    @property
    def dtype(self):
        if self.kind == "Fp" and self.p < _INT64_PRIME_BOUND:
            return np.int64
        return object

    @property
    def uses_int64(self) -> bool:
        return self.dtype is np.int64

    def __str__(self) -> str:
        return "Q" if self.kind == "Q" else f"F{self.p}"

    def to_json(self) -> dict:
        return {"kind": "Q"} if self.kind == "Q" else {"kind": "Fp", "p": self.p}

    # scalars

    def __call__(self, x) -> Fraction | int:
        if isinstance(x, str):
            return self.parse_element(x)
        if self.kind == "Q":
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def parse_element(self, s: str):
        return self(Fraction(s.strip()))

    def format(self, x) -> str:
        if self.kind == "Q":
            return str(Fraction(x))
        return str(int(x) % self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "Q":
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)

    def div(self, x, y):
        return self(self(x) * self.inv(y))

    def norm(self, arr):
        """Reduce an array (or scalar) to canonical representatives."""
        if self.kind == "Q":
            return arr
        return arr % self.p

    def is_square(self, x) -> bool:
        x = self(x)
        if self.kind == "Q":
            if x < 0:
                return False
            n, d = x.numerator, x.denominator
            return _isqrt_exact(n) is not None and _isqrt_exact(d) is not None
        if self.p == 2 or x == 0:
            return True
        return pow(int(x), (self.p - 1) // 2, self.p) == 1

    # arrays

    def array(self, data, shape=None) -> np.ndarray:
        a = np.asarray(data, dtype=object)
        if shape is not None:
            a = a.reshape(shape)
        out = np.empty(a.shape, dtype=self.dtype)
        flat_in = a.reshape(-1)
        flat_out = out.reshape(-1)
        for i, x in enumerate(flat_in):
            flat_out[i] = self(x)
        return out

    def zeros(self, *shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(self.zero)
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = self.one
        return out


def _isqrt_exact(n: int) -> int | None:
    import math

    r = math.isqrt(n)
    return r if r * r == n else None


QQ = Field("Q")


def GF(p: int) -> Field:
    return Field("Fp", p)


class Mat:
    """Immutable dense matrix over a ``Field``."""

    __slots__ = ("field", "a")

    def __init__(self, field: Field, data, shape=None, *, _trusted=False):
        if _trusted:
            a = data
        elif isinstance(data, np.ndarray) and data.dtype == field.dtype and shape is None:
            a = field.norm(data.copy()) if field.kind == "Fp" else data.copy()
            if field.kind == "Q":
                a = field.array(a)
        else:
            a = field.array(data, shape)
        if a.ndim != 2:
            raise ValueError(f"matrix data must be 2-dimensional, got shape {a.shape}")
        a.flags.writeable = False
        self.field = field
        self.a = a

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Mat":
        return cls(field, field.zeros(rows, cols), _trusted=True)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        return cls(field, field.eye(n), _trusted=True)

    @classmethod
    def block(cls, field: Field, blocks, row_sizes, col_sizes) -> "Mat":
        """Assemble from a nested list of blocks; ``None`` means a zero block."""
        out = field.zeros(sum(row_sizes), sum(col_sizes))
        r0 = 0
        for i, rs in enumerate(row_sizes):
            c0 = 0
            for j, cs in enumerate(col_sizes):
                b = blocks[i][j]
                if b is not None:
                    if b.shape != (rs, cs):
                        raise ValueError(f"block ({i},{j}) has shape {b.shape}, expected {(rs, cs)}")
                    out[r0 : r0 + rs, c0 : c0 + cs] = b.a
                c0 += cs
            r0 += rs
        return cls(field, out, _trusted=True)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def _wrap(self, a) -> "Mat":
        return Mat(self.field, self.field.norm(a), _trusted=True)

    def _check(self, other: "Mat"):
        if not isinstance(other, Mat):
            return NotImplemented
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        return None

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return Mat.zeros(self.field, self.rows, other.cols)
        return self._wrap(self.a @ other.a)

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return self._wrap(self.a + other.a)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return self._wrap(self.a - other.a)

    def __neg__(self) -> "Mat":
        return self._wrap(-self.a)

    def scale(self, c) -> "Mat":
        return self._wrap(self.a * self.field(c))

    def __rmul__(self, c) -> "Mat":
        return self.scale(c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.all(self.a == other.a))

    def __hash__(self) -> int:
        return hash((self.field, self.shape, tuple(self.a.reshape(-1).tolist())))

    @property
    def T(self) -> "Mat":
        return Mat(self.field, self.a.T.copy(), _trusted=True)

    def is_zero(self) -> bool:
        return self.a.size == 0 or not bool(np.any(self.a != 0))

    def flat(self) -> np.ndarray:
        return self.a.reshape(-1)

    def tolist(self) -> list[list]:
        return self.a.tolist()

    def to_json(self) -> list[list[str]]:
        return [[self.field.format(x) for x in row] for row in self.a]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.field.format(x) for x in row) for row in self.a)
        return f"Mat<{self.field}>[{body}]"


def as_mat(field: Field, m) -> Mat:
    return m if isinstance(m, Mat) else Mat(field, m)


def rref(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a copy of ``a`` and its pivot columns."""
    work = np.array(a, dtype=field.dtype, copy=True)
    if work.size == 0:
        return work, []
    if field.uses_int64 and _kernels.get_backend() == "numba":
        piv = _kernels.rref_modp(work, field.p)
        return work, [int(c) for c in piv]
    piv = _kernels.rref_generic(work, field.inv, field.norm)
    return work, piv


def rank(m: Mat) -> int:
    return len(rref(m.field, m.a)[1])


def _kernel_from_rref(field: Field, r: np.ndarray, piv: list[int], ncols: int) -> list[np.ndarray]:
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = field.zeros(ncols)
        v[f] = field.one
        for i, pc in enumerate(piv):
            if r[i, f] != 0:
                v[pc] = field.norm(-r[i, f])
        basis.append(v)
    return basis


def kernel_basis(m: Mat) -> list[np.ndarray]:
    """Basis of the right null space, one vector per free column, in column order.

    Each vector has a 1 in its free column and zeros in the other free columns,
    so the list is in reduced column echelon form.
    """
    r, piv = rref(m.field, m.a)
    return _kernel_from_rref(m.field, r, piv, m.cols)


def solve(m: Mat, b) -> np.ndarray | None:
    """Canonical solution of ``m x = b`` (free variables zero), or ``None``."""
    field = m.field
    b = field.array(list(np.asarray(b, dtype=object).reshape(-1)))
    if b.shape[0] != m.rows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {m.rows}")
    aug = np.empty((m.rows, m.cols + 1), dtype=field.dtype)
    aug[:, : m.cols] = m.a
    aug[:, m.cols] = b
    r, piv = rref(field, aug)
    if piv and piv[-1] == m.cols:
        return None
    x = field.zeros(m.cols)
    for i, pc in enumerate(piv):
        x[pc] = r[i, m.cols]
    return x


class LinearSolver:
    """Factor ``m`` once, then solve ``m x = b`` for many right-hand sides.

    Keeps the transform ``t`` with ``t @ m = rref(m)``; a solve is then one
    matrix-vector product plus a consistency test on the zero rows.
    """

    def __init__(self, m: Mat):
        field = m.field
        self.field = field
        self.rows, self.cols = m.shape
        aug = np.empty((self.rows, self.cols + self.rows), dtype=field.dtype)
        aug[:, : self.cols] = m.a
        aug[:, self.cols :] = field.eye(self.rows)
        r, piv = rref(field, aug)
        self.pivots = [c for c in piv if c < self.cols]
        self.rank = len(self.pivots)
        self._t = r[:, self.cols :]
        self._r = r[:, : self.cols]

    def solve(self, b) -> np.ndarray | None:
        field = self.field
        b = np.asarray(b, dtype=field.dtype).reshape(-1)
        if b.shape[0] != self.rows:
            raise ValueError(f"right-hand side has length {b.shape[0]}, expected {self.rows}")
        x = field.zeros(self.cols)
        if self.rows == 0:
            return x
        tb = field.norm(self._t @ b)
        if np.any(tb[self.rank :] != 0):
            return None
        for i, pc in enumerate(self.pivots):
            x[pc] = tb[i]
        return x

    def kernel(self) -> list[np.ndarray]:
        return _kernel_from_rref(self.field, self._r, self.pivots, self.cols)


class EchelonSpan:
    """Incrementally maintained row-reduced basis of a subspace of ``field^n``."""

    def __init__(self, field: Field, n: int):
        self.field = field
        self.n = n
        self._rows: list[np.ndarray] = []
        self._piv: list[int] = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v) -> np.ndarray:
        field = self.field
        w = np.array(v, dtype=field.dtype, copy=True).reshape(-1)
        if w.shape[0] != self.n:
            raise ValueError(f"vector has length {w.shape[0]}, expected {self.n}")
        for row, pc in zip(self._rows, self._piv):
            if w[pc] != 0:
                w = field.norm(w - w[pc] * row)
        return w

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v) != 0)

    def add(self, v) -> bool:
        """Add ``v``; returns True iff it was independent of the current span."""
        field = self.field
        w = self.reduce(v)
        nz = np.flatnonzero(w != 0)
        if nz.size == 0:
            return False
        pc = int(nz[0])
        w = field.norm(w * field.inv(w[pc]))
        for i, row in enumerate(self._rows):
            if row[pc] != 0:
                self._rows[i] = field.norm(row - row[pc] * w)
        self._rows.append(w)
        self._piv.append(pc)
        return True


def quotient_basis(field: Field, ambient_dim: int, subspace: Sequence, total: Sequence) -> list[np.ndarray]:
    """Vectors of ``total`` whose classes form a basis of span(total)/span(subspace)."""
    return [total[i] for i in quotient_indices(field, ambient_dim, subspace, total)]


def quotient_indices(
    field: Field,
    ambient_dim: int,
    subspace: Sequence,
    total: Sequence,
) -> list[int]:
    """Indices into ``total`` of representatives of a basis of span(total)/span(subspace).

    Selection is greedy in input order.  Raises ``SubspaceNotContained`` when a
    subspace vector is outside span(total).
    """
    tot = EchelonSpan(field, ambient_dim)
    for v in total:
        tot.add(v)
    for v in subspace:
        if not tot.contains(v):
            raise SubspaceNotContained("subspace vector outside span(total)")
    span = EchelonSpan(field, ambient_dim)
    for v in subspace:
        span.add(v)
    chosen = []
    for i, v in enumerate(total):
        if span.add(v):
            chosen.append(i)
    return chosen


def independent_subset(field: Field, n: int, vectors: Iterable) -> list[int]:
    """Indices of the greedy maximal independent subset."""
    span = EchelonSpan(field, n)
    return [i for i, v in enumerate(vectors) if span.add(v)]
