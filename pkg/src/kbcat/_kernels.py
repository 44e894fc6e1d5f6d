"""Row-reduction kernels.

Two interchangeable paths compute the reduced row echelon form:

* ``rref_modp`` is a numba ``@njit`` loop over ``int64`` arrays for small prime
  fields;
* ``rref_generic`` is pure numpy with vectorised row operations and works for
  any element type the field supports (``Fraction`` object arrays included).

The numba path is used for prime fields unless ``KBCAT_PURE_NUMPY=1`` is set in
the environment or numba cannot be imported.  ``set_backend`` switches at
runtime (tests and the benchmark use it).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


_backend = "numpy" if os.environ.get("KBCAT_PURE_NUMPY", "") not in ("", "0") else "numba"
if not HAVE_NUMBA:
    _backend = "numpy"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    prev, _backend = _backend, name
    return prev


@njit(cache=True)
def _inv_modp(a, p):
    # extended Euclid; a is nonzero mod p
    t, new_t = 0, 1
    r, new_r = p, a % p
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@njit(cache=True)
def rref_modp(a, p):
    """In-place RREF of an int64 matrix over F_p. Returns the pivot columns."""
    rows, cols = a.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    npiv = 0
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _inv_modp(a[r, c], p)
        for j in range(c, cols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(rows):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                for j in range(c, cols):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[npiv] = c
        npiv += 1
        r += 1
    return pivots[:npiv]


def rref_generic(a: np.ndarray, inv, norm) -> list[int]:
    """In-place RREF with numpy row operations.

    ``inv`` inverts a nonzero scalar; ``norm`` reduces an array to canonical
    representatives (``% p`` for prime fields, identity for rationals).
    """
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = norm(a[r] * inv(a[r, c]))
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col != 0)
        if hit.size:
            a[hit] = norm(a[hit] - np.outer(col[hit], a[r]))
        pivots.append(c)
        r += 1
    return pivots
