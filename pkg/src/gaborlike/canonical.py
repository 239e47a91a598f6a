"""Linear canonical transformations stored as exact symplectic matrices.

Coordinates are stacked as ``(x_1, ..., x_d, p_1, ..., p_d)`` and a map's
matrix takes the old stacked vector to the new one; hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CatalogError, DimensionError

__all__ = ["SymplecticMap", "symplectic_form", "check_symplectic", "catalog_map", "MAP_NAMES"]

MAP_NAMES = ("hall2d", "landau2d", "simple3d")

_TOL = 1e-12


def symplectic_form(dim: int) -> np.ndarray:
    """The block matrix ``J = [[0, I], [-I, 0]]`` of order ``2*dim``."""
    eye = np.eye(dim)
    zero = np.zeros((dim, dim))
    return np.block([[zero, eye], [-eye, zero]])


def _as_fractions(matrix):
    def conv(v):
        return v if isinstance(v, (Fraction, int)) else Fraction(float(v))

    return tuple(tuple(conv(v) for v in row) for row in matrix)


@dataclass(frozen=True)
class SymplecticMap:
    """A 2d x 2d real matrix sending old phase-space coordinates to new ones."""

    dim: int
    entries: tuple[tuple[Fraction, ...], ...]
    label: str = ""

    def __post_init__(self):
        n = len(self.entries)
        if n % 2 or any(len(row) != n for row in self.entries):
            raise DimensionError("symplectic map matrix must be square of even order")
        if n != 2 * self.dim:
            raise DimensionError(f"dim={self.dim} needs a {2 * self.dim}x{2 * self.dim} matrix")

    @classmethod
    def from_matrix(cls, matrix, label: str = "") -> "SymplecticMap":
        arr = np.asarray(matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise DimensionError(f"expected a square matrix of even order, got shape {arr.shape}")
        return cls(arr.shape[0] // 2, _as_fractions(matrix), label)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def compose(self, other: "SymplecticMap") -> "SymplecticMap":
        """Matrix product ``self @ other`` (apply ``other`` first)."""
        if other.dim != self.dim:
            raise DimensionError("cannot compose maps of different dimension")
        n = 2 * self.dim
        prod = tuple(
            tuple(sum((self.entries[i][m] * other.entries[m][j] for m in range(n)), Fraction(0)) for j in range(n))
            for i in range(n)
        )
        return SymplecticMap(self.dim, prod, f"{self.label}*{other.label}")

    def inverse(self) -> "SymplecticMap":
        """Exact inverse ``-J S^T J``, valid for symplectic ``S``."""
        d, n = self.dim, 2 * self.dim
        jm = [[Fraction(0)] * n for _ in range(n)]
        for i in range(d):
            jm[i][d + i] = Fraction(1)
            jm[d + i][i] = Fraction(-1)
        st = [[self.entries[j][i] for j in range(n)] for i in range(n)]

        def mul(a, b):
            return [[sum((a[i][m] * b[m][j] for m in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]

        inv = mul(mul(jm, st), jm)
        return SymplecticMap(d, tuple(tuple(-v for v in row) for row in inv), f"{self.label}^-1")


def check_symplectic(smap) -> bool:
    """True iff ``S^T J S == J`` entrywise within 1e-12.

    Accepts a :class:`SymplecticMap` or a raw matrix.
    """
    s = smap.matrix if isinstance(smap, SymplecticMap) else np.asarray(smap, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise DimensionError(f"expected a square matrix of even order, got shape {s.shape}")
    j = symplectic_form(s.shape[0] // 2)
    return bool(np.max(np.abs(s.T @ j @ s - j)) <= _TOL)


def _rows(d, rows):
    """Build a map from ``{new_coord: {old_coord: coeff}}`` with names like 'x1', 'p3'."""
    names = [f"x{i + 1}" for i in range(d)] + [f"p{i + 1}" for i in range(d)]
    mat = [[Fraction(0)] * (2 * d) for _ in range(2 * d)]
    for new, combo in rows.items():
        for old, coeff in combo.items():
            mat[names.index(new)][names.index(old)] = Fraction(coeff)
    return tuple(tuple(r) for r in mat)


_H = Fraction(1, 2)

_CATALOG = {
    # quantum Hall symmetric-gauge map
    "hall2d": (2, {
        "x1": {"p1": 1, "x2": _H},
        "x2": {"p2": 1, "x1": _H},
        "p1": {"p2": 1, "x1": -_H},
        "p2": {"p1": 1, "x2": -_H},
    }),
    "landau2d": (2, {
        "x1": {"p1": 1, "p2": 1},
        "x2": {"p2": 1},
        "p1": {"x1": -1},
        "p2": {"x1": 1, "x2": -1},
    }),
    "simple3d": (3, {
        "x1": {"p3": _H, "p1": -_H, "p2": -_H},
        "x2": {"p1": _H, "p2": -_H, "p3": -_H},
        "x3": {"p2": _H, "p1": -_H, "p3": -_H},
        "p1": {"x1": 1, "x2": 1},
        "p2": {"x2": 1, "x3": 1},
        "p3": {"x3": 1, "x1": 1},
    }),
}


def catalog_map(name: str) -> SymplecticMap:
    """One of the built-in maps: ``hall2d``, ``landau2d`` or ``simple3d``."""
    try:
        d, rows = _CATALOG[name]
    except KeyError:
        raise CatalogError("symplectic map", name, MAP_NAMES) from None
    return SymplecticMap(d, _rows(d, rows), name)
