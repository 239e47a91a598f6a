"""Quadratic-phase integral kernels ``K(x; y) = C * exp(1j * Phi(x, y))``.

``Phi(x, y) = x^T A y + y^T B y + x^T D x + lx . x + ly . y``; the three
catalog kernels belong to the catalog symplectic maps of :mod:`canonical`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CatalogError, DimensionError

__all__ = ["QuadraticPhaseKernel", "kernel_eval", "catalog_kernel", "KERNEL_NAMES", "unitary_amplitude"]

KERNEL_NAMES = ("hall42", "landau44", "simple46")


def _frozen(a, shape):
    arr = np.array(a, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuadraticPhaseKernel:
    """Amplitude plus phase coefficients of a quadratic-phase kernel.

    Attributes
    ----------
    dim : int
    amplitude : complex
        Constant ``C``.
    cross : ndarray (d, d)
        ``A`` in ``x^T A y``.
    yy, xx : ndarray (d, d)
        Symmetric ``B`` and ``D``.
    linear_x, linear_y : ndarray (d,)
    label : str
        Name of the symplectic map the kernel belongs to.
    name : str
    """

    dim: int
    amplitude: complex
    cross: np.ndarray
    yy: np.ndarray
    xx: np.ndarray
    linear_x: np.ndarray
    linear_y: np.ndarray
    label: str = ""
    name: str = ""

    def __post_init__(self):
        d = self.dim
        for attr, shape in (("cross", (d, d)), ("yy", (d, d)), ("xx", (d, d)), ("linear_x", (d,)), ("linear_y", (d,))):
            val = np.asarray(getattr(self, attr), dtype=float)
            if val.shape != shape:
                raise DimensionError(f"{attr} must have shape {shape}, got {val.shape}")
            object.__setattr__(self, attr, _frozen(val, shape))
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        for attr in ("yy", "xx"):
            m = getattr(self, attr)
            if np.max(np.abs(m - m.T), initial=0.0) > 1e-14:
                raise ValueError(f"{attr} must be symmetric")

    def phase(self, x, y):
        """``Phi(x, y)`` with broadcasting over leading axes (last axis is the coordinate)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[-1:] != (self.dim,) or y.shape[-1:] != (self.dim,):
            raise DimensionError(f"points must have length {self.dim}")
        return (
            np.einsum("...i,ij,...j->...", x, self.cross, y)
            + np.einsum("...i,ij,...j->...", y, self.yy, y)
            + np.einsum("...i,ij,...j->...", x, self.xx, x)
            + x @ self.linear_x
            + y @ self.linear_y
        )

    def __call__(self, x, y):
        return self.amplitude * np.exp(1j * self.phase(x, y))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "amplitude": {"re": self.amplitude.real, "im": self.amplitude.imag},
            "cross": self.cross.tolist(),
            "yy": self.yy.tolist(),
            "xx": self.xx.tolist(),
            "linear_x": self.linear_x.tolist(),
            "linear_y": self.linear_y.tolist(),
            "label": self.label,
            "name": self.name,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "QuadraticPhaseKernel":
        amp = data["amplitude"]
        return cls(
            int(data["dim"]),
            complex(amp["re"], amp["im"]),
            data["cross"],
            data["yy"],
            data["xx"],
            data["linear_x"],
            data["linear_y"],
            data.get("label", ""),
            data.get("name", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "QuadraticPhaseKernel":
        return cls.from_dict(json.loads(text))


def kernel_eval(k: QuadraticPhaseKernel, x, y) -> complex:
    """``K(x; y)`` at single points ``x`` and ``y`` of length ``d``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (k.dim,) or y.shape != (k.dim,):
        raise DimensionError(f"x and y must have length {k.dim}")
    return complex(k(x, y))


def unitary_amplitude(k: QuadraticPhaseKernel) -> float:
    """``sqrt(|det A| / (2 pi)^d)``, the modulus making ``y -> K(., y)`` unitary."""
    return math.sqrt(abs(np.linalg.det(k.cross)) / (2 * math.pi) ** k.dim)


def _zeros(d):
    return np.zeros((d, d)), np.zeros(d)


def catalog_kernel(name: str) -> QuadraticPhaseKernel:
    """Built-in kernels ``hall42``, ``landau44`` and ``simple46``."""
    if name == "hall42":
        # x1y1 + x2y2 - y1y2 - x1x2/2
        return QuadraticPhaseKernel(
            2,
            1 / (2 * math.pi),
            np.eye(2),
            [[0, -0.5], [-0.5, 0]],
            [[0, -0.25], [-0.25, 0]],
            np.zeros(2),
            np.zeros(2),
            "hall2d",
            name,
        )
    if name == "landau44":
        # x1y1 + y2(x2 - x1)
        z, v = _zeros(2)
        return QuadraticPhaseKernel(2, 1 / (2 * math.pi), [[1, -1], [0, 1]], z, z, v, v, "landau2d", name)
    if name == "simple46":
        # -(y1(x1+x2) + y2(x2+x3) + y3(x1+x3)); |det A| = 2 fixes C = 1/(2 pi^(3/2))
        z, v = _zeros(3)
        cross = -np.array([[1, 0, 1], [1, 1, 0], [0, 1, 1]], dtype=float)
        return QuadraticPhaseKernel(3, 1 / (2 * math.pi**1.5), cross, z, z, v, v, "simple3d", name)
    raise CatalogError("kernel", name, KERNEL_NAMES)
