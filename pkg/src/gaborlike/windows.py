"""One-dimensional windows, their Fourier transforms and the 1-D families they generate.

Fourier convention: ``fourier(w, omega) = integral of h(t) exp(-1j*omega*t) dt``
with no normalising factor.

Catalog windows (all unit L2 norm)::

    box    chi_[0,1)
    sinc   sin(pi x) / (pi x)
    gauss  exp(-x**2 / (2 sigma**2)) / (pi**0.25 * sqrt(sigma))
    haar   +1 on [0, 1/2), -1 on [1/2, 1)

Breakpoints are left-closed: ``box(1.0) == 0`` and ``haar(0.5) == -1``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CatalogError, DimensionError, UnsupportedWindowError

__all__ = [
    "WINDOW_NAMES",
    "Window1D",
    "AffineWindow",
    "LatticeSpec",
    "make_window",
    "load_tabulated",
    "window_eval",
    "window_fourier",
    "gabor_element",
    "wavelet_element",
    "expm1_over",
]

WINDOW_NAMES = ("box", "sinc", "gauss", "haar")
_ALIASES = {"gaussian": "gauss", "chi": "box"}


def expm1_over(z):
    """``(exp(1j*z) - 1) / z`` with its limit ``1j`` at ``z = 0``."""
    z = np.asarray(z, dtype=float)
    return 1j * np.exp(0.5j * z) * np.sinc(z / (2 * np.pi))


@dataclass(frozen=True, eq=False)
class Window1D:
    """A named 1-D window ``h``.

    Use :func:`make_window` or :func:`load_tabulated` rather than the
    constructor.  Instances are callable and vectorised.
    """

    kind: str
    sigma: float = 1.0
    samples_x: np.ndarray | None = field(default=None, repr=False)
    samples_h: np.ndarray | None = field(default=None, repr=False)

    @property
    def name(self) -> str:
        if self.kind == "gauss" and self.sigma != 1.0:
            return f"gauss(sigma={self.sigma:g})"
        return self.kind

    @property
    def support(self) -> tuple[float, float]:
        if self.kind in ("box", "haar"):
            return (0.0, 1.0)
        if self.kind == "tabulated":
            return (float(self.samples_x[0]), float(self.samples_x[-1]))
        return (-math.inf, math.inf)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        if self.kind == "box":
            return (0.0, 1.0)
        if self.kind == "haar":
            return (0.0, 0.5, 1.0)
        if self.kind == "tabulated":
            return tuple(float(v) for v in self.samples_x)
        return ()

    @property
    def fourier_support(self) -> tuple[float, float]:
        """Interval outside which the Fourier transform vanishes."""
        if self.kind == "sinc":
            return (-math.pi, math.pi)
        return (-math.inf, math.inf)

    @property
    def pieces(self) -> tuple[tuple[Fraction, Fraction, int], ...] | None:
        """Exact ``(lo, hi, value)`` description of piecewise-constant windows."""
        if self.kind == "box":
            return ((Fraction(0), Fraction(1), 1),)
        if self.kind == "haar":
            return ((Fraction(0), Fraction(1, 2), 1), (Fraction(1, 2), Fraction(1), -1))
        return None

    @property
    def norm_hint(self) -> float | None:
        return None if self.kind == "tabulated" else 1.0

    @property
    def decay_radius(self) -> float:
        """Distance from the origin beyond which ``|h|`` is below 1e-17 (gauss only)."""
        if self.kind == "gauss":
            return 9.0 * self.sigma
        lo, hi = self.support
        return max(abs(lo), abs(hi))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "box":
            return ((x >= 0) & (x < 1)).astype(float)
        if self.kind == "haar":
            return np.where((x >= 0) & (x < 0.5), 1.0, 0.0) - np.where((x >= 0.5) & (x < 1), 1.0, 0.0)
        if self.kind == "sinc":
            return np.sinc(x)
        if self.kind == "gauss":
            s = self.sigma
            return np.exp(-0.5 * (x / s) ** 2) / (math.pi**0.25 * math.sqrt(s))
        return np.interp(x, self.samples_x, self.samples_h, left=0.0, right=0.0)

    def fourier(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.kind == "box":
            # (1 - exp(-i w)) / (i w)
            return np.exp(-0.5j * w) * np.sinc(w / (2 * np.pi))
        if self.kind == "haar":
            # (1 - exp(-i w/2))**2 / (i w)
            return 0.25j * w * np.exp(-0.5j * w) * np.sinc(w / (4 * np.pi)) ** 2
        if self.kind == "sinc":
            return np.where(np.abs(w) <= np.pi, 1.0 + 0j, 0j)
        if self.kind == "gauss":
            s = self.sigma
            return (math.sqrt(2 * s) * math.pi**0.25 * np.exp(-0.5 * (s * w) ** 2)).astype(complex)
        raise UnsupportedWindowError("tabulated windows have no analytic Fourier transform")

    @property
    def has_fourier(self) -> bool:
        return self.kind != "tabulated"

    def shifted(self, *, scale: float = 1.0, shift: float = 0.0, modulation: float = 0.0, amplitude: float = 1.0):
        return AffineWindow(self, scale, shift, modulation, amplitude)


@dataclass(frozen=True)
class AffineWindow:
    """``g(y) = amplitude * exp(1j*modulation*y) * h(scale*y + shift)`` for a base window ``h``.

    Gabor atoms ``exp(i y a l) h(y + b k)`` and wavelet atoms
    ``2**(j/2) h(2**j y - k)`` are both of this form.
    """

    base: Window1D
    scale: float = 1.0
    shift: float = 0.0
    modulation: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def kind(self):
        return self.base.kind

    @property
    def name(self):
        return self.base.name

    def _inv(self, t):
        return (t - self.shift) / self.scale

    @property
    def support(self):
        lo, hi = self.base.support
        return (self._inv(lo), self._inv(hi))

    @property
    def breakpoints(self):
        return tuple(self._inv(t) for t in self.base.breakpoints)

    @property
    def fourier_support(self):
        lo, hi = self.base.fourier_support
        return (self.modulation + self.scale * lo, self.modulation + self.scale * hi)

    @property
    def has_fourier(self):
        return self.base.has_fourier

    @property
    def decay_radius(self):
        r = self.base.decay_radius
        return (abs(self.shift) + r) / self.scale

    @property
    def norm_hint(self):
        n = self.base.norm_hint
        return None if n is None else abs(self.amplitude) * n / math.sqrt(self.scale)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return self.amplitude * np.exp(1j * self.modulation * y) * self.base(self.scale * y + self.shift)

    def fourier(self, omega):
        # substitute s = scale*y + shift
        nu = (np.asarray(omega, dtype=float) - self.modulation) / self.scale
        return (self.amplitude / self.scale) * np.exp(1j * nu * self.shift) * self.base.fourier(nu)

    def shifted(self, *, scale=1.0, shift=0.0, modulation=0.0, amplitude=1.0):
        # g(scale*y + shift) * amplitude * exp(i modulation y) composed with self
        return AffineWindow(
            self.base,
            self.scale * scale,
            self.scale * shift + self.shift,
            self.modulation * scale + modulation,
            self.amplitude * amplitude * np.exp(1j * self.modulation * shift),
        )


def make_window(name: str, sigma: float = 1.0) -> Window1D:
    """Catalog window by name (``box``, ``sinc``, ``gauss``, ``haar``)."""
    key = _ALIASES.get(name, name)
    if key not in WINDOW_NAMES:
        raise CatalogError("window", name, WINDOW_NAMES)
    if key == "gauss" and not sigma > 0:
        raise ValueError("gaussian width must be positive")
    return Window1D(key, float(sigma) if key == "gauss" else 1.0)


def load_tabulated(source) -> Window1D:
    """Window from a two-column ``x,h`` CSV file (header row optional).

    The window is linearly interpolated between samples and zero outside.
    """
    xs, hs = [], []
    with open(source, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                xs.append(float(row[0]))
                hs.append(float(row[1]))
            except ValueError:
                if xs:
                    raise
                continue  # header
    return tabulated(xs, hs)


def tabulated(xs: Sequence[float], hs: Sequence[float]) -> Window1D:
    xs = np.asarray(xs, dtype=float)
    hs = np.asarray(hs, dtype=float)
    if xs.ndim != 1 or xs.shape != hs.shape or xs.size < 2:
        raise DimensionError("tabulated window needs two equal-length columns with >= 2 rows")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("tabulated x samples must be strictly increasing")
    xs.setflags(write=False)
    hs.setflags(write=False)
    return Window1D("tabulated", 1.0, xs, hs)


def window_eval(w, x):
    """Pointwise value of ``w`` at ``x``."""
    return w(x)


def window_fourier(w, omega):
    """Analytic Fourier transform ``integral h(t) exp(-i omega t) dt``."""
    return w.fourier(omega)


def gabor_element(w, a: float, b: float, l: int, k: int, x):
    """``exp(1j*x*a*l) * h(x + b*k)``."""
    x = np.asarray(x, dtype=float)
    return np.exp(1j * x * a * l) * w(x + b * k)


def wavelet_element(w, j: int, k: int, x):
    """``2**(j/2) * h(2**j * x - k)``."""
    x = np.asarray(x, dtype=float)
    return 2.0 ** (j / 2) * w(2.0**j * x - k)


@dataclass(frozen=True)
class LatticeSpec:
    """Per-dimension lattice: Gabor steps ``(a_j, b_j)`` or dyadic wavelet.

    ``mode[j]`` is ``"gabor"`` or ``"wavelet"``; ``a[j]``/``b[j]`` are only
    meaningful in Gabor mode.
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    mode: tuple[str, ...]

    def __post_init__(self):
        if not (len(self.a) == len(self.b) == len(self.mode)):
            raise DimensionError("lattice a, b and mode must have equal length")
        for a, b, m in zip(self.a, self.b, self.mode):
            if m not in ("gabor", "wavelet"):
                raise ValueError(f"unknown lattice mode {m!r}")
            if m == "gabor" and not (a > 0 and b > 0):
                raise ValueError("Gabor lattice steps must be positive")

    @property
    def dim(self) -> int:
        return len(self.mode)

    @property
    def is_gabor(self) -> bool:
        return all(m == "gabor" for m in self.mode)

    @classmethod
    def gabor(cls, a, b, dim: int | None = None) -> "LatticeSpec":
        if np.ndim(a) == 0:
            a = (float(a),) * (dim or (1 if np.ndim(b) == 0 else len(b)))
        if np.ndim(b) == 0:
            b = (float(b),) * len(a)
        return cls(tuple(float(v) for v in a), tuple(float(v) for v in b), ("gabor",) * len(a))

    @classmethod
    def wavelet(cls, dim: int) -> "LatticeSpec":
        return cls((1.0,) * dim, (1.0,) * dim, ("wavelet",) * dim)
