"""Gram matrices, analysis coefficients, Parseval sums and frame-bound estimates.

Everything here works in the new variables ``y``: inner products are
kernel-independent because the integral transform is unitary, so
``<Psi_o_{l,k}, f_o> = <Psi_n_{l,k}, f_n>``.

Gabor atoms are ``exp(1j*y.(a l)) Psi_n(y + b k)`` and wavelet atoms
``2**(sum j/2) Psi_n(2**j y - k)`` (componentwise).  A Gram entry is

    Omega_{l,k} = integral exp(-1j*y.(a l)) conj(Psi_n(y + b k)) Psi_n(y) dy

and factorizes over coordinates for product states.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, RepresentationError, UnsupportedWindowError
from .quadrature import DEFAULT_SPEC, QuadSpec, gauss_legendre_rule, integrate_1d, integrate_iterated, panel_edges
from .synthesis import FactorizedState, SampledField
from .windows import AffineWindow, LatticeSpec, Window1D

__all__ = [
    "GramResult",
    "FrameBounds",
    "NewFunction",
    "CoefficientTable",
    "gram_factor_1d",
    "gram_gabor_factorized",
    "gram_gabor_direct",
    "gram_table",
    "gram_wavelet",
    "wavelet_gram_table",
    "inner_product_from_gram",
    "inner_product_direct",
    "analysis_coefficient",
    "analysis_coefficients",
    "parseval_check",
    "parseval_curve",
    "frame_sum",
    "estimate_frame_bounds_1d",
    "hermite_functions",
    "gaussian_function",
    "box_function",
    "hermite_function",
    "random_gaussians",
]

_CRITICAL = 2 * math.pi
_ON_WINDOWS = ("box", "sinc")


# -- result types -------------------------------------------------------------------


@dataclass
class GramResult:
    """Gram entries ``Omega`` over an index box.

    ``values[i, j]`` holds the entry for ``first[i]`` and ``second[j]``; for
    Gabor tables these are the modulation index ``l`` and the translation
    index ``k``, for wavelet tables the dilation ``j`` and translation ``k``.
    """

    first: list
    second: list
    values: np.ndarray
    method: str
    kind: str = "gabor"

    @property
    def max_deviation(self) -> float:
        """``max |Omega - delta|`` with the delta at both indices zero."""
        dev = self.values.copy()
        zero = tuple(0 for _ in self.first[0])
        i, j = self.first.index(zero), self.second.index(zero)
        dev[i, j] -= 1
        return float(np.max(np.abs(dev)))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "method": self.method,
            "first": [list(t) for t in self.first],
            "second": [list(t) for t in self.second],
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
            "max_deviation": self.max_deviation,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class FrameBounds:
    """Extreme eigenvalues of a compressed, truncated frame operator.

    ``converged`` is true when a run at half the basis size and lattice
    truncation ``N - 2`` moves neither bound by more than 1%.
    """

    lower: float
    upper: float
    basis_size: int
    truncation: int
    converged: bool
    reference: tuple | None = None
    critical: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.upper >= self.lower):
            raise ValueError("frame bounds need lower <= upper")

    @property
    def ratio(self) -> float:
        return self.upper / self.lower if self.lower > 0 else math.inf

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "basis_size": self.basis_size,
            "truncation": self.truncation,
            "converged": self.converged,
            "reference": list(self.reference) if self.reference else None,
            "critical": self.critical,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- test functions in the new variables ----------------------------------------------


@dataclass(frozen=True)
class NewFunction:
    """A function of the new variables with the metadata quadrature needs.

    Attributes
    ----------
    fn : callable
        ``fn(y)`` for ``y`` of shape ``(..., d)``.
    box : tuple of (lo, hi)
        Finite box outside which ``fn`` is negligible (below 1e-17).
    breakpoints : tuple of tuples
        Discontinuities per coordinate.
    bandwidth : float
        Rough largest angular frequency present, used to size panels.
    norm : float or None
        Exact ``L2`` norm when known.
    representation : {"new", "old"}
        Only ``"new"`` is accepted by the analysis routines.
    """

    fn: Callable
    box: tuple
    breakpoints: tuple = ()
    bandwidth: float = 1.0
    norm: float | None = None
    representation: str = "new"
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.box)

    def __call__(self, y):
        return self.fn(np.asarray(y, dtype=float))


def gaussian_function(center, precision, momentum=None, label="gaussian") -> NewFunction:
    """Normalised ``exp(-(y-c)^T Q (y-c)/2 + 1j p.y)`` for positive definite ``Q``."""
    c = np.asarray(center, dtype=float)
    q = np.atleast_2d(np.asarray(precision, dtype=float))
    d = c.size
    p = np.zeros(d) if momentum is None else np.asarray(momentum, dtype=float)
    if q.shape != (d, d) or p.shape != (d,):
        raise DimensionError("center, precision and momentum dimensions differ")
    evals = np.linalg.eigvalsh(q)
    if evals[0] <= 0:
        raise ValueError("precision matrix must be positive definite")
    amp = np.linalg.det(q) ** 0.25 / math.pi ** (d / 4)
    cov_diag = np.sqrt(np.diag(np.linalg.inv(q)))
    # |f|^2 ~ exp(-u^2/var) below 1e-34 beyond 9 standard deviations of the marginal
    reach = 9.0 * cov_diag
    box = tuple((float(ci - r), float(ci + r)) for ci, r in zip(c, reach))

    def fn(y):
        z = y - c
        return amp * np.exp(-0.5 * np.einsum("...i,ij,...j->...", z, q, z) + 1j * (y @ p))

    bw = float(np.max(np.abs(p)) + 4 * math.sqrt(evals[-1]))
    return NewFunction(fn, box, ((),) * d, bw, 1.0, "new", label)


def box_function(cells, label="box combination") -> NewFunction:
    """Finite combination of modulated unit cells.

    ``cells`` is a sequence of ``(coef, corner, modulation)`` where the cell is
    ``prod_j chi_[n_j, n_j+1)(y_j) * exp(2j*pi*m_j*y_j)`` with integer corner
    ``n`` and integer modulation ``m``.  Distinct ``(n, m)`` are orthonormal,
    which gives the exact norm.
    """
    cells = [(complex(c), tuple(int(v) for v in n), tuple(int(v) for v in m)) for c, n, m in cells]
    d = len(cells[0][1])
    keys = [(n, m) for _, n, m in cells]
    if len(set(keys)) != len(keys):
        raise ValueError("cells must be distinct")
    lo = [min(n[j] for _, n, _ in cells) for j in range(d)]
    hi = [max(n[j] for _, n, _ in cells) + 1 for j in range(d)]
    bps = tuple(tuple(float(v) for v in range(lo[j], hi[j] + 1)) for j in range(d))
    norm = math.sqrt(sum(abs(c) ** 2 for c, _, _ in cells))
    bw = 2 * math.pi * (max(abs(v) for _, _, m in cells for v in m) + 1)

    def fn(y):
        out = np.zeros(y.shape[:-1], dtype=complex)
        for c, n, m in cells:
            term = np.full(y.shape[:-1], c)
            for j in range(d):
                t = y[..., j]
                term = term * ((t >= n[j]) & (t < n[j] + 1)) * np.exp(2j * math.pi * m[j] * t)
            out = out + term
        return out

    return NewFunction(fn, tuple((float(a), float(b)) for a, b in zip(lo, hi)), bps, bw, norm, "new", label)


def hermite_functions(n_max: int, y) -> np.ndarray:
    """Orthonormal Hermite functions ``psi_0 .. psi_{n_max-1}`` at ``y``; shape ``(n_max,) + y.shape``.

    Uses the stable three-term recurrence
    ``psi_{n+1} = sqrt(2/(n+1)) y psi_n - sqrt(n/(n+1)) psi_{n-1}``.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((max(n_max, 1),) + y.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * y * y)
    if n_max > 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * y * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out[:n_max]


def hermite_function(orders, label="hermite") -> NewFunction:
    """Product ``psi_{n_1}(y_1) ... psi_{n_d}(y_d)`` of Hermite functions (unit norm)."""
    orders = tuple(int(n) for n in orders)
    top = max(orders)
    reach = math.sqrt(2 * top + 1) + 10.0

    def fn(y):
        out = np.ones(y.shape[:-1])
        for j, n in enumerate(orders):
            out = out * hermite_functions(n + 1, y[..., j])[n]
        return out + 0j

    return NewFunction(fn, ((-reach, reach),) * len(orders), ((),) * len(orders),
                       math.sqrt(2 * top + 1) + 4, 1.0, "new", label)


def random_gaussians(rng: np.random.Generator, dim: int, count: int, spread: float = 1.5) -> list[NewFunction]:
    """Non-separable normalised Gaussians with random centre, covariance and momentum."""
    out = []
    for i in range(count):
        base = rng.normal(size=(dim, dim))
        widths = rng.uniform(0.6, 1.6, size=dim)
        qmat, _ = np.linalg.qr(base)
        prec = qmat @ np.diag(1 / widths**2) @ qmat.T
        center = rng.uniform(-spread, spread, size=dim)
        momentum = rng.uniform(-spread, spread, size=dim)
        out.append(gaussian_function(center, 0.5 * (prec + prec.T), momentum, label=f"gaussian#{i}"))
    return out


# -- one-dimensional Gram factors --------------------------------------------------------


def _plain(w) -> Window1D | None:
    """The base window when ``w`` carries no affine action."""
    if isinstance(w, Window1D):
        return w
    if isinstance(w, AffineWindow) and (w.scale, w.shift, w.modulation, w.amplitude) == (1.0, 0.0, 0.0, 1.0):
        return w.base
    return None


def _exp_integral(omega, lo, hi):
    """``integral_lo^hi exp(-1j*omega*y) dy``."""
    width = hi - lo
    if width <= 0:
        return 0j
    return width * np.exp(-0.5j * omega * (lo + hi)) * np.sinc(omega * width / (2 * math.pi))


def gram_factor_1d(w, a: float, b: float, l: int, k: int, spec: QuadSpec | None = None) -> complex:
    """``integral exp(-1j*y*a*l) conj(h(y + b*k)) h(y) dy`` for one coordinate.

    Closed forms for box, haar (piecewise sums), gauss and sinc (Plancherel);
    other windows go through :func:`integrate_1d`.
    """
    omega, tau = a * l, b * k
    base = _plain(w)
    if base is not None and base.pieces is not None:
        total = 0j
        for plo, phi, pv in base.pieces:
            for qlo, qhi, qv in base.pieces:
                lo = max(float(plo), float(qlo) - tau)
                hi = min(float(phi), float(qhi) - tau)
                if hi > lo:
                    total += pv * qv * _exp_integral(omega, lo, hi)
        return complex(total)
    if base is not None and base.kind == "gauss":
        s = base.sigma
        return complex(np.exp(-(tau**2) / (4 * s * s) - (s * omega) ** 2 / 4 + 0.5j * omega * tau))
    if base is not None and base.kind == "sinc":
        # (1/2pi) integral over [-pi, pi] & [-pi - omega, pi - omega] of exp(-i nu tau)
        lo, hi = max(-math.pi, -math.pi - omega), min(math.pi, math.pi - omega)
        return complex(_exp_integral(tau, lo, hi) / (2 * math.pi)) if hi > lo else 0j
    return _gram_factor_numeric(w, omega, tau, spec)


def _gram_factor_numeric(w, omega, tau, spec):
    lo, hi = w.support
    lo, hi = max(lo, lo - tau), min(hi, hi - tau)
    if not lo < hi:
        return 0j
    pts = tuple(w.breakpoints) + tuple(p - tau for p in w.breakpoints)

    def f(y):
        return np.exp(-1j * omega * y) * np.conj(w(y + tau)) * w(y)

    v, _ = integrate_1d(f, lo, hi, spec, pts)
    return v


def _check_lattice(state, lattice):
    if lattice.dim != state.dim:
        raise DimensionError(f"lattice dim {lattice.dim} differs from state dim {state.dim}")
    if not lattice.is_gabor:
        raise ValueError("Gabor Gram entries need a Gabor-mode lattice")


def _vec(v, d):
    v = tuple(int(t) for t in np.atleast_1d(v))
    if len(v) != d:
        raise DimensionError(f"index vector must have length {d}")
    return v


def gram_gabor_factorized(state: FactorizedState, lattice: LatticeSpec, l, k, spec: QuadSpec | None = None) -> complex:
    """``Omega_{l,k}`` as a product of one-dimensional factors."""
    _check_lattice(state, lattice)
    l, k = _vec(l, state.dim), _vec(k, state.dim)
    out = 1 + 0j
    for j, w in enumerate(state.factors):
        out *= gram_factor_1d(w, lattice.a[j], lattice.b[j], l[j], k[j], spec)
    return out


def _iter_box(state, shifts):
    box, points = [], []
    for j, w in enumerate(state.factors):
        lo, hi = w.support
        t = shifts[j]
        box.append((max(lo, lo - t), min(hi, hi - t)))
        points.append(tuple(w.breakpoints) + tuple(p - t for p in w.breakpoints))
    return box, points


def gram_gabor_direct(kernel, state: FactorizedState, lattice: LatticeSpec, l, k, spec: QuadSpec | None = None) -> complex:
    """``Omega_{l,k}`` by iterated quadrature of the full ``d``-dimensional integrand.

    The kernel only fixes the dimension: the entry is the same for every
    unitary kernel, which is what comparing with
    :func:`gram_gabor_factorized` tests.
    """
    if kernel is not None and kernel.dim != state.dim:
        raise DimensionError("kernel and state dimensions differ")
    _check_lattice(state, lattice)
    l, k = _vec(l, state.dim), _vec(k, state.dim)
    omega = np.array([lattice.a[j] * l[j] for j in range(state.dim)])
    tau = np.array([lattice.b[j] * k[j] for j in range(state.dim)])
    box, points = _iter_box(state, tau)
    if any(not lo < hi for lo, hi in box):
        return 0j

    def f(*ys):
        ys = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in ys])
        y = np.stack(ys, axis=-1)
        return np.exp(-1j * (y @ omega)) * np.conj(state(y + tau)) * state(y)

    v, _ = integrate_iterated(f, box, spec, points)
    return v


def _index_box(d, n):
    return [tuple(t) for t in itertools.product(range(-n, n + 1), repeat=d)]


def gram_table(state: FactorizedState, lattice: LatticeSpec, n: int, method: str = "factorized", kernel=None,
               spec: QuadSpec | None = None) -> GramResult:
    """All ``Omega_{l,k}`` with ``max(|l|, |k|) <= n``."""
    _check_lattice(state, lattice)
    d = state.dim
    idx = _index_box(d, n)
    if method == "factorized":
        tables = []
        for j, w in enumerate(state.factors):
            tables.append({
                (lj, kj): gram_factor_1d(w, lattice.a[j], lattice.b[j], lj, kj, spec)
                for lj in range(-n, n + 1)
                for kj in range(-n, n + 1)
            })
        vals = np.array([[math.prod(tables[j][(l[j], k[j])] for j in range(d)) for k in idx] for l in idx])
    elif method == "direct":
        vals = np.array([[gram_gabor_direct(kernel, state, lattice, l, k, spec) for k in idx] for l in idx])
    else:
        raise ValueError(f"unknown Gram method {method!r}")
    return GramResult(idx, idx, np.asarray(vals, dtype=complex), method)


def inner_product_from_gram(state, lattice, l, k, l2, k2, spec=None) -> complex:
    """``<Psi_{l,k}, Psi_{l2,k2}>`` from one Gram entry via the lattice group law.

    Substituting ``y -> y - b k2`` gives
    ``exp(1j * (a(l - l2)) . (b k2)) * Omega_{l - l2, k - k2}``.
    """
    d = state.dim
    l, k, l2, k2 = (_vec(v, d) for v in (l, k, l2, k2))
    omega = [lattice.a[j] * (l[j] - l2[j]) for j in range(d)]
    phase = sum(omega[j] * lattice.b[j] * k2[j] for j in range(d))
    dl = tuple(l[j] - l2[j] for j in range(d))
    dk = tuple(k[j] - k2[j] for j in range(d))
    return complex(np.exp(1j * phase) * gram_gabor_factorized(state, lattice, dl, dk, spec))


def inner_product_direct(state, lattice, l, k, l2, k2, spec=None) -> complex:
    """``<Psi_{l,k}, Psi_{l2,k2}>`` by iterated quadrature of both atoms."""
    d = state.dim
    l, k, l2, k2 = (_vec(v, d) for v in (l, k, l2, k2))
    first = state.gabor_atoms(lattice, l, k)
    second = state.gabor_atoms(lattice, l2, k2)
    box, points = [], []
    for j in range(d):
        a_lo, a_hi = first.factors[j].support
        b_lo, b_hi = second.factors[j].support
        box.append((max(a_lo, b_lo), min(a_hi, b_hi)))
        points.append(first.factors[j].breakpoints + second.factors[j].breakpoints)
    if any(not lo < hi for lo, hi in box):
        return 0j

    def f(*ys):
        ys = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in ys])
        y = np.stack(ys, axis=-1)
        return np.conj(first(y)) * second(y)

    v, _ = integrate_iterated(f, box, spec, points)
    return v


# -- wavelets ------------------------------------------------------------------------------


def _haar_overlap(base: Window1D, j: int, k: int) -> Fraction:
    """Exact ``integral h(2**j y - k) h(y) dy`` for a piecewise-constant window."""
    scale = Fraction(2) ** j
    total = Fraction(0)
    for plo, phi, pv in base.pieces:
        lo_p, hi_p = (plo + k) / scale, (phi + k) / scale
        for qlo, qhi, qv in base.pieces:
            lo, hi = max(lo_p, qlo), min(hi_p, qhi)
            if hi > lo:
                total += pv * qv * (hi - lo)
    return total


def gram_wavelet(state: FactorizedState, j, k, spec: QuadSpec | None = None) -> complex:
    """``prod_m 2**(j_m/2) integral conj(h_m(2**j_m y - k_m)) h_m(y) dy``.

    Piecewise-constant windows (haar) are integrated exactly in rational
    arithmetic, so vanishing entries are exactly zero.
    """
    d = state.dim
    j, k = _vec(j, d), _vec(k, d)
    out = 1 + 0j
    for m, w in enumerate(state.factors):
        base = _plain(w)
        if base is not None and base.pieces is not None:
            exact = _haar_overlap(base, j[m], k[m])
            if exact == 0:
                return 0j
            out *= 2.0 ** (j[m] / 2) * float(exact)
            continue
        if not w.has_fourier and w.support[0] == -math.inf:
            raise UnsupportedWindowError("wavelet Gram needs a compactly supported or analytic window")
        dil = w.shifted(scale=2.0 ** j[m], shift=-float(k[m]), amplitude=2.0 ** (j[m] / 2))
        lo = max(w.support[0], dil.support[0])
        hi = min(w.support[1], dil.support[1])
        if not lo < hi:
            return 0j
        v, _ = integrate_1d(lambda y: np.conj(dil(y)) * w(y), lo, hi, spec, w.breakpoints + dil.breakpoints)
        out *= v
    return out


def wavelet_gram_table(state: FactorizedState, n: int, spec: QuadSpec | None = None) -> GramResult:
    """All ``Omega~_{j,k}`` with ``max(|j|, |k|) <= n``."""
    idx = _index_box(state.dim, n)
    vals = np.array([[gram_wavelet(state, j, k, spec) for k in idx] for j in idx], dtype=complex)
    return GramResult(idx, idx, vals, "exact" if all(_plain(w) is not None and _plain(w).pieces for w in state.factors)
                      else "quadrature", "wavelet")


# -- analysis coefficients -------------------------------------------------------------------


@dataclass
class CoefficientTable:
    """Analysis coefficients ``c[l, k] = <Psi_{l,k}, f>`` for ``max(|l|, |k|) <= n``.

    ``values`` has shape ``(2n+1,) * 2d`` ordered ``(l_1..l_d, k_1..k_d)``
    with index ``-n`` at position 0.
    """

    n: int
    values: np.ndarray
    norm_sq: float
    error: float = 0.0

    def coefficient(self, l, k) -> complex:
        return complex(self.values[tuple(v + self.n for v in tuple(l) + tuple(k))])

    def partial_sum(self, m: int) -> float:
        """``sum |c|^2`` over ``max(|l|, |k|) <= m``."""
        if not 0 <= m <= self.n:
            raise ValueError(f"need 0 <= m <= {self.n}")
        sl = tuple(slice(self.n - m, self.n + m + 1) for _ in range(self.values.ndim))
        return float(np.sum(np.abs(self.values[sl]) ** 2))


def _require_new(f):
    rep = getattr(f, "representation", None)
    if isinstance(f, SampledField):
        rep = f.meta.get("representation", "new")
    if rep == "old":
        raise RepresentationError("analysis needs the function in the new (y) representation")


def _atom_rate(w, a, n):
    base = w.base if isinstance(w, AffineWindow) else w
    r = abs(a) * n + abs(getattr(w, "modulation", 0.0))
    if base.kind == "sinc":
        r += math.pi
    elif base.kind == "gauss":
        r += 6.0 / base.sigma
    return r + 1.0


def _atom_matrix(w, a, b, n, nodes, weights):
    """``conj(atom_{l,k}(y)) * weight`` with rows ordered ``(l, k)``, ``(2n+1)**2 x len(nodes)``."""
    rows = []
    for l in range(-n, n + 1):
        mod = np.exp(-1j * a * l * nodes)
        for k in range(-n, n + 1):
            rows.append(mod * np.conj(w(nodes + b * k)) * weights)
    return np.asarray(rows)


def _nodes_for(f_box, f_bps, w, b, n, rate, order=20):
    lo, hi = f_box
    wlo, whi = w.support
    shifts = [b * k for k in range(-n, n + 1)]
    if math.isfinite(wlo):
        lo = max(lo, wlo - max(shifts))
    if math.isfinite(whi):
        hi = min(hi, whi - min(shifts))
    if not lo < hi:
        return np.zeros(0), np.zeros(0)
    bps = set(float(p) for p in f_bps)
    for t in shifts:
        bps.update(p - t for p in w.breakpoints)
    edges = panel_edges(lo, hi, sorted(bps), 4 * math.pi / rate)
    return gauss_legendre_rule(edges, order)


def _table_new_function(f, state, lattice, n, order=20):
    d = state.dim
    mats, grids = [], []
    for j, w in enumerate(state.factors):
        rate = _atom_rate(w, lattice.a[j], n) + f.bandwidth
        bps = f.breakpoints[j] if j < len(f.breakpoints) else ()
        nodes, weights = _nodes_for(f.box[j], bps, w, lattice.b[j], n, rate, order)
        if nodes.size == 0:
            return np.zeros((2 * n + 1,) * (2 * d), dtype=complex), 0.0
        mats.append(_atom_matrix(w, lattice.a[j], lattice.b[j], n, nodes, weights))
        grids.append((nodes, weights))
    y = np.stack(np.meshgrid(*[g[0] for g in grids], indexing="ij"), axis=-1)
    tensor = f(y)
    # sequential reduction: integrate out y_d, then y_{d-1}, ..., then y_1
    t = tensor
    for j in range(d - 1, -1, -1):
        t = np.tensordot(mats[j], t, axes=([1], [d - 1]))
    wts = np.ones(())
    for g in grids:
        wts = np.multiply.outer(wts, g[1])
    norm_sq = float(np.sum(np.abs(tensor) ** 2 * wts))
    shape = (2 * n + 1, 2 * n + 1) * d
    vals = t.reshape(shape)
    perm = [2 * j for j in range(d)] + [2 * j + 1 for j in range(d)]
    return np.transpose(vals, perm), norm_sq


def _table_sampled(f: SampledField, state, lattice, n):
    d = state.dim
    mats = []
    for j, w in enumerate(state.factors):
        ax = f.axes[j]
        wts = np.ones(1) if ax.size == 1 else np.diff(ax, prepend=ax[0]) * 0.5 + np.diff(ax, append=ax[-1]) * 0.5
        mats.append(_atom_matrix(w, lattice.a[j], lattice.b[j], n, ax, wts))
    t = f.values
    for j in range(d - 1, -1, -1):
        t = np.tensordot(mats[j], t, axes=([1], [d - 1]))
    vals = t.reshape((2 * n + 1, 2 * n + 1) * d)
    perm = [2 * j for j in range(d)] + [2 * j + 1 for j in range(d)]
    return np.transpose(vals, perm), f.norm() ** 2


def _coeff_1d(w, g, a, b, l, k, spec):
    """``integral conj(exp(1j*a*l*y) w(y + b*k)) g(y) dy``."""
    atom = w.shifted(shift=b * k, modulation=a * l)
    lo = max(atom.support[0], g.support[0])
    hi = min(atom.support[1], g.support[1])
    if not lo < hi:
        return 0j
    pts = tuple(atom.breakpoints) + tuple(g.breakpoints)
    if g.kind == "gauss" or atom.kind == "gauss":
        # both ranges are effectively finite
        for win in (atom, g):
            if win.kind == "gauss":
                r = win.base.decay_radius
                lo, hi = max(lo, (-r - win.shift) / win.scale), min(hi, (r - win.shift) / win.scale)
        if not lo < hi:
            return 0j
    v, _ = integrate_1d(lambda y: np.conj(atom(y)) * g(y), lo, hi, spec, pts)
    return v


def _table_factorized(f: FactorizedState, state, lattice, n, spec):
    d = state.dim
    tables = []
    for j, w in enumerate(state.factors):
        tab = np.empty((2 * n + 1, 2 * n + 1), dtype=complex)
        for il, l in enumerate(range(-n, n + 1)):
            for ik, k in enumerate(range(-n, n + 1)):
                tab[il, ik] = _coeff_1d(w, f.factors[j], lattice.a[j], lattice.b[j], l, k, spec)
        tables.append(tab)
    # outer product ordered (l_1, k_1, l_2, k_2, ...) then permuted
    out = tables[0]
    for tab in tables[1:]:
        out = np.multiply.outer(out, tab)
    perm = [2 * j for j in range(d)] + [2 * j + 1 for j in range(d)]
    norm_sq = 1.0
    for g in f.factors:
        if g.norm_hint is None:
            lo, hi = g.support
            v, _ = integrate_1d(lambda y: np.abs(g(y)) ** 2 + 0j, lo, hi, spec, g.breakpoints)
            norm_sq *= v.real
        else:
            norm_sq *= g.norm_hint**2
    return np.transpose(out, perm), norm_sq


def analysis_coefficients(f, state: FactorizedState, lattice: LatticeSpec, n: int,
                          spec: QuadSpec | None = None, check: bool = False) -> CoefficientTable:
    """Analysis coefficients over the index box ``max(|l|, |k|) <= n``.

    Parameters
    ----------
    f : NewFunction, FactorizedState or SampledField
        The analysed function in the new variables.
    state, lattice : FactorizedState, LatticeSpec
        Generator and Gabor lattice.
    n : int
        Truncation.
    check : bool
        For :class:`NewFunction` inputs, repeat with an order-12 rule and
        store the largest coefficient difference in ``error``.

    Raises
    ------
    RepresentationError
        If ``f`` is tagged as an old-representation function.
    """
    _require_new(f)
    _check_lattice(state, lattice)
    if n < 0:
        raise ValueError("truncation must be non-negative")
    spec = spec or DEFAULT_SPEC
    if isinstance(f, FactorizedState):
        if f.dim != state.dim:
            raise DimensionError("function and state dimensions differ")
        vals, norm_sq = _table_factorized(f, state, lattice, n, spec)
        return CoefficientTable(n, vals, norm_sq)
    if isinstance(f, SampledField):
        if f.dim != state.dim:
            raise DimensionError("function and state dimensions differ")
        vals, norm_sq = _table_sampled(f, state, lattice, n)
        return CoefficientTable(n, vals, norm_sq)
    if f.dim != state.dim:
        raise DimensionError("function and state dimensions differ")
    vals, norm_sq = _table_new_function(f, state, lattice, n)
    if f.norm is not None:
        norm_sq = f.norm**2
    err = 0.0
    if check:
        low, _ = _table_new_function(f, state, lattice, n, order=12)
        err = float(np.max(np.abs(low - vals), initial=0.0))
    return CoefficientTable(n, vals, norm_sq, err)


def analysis_coefficient(f, state: FactorizedState, lattice: LatticeSpec, l, k, spec: QuadSpec | None = None) -> complex:
    """``<Psi_{l,k}, f>`` in the new variables, reduced one coordinate at a time.

    For product inputs the chain collapses to a product of 1-D integrals;
    otherwise ``f`` is sampled on a tensor Gauss-Legendre grid and the
    coordinates are integrated out from the last to the first.
    """
    _require_new(f)
    _check_lattice(state, lattice)
    d = state.dim
    l, k = _vec(l, d), _vec(k, d)
    if isinstance(f, FactorizedState):
        if f.dim != d:
            raise DimensionError("function and state dimensions differ")
        out = 1 + 0j
        for j, w in enumerate(state.factors):
            out *= _coeff_1d(w, f.factors[j], lattice.a[j], lattice.b[j], l[j], k[j], spec or DEFAULT_SPEC)
        return complex(out)
    if f.dim != d:
        raise DimensionError("function and state dimensions differ")
    # a one-index coefficient is the table with the atoms moved to the origin of the index box
    atoms = FactorizedState(
        tuple(w.shifted(shift=lattice.b[j] * k[j], modulation=lattice.a[j] * l[j]) for j, w in enumerate(state.factors))
    )
    if isinstance(f, SampledField):
        vals, _ = _table_sampled(f, atoms, lattice, 0)
    else:
        vals, _ = _table_new_function(f, atoms, lattice, 0)
    return complex(vals.reshape(-1)[0])


def parseval_curve(f, state, lattice, n: int, spec: QuadSpec | None = None) -> list[float]:
    """``parseval_check`` at every truncation ``0..n`` from a single coefficient table."""
    table = analysis_coefficients(f, state, lattice, n, spec)
    if not table.norm_sq > 0:
        raise ValueError("function has zero norm")
    return [table.partial_sum(m) / table.norm_sq for m in range(n + 1)]


def parseval_check(f, state, lattice, n: int, spec: QuadSpec | None = None) -> float:
    """``sum_{max(|l|,|k|) <= n} |<Psi_{l,k}, f>|^2 / ||f||^2``."""
    return parseval_curve(f, state, lattice, n, spec)[-1]


@dataclass(frozen=True)
class FrameSum:
    value: float
    truncation: int
    shell_fraction: float

    @property
    def truncation_dominated(self) -> bool:
        """True when the outermost index shell still carries over 1% of the sum."""
        return self.value < 1e-9 or self.shell_fraction > 0.01


def frame_sum(f, state, lattice, n: int, spec: QuadSpec | None = None, report: bool = False):
    """Frame-operator quadratic form ``sum |<Psi_{l,k}, f>|^2 / ||f||^2``.

    Same number as :func:`parseval_check`; for frames it is bracketed by the
    lower and upper frame bounds.  With ``report=True`` returns a
    :class:`FrameSum` whose ``truncation_dominated`` flag marks sums that are
    tiny or still growing at the outer shell.
    """
    table = analysis_coefficients(f, state, lattice, n, spec)
    if not table.norm_sq > 0:
        raise ValueError("function has zero norm")
    total = table.partial_sum(n)
    value = total / table.norm_sq
    if not report:
        return value
    inner = table.partial_sum(n - 1) if n > 0 else 0.0
    shell = (total - inner) / total if total > 0 else 1.0
    return FrameSum(value, n, shell)


# -- frame bounds ----------------------------------------------------------------------------


def _frame_extremes(w, a, b, m, n):
    # Hermite basis dilated by sqrt(b/a) so its phase-space disc matches the lattice cell shape
    scale = math.sqrt(b / a)
    reach = scale * (math.sqrt(2 * m + 1) + 10.0)
    lo, hi = -reach, reach
    shifts = [b * k for k in range(-n, n + 1)]
    bps = sorted({p - t for t in shifts for p in w.breakpoints if lo < p - t < hi})
    rate = _atom_rate(w, a, n) + (math.sqrt(2 * m + 1) + 2) / scale
    edges = panel_edges(lo, hi, bps, 4 * math.pi / rate)
    nodes, weights = gauss_legendre_rule(edges)
    phi = _atom_matrix(w, a, b, n, nodes, weights)
    basis = hermite_functions(m, nodes / scale) / math.sqrt(scale)
    gmat = phi @ basis.T
    s = gmat.conj().T @ gmat
    ev = np.linalg.eigvalsh(0.5 * (s + s.conj().T))
    return float(ev[0]), float(ev[-1])


def _extrapolated(w, a, b, m, n):
    # truncation error of the lattice sum is O(1/N) for discontinuous windows
    # (|h^|^2 ~ 1/w^2 tails) and negligible for smooth ones; one Richardson step
    coarse = _frame_extremes(w, a, b, m, n)
    fine = _frame_extremes(w, a, b, m, 2 * n)
    return tuple(2 * f - c for c, f in zip(coarse, fine)), fine


def estimate_frame_bounds_1d(w, a: float, b: float, basis_size: int = 32, truncation: int = 6,
                             spec: QuadSpec | None = None, extrapolate: bool = True) -> FrameBounds:
    """Estimate Gabor frame bounds of ``{exp(1j*y*a*l) w(y + b*k)}``.

    The frame operator truncated to ``max(|l|, |k|) <= truncation`` is
    compressed onto the first ``basis_size`` Hermite functions dilated by
    ``sqrt(b/a)`` (an orthonormal basis adapted to the lattice); its extreme
    eigenvalues estimate ``(A, B)``.  With ``extrapolate`` (default) the
    truncation is also doubled and one Richardson step in ``1/truncation``
    removes the leading truncation error, which is first order for
    discontinuous windows such as box and Haar; the lower estimate is capped
    at the upper one, which truncation can only underestimate.  A second
    estimate at ``(basis_size // 2, truncation - 2)`` decides ``converged``
    (both bounds within 1%).

    Raises
    ------
    ValueError
        If ``a*b`` exceeds ``2*pi`` (no Gabor frame exists).

    Warns
    -----
    RuntimeWarning
        At the critical density ``a*b == 2*pi`` for windows other than box
        and sinc, where Gabor systems are at best complete.
    """
    if not (a > 0 and b > 0):
        raise ValueError("lattice steps must be positive")
    if basis_size < 1 or truncation < 0:
        raise ValueError("need basis_size >= 1 and truncation >= 0")
    density = a * b
    if density > _CRITICAL * (1 + 1e-12):
        raise ValueError(f"a*b = {density:.6g} exceeds 2*pi: no Gabor frame exists")
    critical = abs(density - _CRITICAL) <= 1e-12 * _CRITICAL
    kind = (w.base if isinstance(w, AffineWindow) else w).kind
    if critical and kind not in _ON_WINDOWS:
        warnings.warn("a*b = 2*pi: Gabor systems at critical density are not frames in general",
                      RuntimeWarning, stacklevel=2)

    def estimate(m, n):
        if extrapolate and n >= 1:
            return _extrapolated(w, a, b, m, n)
        raw = _frame_extremes(w, a, b, m, n)
        return raw, raw

    (lower, upper), raw = estimate(basis_size, truncation)
    reference, converged = None, False
    if basis_size >= 2 and truncation >= 2:
        ref = estimate(basis_size // 2, truncation - 2)[0]
        reference = ref
        converged = abs(lower - ref[0]) <= 0.01 * abs(lower) and abs(upper - ref[1]) <= 0.01 * abs(upper)
    lower = min(lower, upper)
    return FrameBounds(lower, upper, basis_size, truncation, bool(converged), reference, critical,
                       {"window": w.name, "a": a, "b": b, "extrapolated": bool(extrapolate and truncation >= 1),
                        "unextrapolated": list(raw)})
