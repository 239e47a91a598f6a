"""Old-representation functions ``Psi_o(x) = integral K(x; y) Psi_n(y) dy`` from factorized states.

Every catalog kernel has a phase that is linear in most ``y_j``.  Those
coordinates are integrated analytically through the window's Fourier
transform, ``integral g(t) exp(1j*w*t) dt = g.fourier(-w)``, and at most one
coordinate is left for numerical quadrature.  The plan is derived from the
``yy`` block of the kernel, so user kernels with more coupling fall back to
nested quadrature automatically.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DimensionError
from .kernel import QuadraticPhaseKernel
from .quadrature import (
    DEFAULT_SPEC,
    QuadSpec,
    gauss_legendre_rule,
    integrate_1d,
    integrate_batch,
    integrate_iterated,
    panel_edges,
)
from .windows import AffineWindow, LatticeSpec, make_window

__all__ = [
    "FactorizedState",
    "SampledField",
    "ReductionPlan",
    "reduction_plan",
    "synthesize",
    "synthesize_grid",
    "basis_element",
    "wavelet_basis_element",
]


def _affine(w) -> AffineWindow:
    return w if isinstance(w, AffineWindow) else AffineWindow(w)


@dataclass(frozen=True)
class FactorizedState:
    """Product state ``Psi_n(y) = h_1(y_1) * ... * h_d(y_d)``."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(_affine(w) for w in self.factors))
        if not self.factors:
            raise DimensionError("a state needs at least one factor")

    @classmethod
    def of(cls, *names: str, sigma: float = 1.0) -> "FactorizedState":
        """State from catalog window names, e.g. ``FactorizedState.of("box", "sinc")``."""
        return cls(tuple(make_window(n, sigma) for n in names))

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(w.name for w in self.factors)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape[-1:] != (self.dim,):
            raise DimensionError(f"points must have length {self.dim}")
        out = np.ones(y.shape[:-1], dtype=complex)
        for j, w in enumerate(self.factors):
            out = out * w(y[..., j])
        return out

    def gabor_atoms(self, lattice: LatticeSpec, l, k) -> "FactorizedState":
        """Factors ``exp(1j*y_j*a_j*l_j) * h_j(y_j + b_j*k_j)``."""
        l, k = _indices(l, self.dim), _indices(k, self.dim)
        if lattice.dim != self.dim:
            raise DimensionError("lattice and state dimensions differ")
        if not lattice.is_gabor:
            raise ValueError("gabor_atoms needs a Gabor-mode lattice")
        return FactorizedState(
            tuple(
                w.shifted(shift=lattice.b[j] * k[j], modulation=lattice.a[j] * l[j])
                for j, w in enumerate(self.factors)
            )
        )

    def wavelet_atoms(self, j, k) -> "FactorizedState":
        """Factors ``2**(j_m/2) * h_m(2**j_m * y_m - k_m)``."""
        j, k = _indices(j, self.dim), _indices(k, self.dim)
        return FactorizedState(
            tuple(
                w.shifted(scale=2.0 ** j[m], shift=-float(k[m]), amplitude=2.0 ** (j[m] / 2))
                for m, w in enumerate(self.factors)
            )
        )


def _indices(v, d):
    v = tuple(int(t) for t in np.atleast_1d(v))
    if len(v) != d:
        raise DimensionError(f"index vector must have length {d}, got {len(v)}")
    return v


# -- sampled fields ---------------------------------------------------------------


@dataclass
class SampledField:
    """Complex values on a tensor grid.

    ``values[i1, ..., id]`` belongs to ``(axes[0][i1], ..., axes[d-1][id])``.
    """

    axes: tuple
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        for a in self.axes:
            if a.ndim != 1 or a.size < 1 or np.any(np.diff(a) <= 0):
                raise ValueError("grid axes must be non-empty and strictly increasing")
        shape = tuple(a.size for a in self.axes)
        vals = np.asarray(self.values, dtype=complex)
        if vals.size != math.prod(shape):
            raise DimensionError(f"{vals.size} values do not fill a grid of shape {shape}")
        self.values = vals.reshape(shape)

    @property
    def dim(self) -> int:
        return len(self.axes)

    def points(self) -> np.ndarray:
        """Grid nodes in row-major order, shape ``(N, d)``."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def norm(self) -> float:
        """Trapezoidal ``L2`` norm (axes of length one contribute weight one)."""
        dens = np.abs(self.values) ** 2
        for a in self.axes:
            wa = np.ones(1) if a.size == 1 else _trapezoid_weights(a)
            dens = np.tensordot(wa, dens, axes=([0], [0]))
        return float(math.sqrt(dens))

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(self.dim)] + ["re", "im", "abs"])
        flat = self.values.ravel()
        for p, v in zip(self.points(), flat):
            writer.writerow([_fmt(t) for t in p] + [_fmt(v.real), _fmt(v.imag), _fmt(abs(v))])
        text = buf.getvalue()
        if target is not None:
            Path(target).write_text(text)
        return text

    def to_dict(self) -> dict:
        flat = self.values.ravel()
        return {
            "dim": self.dim,
            "axes": [a.tolist() for a in self.axes],
            "re": flat.real.tolist(),
            "im": flat.imag.tolist(),
            "meta": self.meta,
        }

    def to_json(self, target=None) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        if target is not None:
            Path(target).write_text(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "SampledField":
        data = json.loads(text)
        vals = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(tuple(data["axes"]), vals, dict(data.get("meta", {})))

    @classmethod
    def from_csv(cls, text: str) -> "SampledField":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], [r for r in rows[1:] if r]
        d = len(header) - 3
        arr = np.asarray(body, dtype=float)
        axes = tuple(np.unique(arr[:, i]) for i in range(d))
        return cls(axes, arr[:, d] + 1j * arr[:, d + 1])


def _fmt(v: float) -> str:
    return "%.17g" % v


def _trapezoid_weights(a):
    h = np.diff(a)
    w = np.zeros_like(a)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


# -- reduction plan -------------------------------------------------------------


@dataclass(frozen=True)
class ReductionPlan:
    """Which coordinates are integrated numerically; the rest go through ``fourier``."""

    numeric: tuple[int, ...]
    analytic: tuple[int, ...]


def _slow(w) -> bool:
    lo, hi = w.support
    return not (math.isfinite(lo) and math.isfinite(hi)) and w.kind != "gauss"


def reduction_plan(kernel: QuadraticPhaseKernel, state: FactorizedState) -> ReductionPlan:
    """Smallest set of numeric coordinates leaving a linear phase in all others.

    A coordinate can be done analytically when its window has a Fourier
    transform and the ``yy`` block couples it to no other analytic
    coordinate (itself included).  Ties prefer numeric coordinates whose
    integration range is finite.
    """
    d = state.dim
    b = kernel.yy
    can = [state.factors[j].has_fourier for j in range(d)]
    for size in range(d + 1):
        best, best_score = None, None
        for numeric in itertools.combinations(range(d), size):
            analytic = [j for j in range(d) if j not in numeric]
            if not all(can[j] for j in analytic):
                continue
            if any(b[i, j] != 0 for i in analytic for j in analytic):
                continue
            score = 0
            for i in numeric:
                restricted = any(
                    b[i, j] != 0 and math.isfinite(state.factors[j].fourier_support[1]) for j in analytic
                )
                score += _slow(state.factors[i]) and not restricted
            if best_score is None or score < best_score:
                best, best_score = (tuple(numeric), tuple(analytic)), score
        if best is not None:
            return ReductionPlan(*best)
    raise AssertionError("unreachable: all-numeric plan always exists")


def _full_plan(d):
    return ReductionPlan(tuple(range(d)), ())


# -- scalar synthesis -----------------------------------------------------------


def _check(kernel, state, x):
    x = np.asarray(x, dtype=float)
    if not (kernel.dim == state.dim == x.shape[-1]):
        raise DimensionError(f"kernel dim {kernel.dim}, state dim {state.dim} and point length {x.shape[-1]} differ")
    return x


def _effective_range(w, truncate):
    lo, hi = w.support
    if w.kind == "gauss":
        r = w.base.decay_radius
        lo, hi = (-r - w.shift) / w.scale, (r - w.shift) / w.scale
    elif truncate is not None and not (math.isfinite(lo) and math.isfinite(hi)):
        c = -w.shift / w.scale
        lo, hi = max(lo, c - truncate), min(hi, c + truncate)
    return lo, hi


def _rate(kernel, state, c, numeric, analytic, ranges):
    """Rough phase rate of the integrand, used to size quadrature pieces."""
    b = kernel.yy
    r = 0.0
    for i in numeric:
        span = max(abs(v) for v in ranges[i]) if all(math.isfinite(v) for v in ranges[i]) else 0.0
        r += abs(c[i]) + abs(state.factors[i].modulation) + 2 * abs(b[i, i]) * span
        for j in analytic:
            r += 2 * abs(b[i, j]) * (abs(state.factors[j].shift) + 1) / state.factors[j].scale
    return r


def _one_numeric(kernel, state, x, c, i, analytic, spec, truncate):
    b = kernel.yy
    g = state.factors[i]
    lo, hi = _effective_range(g, truncate)
    for j in analytic:
        flo, fhi = state.factors[j].fourier_support
        if not (math.isfinite(flo) or math.isfinite(fhi)):
            continue
        # analytic factor needs -c_j - 2 b_ij t in [flo, fhi]
        slope, off = -2 * b[i, j], -c[j]
        if slope == 0:
            if not flo <= off <= fhi:
                return 0j
            continue
        t1, t2 = (flo - off) / slope, (fhi - off) / slope
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    if not lo < hi:
        return 0j

    def f(t):
        t = np.asarray(t, dtype=float)
        val = g(t) * np.exp(1j * (c[i] * t + b[i, i] * t * t))
        for j in analytic:
            val = val * state.factors[j].fourier(-(c[j] + 2 * b[i, j] * t))
        return val

    rate = _rate(kernel, state, c, (i,), analytic, {i: (lo, hi)})
    use = spec if rate <= 2 * math.pi or spec.oscillation_hint else _with_hint(spec, rate)
    value, _ = integrate_1d(f, lo, hi, use, g.breakpoints)
    return value


def _with_hint(spec, rate):
    from dataclasses import replace

    return replace(spec, oscillation_hint=rate)


def _nested(kernel, state, x, c, plan, spec, truncate):
    b = kernel.yy
    numeric, analytic = plan.numeric, plan.analytic
    box = [_effective_range(state.factors[i], truncate) for i in numeric]
    points = [state.factors[i].breakpoints for i in numeric]

    def f(*ys):
        ys = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in ys])
        val = np.ones(ys[0].shape, dtype=complex)
        phase = np.zeros(ys[0].shape)
        for a, i in enumerate(numeric):
            val = val * state.factors[i](ys[a])
            phase = phase + c[i] * ys[a]
            for a2, i2 in enumerate(numeric):
                phase = phase + b[i, i2] * ys[a] * ys[a2]
        val = val * np.exp(1j * phase)
        for j in analytic:
            w = c[j] + sum(2 * b[i, j] * ys[a] for a, i in enumerate(numeric))
            val = val * state.factors[j].fourier(-np.asarray(w))
        return val

    value, _ = integrate_iterated(f, box, spec, points)
    return value


_BRUTE_RADII = (60.0, 30.0, 15.0, 8.0)
_BRUTE_MAX_NODES = 3_000_000


def _brute_force(kernel, state, c, spec, truncate):
    """Tensor Gauss-Legendre over the full support, no Fourier transforms.

    Infinite non-Gaussian supports are cut at the largest radius in
    ``_BRUTE_RADII`` whose grid fits the node budget (or at ``truncate``).

    Panels split at window breakpoints and resolve the local phase rate.  The
    panel count doubles until an order-12 comparison meets the tolerance or
    the node budget runs out; the last value is returned either way, so
    slowly decaying windows give a truncation-limited estimate.
    """
    b = kernel.yy
    radii = (truncate,) if truncate is not None else _BRUTE_RADII
    for radius in radii:
        ranges = [_effective_range(w, radius) for w in state.factors]
        rates = []
        for i, w in enumerate(state.factors):
            span = max(abs(v) for v in ranges[i])
            r = abs(c[i]) + abs(w.modulation) + 2 * float(np.sum(np.abs(b[i]))) * span + math.pi * w.scale
            if w.kind == "gauss":
                r += 4 * w.scale / w.base.sigma
            rates.append(r)
        count = math.prod(
            panel_edges(*ranges[i], w.breakpoints, 2 * math.pi / rates[i]).size * 20
            for i, w in enumerate(state.factors)
        )
        if count <= _BRUTE_MAX_NODES:
            break

    def run(factor, order):
        grids = []
        for i, w in enumerate(state.factors):
            lo, hi = ranges[i]
            edges = panel_edges(lo, hi, w.breakpoints, 2 * math.pi / (rates[i] * factor))
            grids.append(gauss_legendre_rule(edges, order))
        if math.prod(g[0].size for g in grids) > _BRUTE_MAX_NODES:
            return None
        y = np.stack(np.meshgrid(*[g[0] for g in grids], indexing="ij"), axis=-1)
        wts = np.ones(())
        for g in grids:
            wts = np.multiply.outer(wts, g[1])
        phase = y @ c + np.einsum("...i,ij,...j->...", y, b, y)
        return complex(np.sum(state(y) * np.exp(1j * phase) * wts))

    best, factor = None, 1.0
    while True:
        hi_val = run(factor, 20)
        if hi_val is None:
            if best is None:
                raise ConvergenceError("brute-force grid exceeds the node budget")
            return best
        best = hi_val
        lo_val = run(factor, 12)
        if lo_val is not None and abs(hi_val - lo_val) <= spec.target(hi_val):
            return best
        factor *= 2


def _prefactor(kernel, x):
    return kernel.amplitude * np.exp(1j * (x @ kernel.xx @ x + kernel.linear_x @ x))


def synthesize(
    kernel: QuadraticPhaseKernel,
    state: FactorizedState,
    x,
    spec: QuadSpec | None = None,
    method: str = "auto",
    truncate: float | None = None,
) -> complex:
    """``Psi_o(x) = integral K(x; y) Psi_n(y) dy``.

    Parameters
    ----------
    kernel, state : QuadraticPhaseKernel, FactorizedState
    x : array_like, shape (d,)
    spec : QuadSpec, optional
    method : {"auto", "quadrature"}
        ``"auto"`` integrates linear-phase coordinates analytically (see
        :func:`reduction_plan`).  ``"quadrature"`` integrates every
        coordinate numerically and is meant as an independent oracle.
    truncate : float, optional
        Half-width at which infinite, slowly decaying supports are cut in
        numeric coordinates.  Gaussian factors are always cut at their decay
        radius, which is exact to rounding.

    Raises
    ------
    DimensionError
    ConvergenceError
    """
    spec = spec or DEFAULT_SPEC
    x = _check(kernel, state, x)
    if x.shape != (kernel.dim,):
        raise DimensionError(f"x must have length {kernel.dim}")
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    plan = reduction_plan(kernel, state) if method == "auto" else _full_plan(state.dim)
    c = x @ kernel.cross + kernel.linear_y
    pre = _prefactor(kernel, x)
    if not plan.numeric:
        val = 1 + 0j
        for j in plan.analytic:
            val *= complex(state.factors[j].fourier(-c[j]))
        return complex(pre * val)
    if method == "quadrature":
        return complex(pre * _brute_force(kernel, state, c, spec, truncate))
    if len(plan.numeric) == 1:
        v = _one_numeric(kernel, state, x, c, plan.numeric[0], plan.analytic, spec, truncate)
    else:
        v = _nested(kernel, state, x, c, plan, spec, truncate)
    return complex(pre * v)


# -- grid synthesis ---------------------------------------------------------------

_CHUNK_ENTRIES = 4_000_000


def _grid_one_numeric(kernel, state, pts, c, i, analytic, spec):
    """Batched version of :func:`_one_numeric`; returns None when a range is infinite."""
    b = kernel.yy
    g = state.factors[i]
    glo, ghi = _effective_range(g, None)
    n = pts.shape[0]
    lo = np.full(n, glo)
    hi = np.full(n, ghi)
    alive = np.ones(n, dtype=bool)
    for j in analytic:
        flo, fhi = state.factors[j].fourier_support
        if not (math.isfinite(flo) or math.isfinite(fhi)):
            continue
        slope, off = -2 * b[i, j], -c[:, j]
        if slope == 0:
            alive &= (flo <= off) & (off <= fhi)
            continue
        t1, t2 = (flo - off) / slope, (fhi - off) / slope
        lo, hi = np.maximum(lo, np.minimum(t1, t2)), np.minimum(hi, np.maximum(t1, t2))
    alive &= lo < hi
    if not np.all(np.isfinite(lo[alive])) or not np.all(np.isfinite(hi[alive])):
        return None
    out = np.zeros(n, dtype=complex)
    idx = np.nonzero(alive)[0]
    if idx.size == 0:
        return out
    lo, hi, cc = lo[idx], hi[idx], c[idx]
    bps = np.asarray([p for p in g.breakpoints if glo < p < ghi])
    cuts = np.sort(np.concatenate([lo[:, None], np.clip(np.broadcast_to(bps, (idx.size, bps.size)), lo[:, None], hi[:, None]), hi[:, None]], axis=1), axis=1)

    rate = 0.0
    span = max(abs(glo), abs(ghi)) if math.isfinite(glo) and math.isfinite(ghi) else float(np.max(np.abs([lo, hi])))
    rate = float(np.max(np.abs(cc[:, i]))) + abs(g.modulation) + 2 * abs(b[i, i]) * span
    for j in analytic:
        w = state.factors[j]
        rate += 2 * abs(b[i, j]) * (abs(w.shift) + 1) / w.scale
    if g.kind == "gauss":
        rate += 4 * g.scale / g.base.sigma

    def make(sel):
        def f(t):
            val = g(t) * np.exp(1j * (cc[sel, i][:, None] * t + b[i, i] * t * t))
            for j in analytic:
                val = val * state.factors[j].fourier(-(cc[sel, j][:, None] + 2 * b[i, j] * t))
            return val

        return f

    tol = 10 * spec.abs_tol
    total = np.zeros(idx.size, dtype=complex)
    for p in range(cuts.shape[1] - 1):
        a, z = cuts[:, p], cuts[:, p + 1]
        width = float(np.max(z - a, initial=0.0))
        if width <= 0:
            continue
        panels = max(1, int(math.ceil(width * rate / (2 * math.pi))))
        step = max(1, _CHUNK_ENTRIES // (panels * 20))
        for s in range(0, idx.size, step):
            sel = slice(s, s + step)
            m = panels
            while True:
                val, err = integrate_batch(make(sel), a[sel], z[sel], m, check=True)
                if err <= tol or m > 4096:
                    break
                m *= 2
            if err > tol:
                low = integrate_batch(make(sel), a[sel], z[sel], m, order=12)
                worst = int(np.argmax(np.abs(val - low)))
                node = tuple(float(v) for v in pts[idx[sel][worst]])
                raise ConvergenceError(f"grid panel rule did not converge (estimate {err:.3g}) at grid node {node}",
                                       val[worst], err)
            total[sel] += val
    out[idx] = total
    return out


def synthesize_grid(
    kernel: QuadraticPhaseKernel,
    state: FactorizedState,
    axes: Sequence,
    spec: QuadSpec | None = None,
    method: str = "auto",
    truncate: float | None = None,
) -> SampledField:
    """:func:`synthesize` at every node of the tensor grid ``axes``.

    Kernels needing at most one numeric coordinate are evaluated with a
    vectorised panel rule whose order-12 comparison is held below the
    tolerance; other cases loop over nodes.  Results are deterministic.
    """
    spec = spec or DEFAULT_SPEC
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    if not (kernel.dim == state.dim == len(axes)):
        raise DimensionError(f"kernel dim {kernel.dim}, state dim {state.dim} and {len(axes)} axes differ")
    meta = {"kernel": kernel.name or kernel.label, "windows": list(state.labels)}
    shell = SampledField(axes, np.zeros(math.prod(a.size for a in axes), dtype=complex), meta)
    pts = shell.points()
    values = None
    if method == "auto":
        plan = reduction_plan(kernel, state)
        c = pts @ kernel.cross + kernel.linear_y
        pre = kernel.amplitude * np.exp(
            1j * (np.einsum("pi,ij,pj->p", pts, kernel.xx, pts) + pts @ kernel.linear_x)
        )
        if not plan.numeric:
            values = pre.copy()
            for j in plan.analytic:
                values = values * state.factors[j].fourier(-c[:, j])
        elif len(plan.numeric) == 1:
            inner = _grid_one_numeric(kernel, state, pts, c, plan.numeric[0], plan.analytic, spec)
            if inner is not None:
                values = pre * inner
    if values is None:
        values = np.empty(pts.shape[0], dtype=complex)
        for n, p in enumerate(pts):
            try:
                values[n] = synthesize(kernel, state, p, spec, method, truncate)
            except ConvergenceError as exc:
                raise ConvergenceError(f"{exc} at grid node {tuple(p)}", exc.value, exc.estimate, exc.axis) from None
    shell.values = np.asarray(values, dtype=complex).reshape(shell.values.shape)
    return shell


# -- lattice elements -------------------------------------------------------------


def basis_element(
    kernel, state: FactorizedState, lattice: LatticeSpec, l, k, x, spec=None, method: str = "auto"
) -> complex:
    """``integral K(x; y) exp(1j*y.(a l)) Psi_n(y + b k) dy`` with componentwise lattice steps."""
    return synthesize(kernel, state.gabor_atoms(lattice, l, k), x, spec, method)


def wavelet_basis_element(kernel, state: FactorizedState, j, k, x, spec=None, method: str = "auto") -> complex:
    """``2**(sum j / 2) * integral K(x; y) Psi_n(2**j y - k) dy`` (componentwise dilation)."""
    return synthesize(kernel, state.wavelet_atoms(j, k), x, spec, method)
