"""One-dimensional and iterated quadrature for complex, possibly oscillatory integrands.

Finite intervals are split at user breakpoints and integrated with composite
Gauss-Legendre panels (one per period when an oscillation rate is known),
doubling the panel count until an order-12 rule agrees.  Pieces that do not
settle go to QUADPACK's adaptive Gauss-Kronrod routine
(:func:`scipy.integrate.quad`) on the real and imaginary parts.

Infinite intervals are split into a finite core and two tails.  The tails are
integrated with composite Gauss-Legendre panels over radii ``R, 2R, 4R, ...``
and the truncated integrals ``I(R)`` are Richardson-extrapolated in ``1/R``.
This handles integrands decaying only like ``1/y**2`` (products of sinc
windows) when panel edges are commensurate with the oscillation, and is exact
to rounding for rapidly decaying integrands.

Integrands must accept a numpy array and return an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError

__all__ = [
    "QuadSpec",
    "integrate_1d",
    "integrate_iterated",
    "panel_edges",
    "gauss_legendre_rule",
    "integrate_batch",
]

_GL_ORDER = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
_MAX_TAIL_LEVELS = 10
_PANEL_DOUBLINGS = 7


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and hints for :func:`integrate_1d`.

    ``tail_period`` sets the panel length used on infinite tails when no
    ``oscillation_hint`` is given.  The default of 1 is commensurate with the
    ``2*pi*m`` modulations and integer translations of the catalog lattices.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000
    oscillation_hint: float | None = None
    tail_period: float = 1.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.tail_period > 0:
            raise ValueError("tail_period must be positive")

    def tighter(self, factor: float = 10.0) -> "QuadSpec":
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)

    def target(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_SPEC = QuadSpec()


def gauss_legendre_rule(edges, order: int = _GL_ORDER):
    """Composite Gauss-Legendre nodes and weights on consecutive panels.

    Parameters
    ----------
    edges : array_like
        Increasing panel boundaries.
    order : int
        Nodes per panel.
    """
    edges = np.asarray(edges, dtype=float)
    if order == _GL_ORDER:
        x, w = _GL_X, _GL_W
    else:
        x, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def panel_edges(lo: float, hi: float, breakpoints=(), max_width: float = math.inf):
    """Panel boundaries covering ``[lo, hi]``, split at ``breakpoints`` and capped in width."""
    cuts = [lo, hi]
    cuts.extend(p for p in breakpoints if lo < p < hi)
    cuts = np.unique(np.asarray(cuts, dtype=float))
    out = [cuts[:1]]
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, int(math.ceil((b - a) / max_width - 1e-12)))
        out.append(np.linspace(a, b, n + 1)[1:])
    return np.concatenate(out)


def _quad_piece(f, a, b, spec, abs_tol):
    kw = dict(epsabs=abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions, full_output=1)
    re = integrate.quad(lambda t: float(np.real(f(t))), a, b, **kw)
    im = integrate.quad(lambda t: float(np.imag(f(t))), a, b, **kw)
    return complex(re[0], im[0]), re[1] + im[1]


def _panels_checked(f, a, b, n, tol):
    """Order-20 panels on ``[a, b]``, doubled until an order-12 rule agrees within ``tol``."""
    for _ in range(_PANEL_DOUBLINGS):
        edges = np.linspace(a, b, n + 1)
        nodes, weights = gauss_legendre_rule(edges)
        value = complex(np.sum(np.asarray(f(nodes)) * weights))
        low_nodes, low_weights = gauss_legendre_rule(edges, 12)
        err = abs(value - complex(np.sum(np.asarray(f(low_nodes)) * low_weights)))
        if err <= tol(value):
            return value, err
        n *= 2
    return None


def _integrate_finite(f, lo, hi, spec, points):
    cuts = [lo, hi, *(p for p in points if lo < p < hi)]
    cuts = sorted(set(float(c) for c in cuts))
    omega = abs(spec.oscillation_hint or 0.0)
    share = spec.abs_tol / (len(cuts) - 1)
    value, err = 0j, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, min(int(math.ceil((b - a) * omega / (2 * math.pi))), spec.max_subdivisions)) if omega else 1
        got = _panels_checked(f, a, b, n, lambda v: max(share, spec.rel_tol * abs(v)))
        if got is None:
            # QUADPACK for pieces the panel rule cannot resolve (kinks, near-singular)
            edges = np.linspace(a, b, n + 1)
            sub = spec.abs_tol / ((len(cuts) - 1) * n)
            got = (0j, 0.0)
            for u, v in zip(edges[:-1], edges[1:]):
                pv, pe = _quad_piece(f, u, v, spec, sub)
                got = (got[0] + pv, got[1] + pe)
        value += got[0]
        err += got[1]
    return value, err


def _panel_sum(f, a, b, width):
    """Sum of Gauss-Legendre panels of length ``width`` tiling ``[a, b]``."""
    n = max(1, int(round((b - a) / width)))
    nodes, weights = gauss_legendre_rule(np.linspace(a, b, n + 1))
    return complex(np.sum(np.asarray(f(nodes)) * weights))


def _panel_core(f, lo, hi, period, spec):
    """Smooth finite core by panels, checked against a lower-order rule."""
    n = max(1, int(math.ceil((hi - lo) / period - 1e-12)))
    edges = np.linspace(lo, hi, n + 1)
    nodes, weights = gauss_legendre_rule(edges)
    vals = np.asarray(f(nodes))
    value = complex(np.sum(vals * weights))
    low_nodes, low_weights = gauss_legendre_rule(edges, 12)
    err = abs(value - complex(np.sum(np.asarray(f(low_nodes)) * low_weights)))
    if err > 0.1 * spec.target(value):
        return _integrate_finite(f, lo, hi, spec.tighter(), ())
    # the order-20 rule is far more accurate than its order-12 comparison
    return value, err * 1e-3


def _integrate_infinite(f, lo, hi, spec, points):
    omega = abs(spec.oscillation_hint or 0.0)
    period = 2 * math.pi / omega if omega > 0 else spec.tail_period
    finite = [abs(p) for p in points]
    finite += [abs(v) for v in (lo, hi) if math.isfinite(v)]
    r0 = 8 * period
    while finite and r0 <= max(finite):
        r0 *= 2
    core_lo = lo if math.isfinite(lo) else -r0
    core_hi = hi if math.isfinite(hi) else r0
    if points:
        core, core_err = _integrate_finite(f, core_lo, core_hi, spec.tighter(), points)
    else:
        core, core_err = _panel_core(f, core_lo, core_hi, period, spec)
    sides = []
    if not math.isfinite(hi):
        sides.append(lambda a, b: _panel_sum(f, a, b, period))
    if not math.isfinite(lo):
        sides.append(lambda a, b: _panel_sum(f, -b, -a, period))

    partial = [core]
    tableau = [[core]]
    radius = r0
    best, est = core, math.inf
    for level in range(1, _MAX_TAIL_LEVELS + 1):
        inc = sum(side(radius, 2 * radius) for side in sides)
        radius *= 2
        partial.append(partial[-1] + inc)
        row = [partial[-1]]
        for j in range(1, level + 1):
            fac = 2.0**j
            row.append((fac * row[j - 1] - tableau[-1][j - 1]) / (fac - 1))
        tableau.append(row)
        new_best = row[-1]
        est = min(abs(new_best - best), abs(row[-1] - row[-2]))
        if abs(inc) <= 1e-3 * spec.target(partial[-1]) and level >= 2:
            # tails already negligible: extrapolation would only add noise
            best = partial[-1]
            est = abs(inc)
            break
        best = new_best
        if level >= 3 and est <= 0.25 * spec.target(best):
            break
    err = core_err + est
    if err > spec.target(best):
        raise ConvergenceError(
            f"tail extrapolation did not converge on [{lo}, {hi}] (estimate {err:.3g})", best, err
        )
    return best, err


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadSpec | None = None,
    points: Sequence[float] = (),
) -> tuple[complex, float]:
    """Integrate a complex function over ``[lo, hi]``; endpoints may be infinite.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    lo, hi : float
        Interval with ``lo < hi``; ``-inf``/``inf`` allowed.
    spec : QuadSpec, optional
        Tolerances; the default is ``QuadSpec()``.
    points : sequence of float
        Discontinuities or kinks of ``f`` inside the interval.

    Returns
    -------
    value : complex
    err_estimate : float

    Raises
    ------
    ConvergenceError
        If the error estimate exceeds ``max(abs_tol, rel_tol*|value|)``.
    """
    spec = spec or DEFAULT_SPEC
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    points = [float(p) for p in points if lo < p < hi and math.isfinite(p)]
    if math.isfinite(lo) and math.isfinite(hi):
        value, err = _integrate_finite(f, lo, hi, spec, points)
        if err > spec.target(value):
            raise ConvergenceError(
                f"adaptive quadrature did not converge on [{lo}, {hi}] (estimate {err:.3g})", value, err
            )
        return value, err
    return _integrate_infinite(f, lo, hi, spec, points)


def integrate_iterated(
    f: Callable[..., np.ndarray],
    box: Sequence[tuple[float, float]],
    spec: QuadSpec | None = None,
    points: Sequence[Sequence[float]] | None = None,
) -> tuple[complex, float]:
    """Nested :func:`integrate_1d` over a box of up to three intervals.

    ``f(y1, ..., yn)`` is integrated with the last coordinate innermost.  The
    returned error adds the outer estimate to the largest inner estimate scaled
    by the outer interval length (or 1 when that length is infinite).
    """
    spec = spec or DEFAULT_SPEC
    n = len(box)
    if not 1 <= n <= 3:
        raise ValueError("integrate_iterated supports 1 to 3 dimensions")
    points = list(points) if points is not None else [()] * n
    inner_spec = spec.tighter()

    def level(i, prefix):
        lo, hi = box[i]
        use = spec if i == 0 else inner_spec
        if i == n - 1:
            g = lambda t: f(*prefix, t)  # noqa: E731
            return integrate_1d(g, lo, hi, use, points[i])
        worst = [0.0]

        def g(t):
            t_arr = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.empty(t_arr.shape, dtype=complex)
            for idx, ti in enumerate(t_arr.flat):
                try:
                    v, e = level(i + 1, prefix + (float(ti),))
                except ConvergenceError as exc:
                    raise exc.with_axis(i + 1) from None
                out.flat[idx] = v
                worst[0] = max(worst[0], e)
            return out if np.ndim(t) else out[0]

        try:
            v, e = integrate_1d(g, lo, hi, use, points[i])
        except ConvergenceError as exc:
            raise exc.with_axis(i) from None
        width = hi - lo if math.isfinite(hi - lo) else 1.0
        return v, e + worst[0] * width

    return level(0, ())


def integrate_batch(f, lo, hi, n_panels: int, order: int = _GL_ORDER, check: bool = False):
    """Vectorised composite Gauss-Legendre integrals over per-point intervals.

    Parameters
    ----------
    f : callable
        ``f(t)`` with ``t`` of shape ``(P, m)``; row ``p`` holds nodes inside
        ``[lo[p], hi[p]]``.  Must return an array of the same shape.
    lo, hi : array_like, shape (P,)
        Interval ends; empty intervals (``hi <= lo``) integrate to zero.
    n_panels : int
        Equal panels per interval.  The integrand must be smooth on each
        interval and resolved by ``order`` nodes per panel.
    check : bool
        Also return the largest difference from an order-12 rule.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = np.clip(hi - lo, 0.0, None)
    ref_edges = np.linspace(0.0, 1.0, n_panels + 1)

    def run(o):
        t_ref, w_ref = gauss_legendre_rule(ref_edges, o)
        t = lo[:, None] + width[:, None] * t_ref[None, :]
        vals = np.asarray(f(t))
        return (vals * w_ref[None, :]).sum(axis=1) * width

    out = run(order)
    if check:
        return out, float(np.max(np.abs(out - run(12)), initial=0.0))
    return out
