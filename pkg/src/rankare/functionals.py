"""Adaptive quadrature on (0, 1) and the efficiency integrals.

``cross_info`` is ``K(J, f) = int J(u) phi_f(F^{-1}(u)) du`` evaluated in its
integrated-by-parts form ``int J'(u) f(F^{-1}(u)) du``, which stays valid
when ``f`` has jumps.  ``cross_moment`` is ``int J(u) F^{-1}(u) du``.

Every shipped score is skew-symmetric and every family symmetric, so all
three integrands are symmetric about 1/2.  They are integrated over
``(0, 1/2]`` and doubled: near ``u = 0`` floating point keeps full relative
resolution, while ``1 - u`` would round to 1 below ``u ~ 1e-16``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .densities import Density, require_F0
from .errors import DivergenceError, NonConvergence, PreconditionError
from .scores import Score

DEFAULT_TOL = 1e-9
MAX_PANELS = 2000

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # 15 nodes, ascending
_WK_FULL = np.concatenate([_WK[:-1], _WK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_err: float
    converged: bool
    subdivisions: int

    def __float__(self):
        return self.value

    def scaled(self, c: float) -> "QuadResult":
        return QuadResult(c * self.value, abs(c) * self.abs_err, self.converged, self.subdivisions)


def _gk15(g, a: float, b: float):
    """Kronrod estimate and QUADPACK-style error on ``[a, b]``."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre + half * _NODES
    y = np.asarray(g(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    if not np.all(np.isfinite(y)):
        bad = float(x[~np.isfinite(y)][0])
        raise DivergenceError(f"integrand is not finite at u={bad!r}")
    kron = half * float(_WK_FULL @ y)
    gauss = half * float(_WG_FULL @ y)
    mean = kron / (b - a) if b > a else 0.0
    resabs = abs(half) * float(_WK_FULL @ np.abs(y))
    resasc = abs(half) * float(_WK_FULL @ np.abs(y - mean))
    err = abs(kron - gauss)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return kron, err


def integrate_interval(
    g: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    breakpoints: Iterable[float] = (),
    *,
    rtol: float = 0.0,
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """Globally adaptive G7/K15 on ``[a, b]``; ``g`` takes a node array.

    Nodes are interior to every panel, so endpoint singularities are never
    evaluated.  The panel with the largest error estimate is bisected until
    the summed estimate meets ``max(tol, rtol * |value|)`` or ``max_panels``
    is reached.
    """
    if tol < 0 or rtol < 0 or not (tol > 0 or rtol > 0):
        raise ValueError("need tol > 0 or rtol > 0")
    cuts = sorted({float(p) for p in breakpoints if a < p < b})
    edges = [a, *cuts, b]
    heap = []  # (-err, left, right, value)
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk15(g, lo, hi)
        heapq.heappush(heap, (-err, lo, hi, val))
    frozen = []  # panels too narrow to split further
    err_total = math.fsum(-h[0] for h in heap)
    val_total = math.fsum(h[3] for h in heap)
    n_panels = len(heap)
    while heap and err_total > max(tol, rtol * abs(val_total)) and n_panels < max_panels:
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            frozen.append((neg_err, lo, hi, val))
            if not heap:
                break
            continue
        v1, e1 = _gk15(g, lo, mid)
        v2, e2 = _gk15(g, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n_panels += 1
        # recompute sums from scratch every so often to avoid drift
        err_total += e1 + e2 + neg_err
        val_total += v1 + v2 - val
        if n_panels % 64 == 0:
            err_total = math.fsum(-h[0] for h in heap) + math.fsum(-h[0] for h in frozen)
            val_total = math.fsum(h[3] for h in heap) + math.fsum(h[3] for h in frozen)
    panels = sorted(heap + frozen, key=lambda h: h[1])
    value = math.fsum(p[3] for p in panels)
    abs_err = math.fsum(-p[0] for p in panels)
    converged = abs_err <= max(tol, rtol * abs(value))
    return QuadResult(value, abs_err, converged, len(panels))


def integrate_unit(
    g: Callable[[np.ndarray], np.ndarray],
    tol: float = DEFAULT_TOL,
    breakpoints: Iterable[float] = (),
    *,
    rtol: float = 0.0,
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """``int_0^1 g(u) du``; see :func:`integrate_interval`."""
    return integrate_interval(g, 0.0, 1.0, tol, breakpoints, rtol=rtol, max_panels=max_panels)


def _symmetric(g, tol, breakpoints, what, rtol=0.0):
    """``2 * int_0^{1/2} g``, raising on non-convergence."""
    res = integrate_interval(g, 0.0, 0.5, tol / 2.0, breakpoints, rtol=rtol)
    if not res.converged:
        raise NonConvergence(f"{what}: error estimate {2 * res.abs_err:.3g} after {res.subdivisions} panels")
    return res.scaled(2.0)


def _check_pair(J: Score, f: Density):
    require_F0(f)
    if not J.bounded_variation:
        raise PreconditionError(f"{J.name} is not of bounded variation")


def cross_info(J: Score, f: Density, tol: float = DEFAULT_TOL, *, rtol: float = 0.0) -> QuadResult:
    """``K(J, f)`` via ``int J'(u) f(F^{-1}(u)) du``."""
    _check_pair(J, f)

    def g(v):
        return J._deriv_low(v) * f.pdf_at_quantile(v)

    return _symmetric(g, tol, f.u_breakpoints(), f"K({J.name}, {f.name})", rtol)


def cross_info_direct(J: Score, f: Density, tol: float = DEFAULT_TOL, *, rtol: float = 0.0) -> QuadResult:
    """``K(J, f)`` via ``int J(u) phi_f(F^{-1}(u)) du``; smooth ``f`` only."""
    _check_pair(J, f)
    if f.has_density_jump:
        raise PreconditionError(f"{f.name} has a density jump; use cross_info")

    def g(v):
        return J._low(v) * f.location_score(f.quantile(v))

    return _symmetric(g, tol, (), f"K({J.name}, {f.name}) direct", rtol)


def moment_converges(J: Score, f: Density) -> bool:
    """Whether ``int |J F^{-1}|`` is finite, from the endpoint exponents.

    Near ``u = 0``, ``|J(u)| ~ u^p`` (up to logs) and ``|F^{-1}(u)| ~ u^-q``,
    so the integral converges iff ``p - q > -1``.
    """
    return J.endpoint_order - f.quantile_tail_exponent > -1.0


def cross_moment(J: Score, f: Density, tol: float = DEFAULT_TOL, *, rtol: float = 0.0) -> QuadResult:
    """``J(J, f) = int J(u) F^{-1}(u) du``."""
    if not moment_converges(J, f):
        raise DivergenceError(f"int J F^-1 diverges for ({J.name}, {f.name})")

    def g(v):
        return J._low(v) * f.quantile(v)

    return _symmetric(g, tol, f.u_breakpoints(), f"J({J.name}, {f.name})", rtol)


def k_of_j_quad(J: Score, tol: float = DEFAULT_TOL) -> QuadResult:
    """``int J^2`` by quadrature, as a check on the closed forms."""
    return _symmetric(lambda v: J._low(v) ** 2, tol, (), f"K({J.name})")
