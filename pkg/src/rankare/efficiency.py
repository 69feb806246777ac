"""Pitman efficiencies of rank tests and the closed-form bounds on them.

Nonserial::

    ARE_f(J1 / J2) = K(J2) / K(J1) * C_f^2,          C_f = K(J1, f) / K(J2, f)

Serial, for autocorrelations built on score pairs ``(J1, J2)`` against
``(J3, J4)``::

    ARE*_f = K(J3) / K(J1) * C_f(J1, J3)^2 * K(J4) / K(J2) * D_f(J2, J4)^2

with ``D_f = J(J2, f) / J(J4, f)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special

from . import functionals as fn
from .densities import Density, HodgesLehmann, PowerExp, StudentT, norm_cdf, norm_pdf
from .errors import (
    DivergenceError,
    DomainError,
    ExtrapolationUnstable,
    NoBracketError,
    OutsideF2Error,
    PreconditionError,
    ShapeError,
    UnsupportedError,
)
from .scores import FromDensity, Score, VanDerWaerden, Wilcoxon, parse_score

EXTRAPOLATION_TOL = 1e-3
# Efficiencies are ratios, so each integral is held to a relative target;
# an absolute one is meaningless once a family is rescaled or very wide.
DEFAULT_RTOL = 1e-10


@dataclass(frozen=True)
class AreReport:
    c_f: float
    d_f: float | None
    k_ratio_nonserial: float
    k_ratio_serial: float | None
    are: float
    abs_err: float
    serial: bool
    outside_f2: bool = False


def _require_bv(*scores: Score):
    for J in scores:
        if not J.bounded_variation:
            raise PreconditionError(f"{J.name} is neither monotone nor of bounded variation")


def _rel(q: fn.QuadResult) -> float:
    return q.abs_err / abs(q.value) if q.value else math.inf


def are_nonserial(J1: Score, J2: Score, f: Density, tol: float = 0.0, *, rtol: float = DEFAULT_RTOL) -> AreReport:
    """``ARE_f(phi_J1 / phi_J2)``."""
    _require_bv(J1, J2)
    k1 = fn.cross_info(J1, f, tol, rtol=rtol)
    k2 = fn.cross_info(J2, f, tol, rtol=rtol)
    c = k1.value / k2.value
    kr = J2.k_of_j() / J1.k_of_j()
    are = kr * c * c
    err = are * 2.0 * (_rel(k1) + _rel(k2))
    return AreReport(c, None, kr, None, are, err, serial=False)


def are_serial(
    J1: Score,
    J2: Score,
    J3: Score,
    J4: Score,
    f: Density,
    tol: float = 0.0,
    *,
    rtol: float = DEFAULT_RTOL,
    strict: bool = False,
) -> AreReport:
    """``ARE*_f`` of the ``(J1, J2)`` autocorrelation test against ``(J3, J4)``.

    Densities without a finite variance are computed anyway whenever the
    moment integrals converge and come back with ``outside_f2=True``;
    ``strict=True`` raises :class:`OutsideF2Error` instead.
    """
    _require_bv(J1, J2, J3, J4)
    outside = not f.finite_variance
    if outside and strict:
        raise OutsideF2Error(f"{f.name} has infinite variance")
    k1 = fn.cross_info(J1, f, tol, rtol=rtol)
    k3 = fn.cross_info(J3, f, tol, rtol=rtol)
    m2 = fn.cross_moment(J2, f, tol, rtol=rtol)
    m4 = fn.cross_moment(J4, f, tol, rtol=rtol)
    c = k1.value / k3.value
    d = m2.value / m4.value
    kr1 = J3.k_of_j() / J1.k_of_j()
    kr2 = J4.k_of_j() / J2.k_of_j()
    are = kr1 * c * c * kr2 * d * d
    err = are * 2.0 * (_rel(k1) + _rel(k3) + _rel(m2) + _rel(m4))
    return AreReport(c, d, kr1, kr2, are, err, serial=True, outside_f2=outside)


# Autocorrelation statistics as score pairs.  Kendall has the same serial
# efficiency as Spearman-Wald-Wolfowitz, so it maps to the same pair.
SERIAL_SCORES: dict[str, tuple[Score, Score]] = {
    "vdw": (VanDerWaerden(), VanDerWaerden()),
    "sww": (Wilcoxon(), Wilcoxon()),
    "kendall": (Wilcoxon(), Wilcoxon()),
}


def are_serial_named(stat1: str, stat2: str, f: Density, **kw) -> AreReport:
    """``ARE*_f`` between two named autocorrelations (``vdw``, ``sww``, ``kendall``)."""
    try:
        J1, J2 = SERIAL_SCORES[stat1.lower()]
        J3, J4 = SERIAL_SCORES[stat2.lower()]
    except KeyError as exc:
        raise DomainError(f"unknown autocorrelation {exc.args[0]!r}") from None
    return are_serial(J1, J2, J3, J4, f, **kw)


def _w_vdw(f: Density, serial: bool, rtol: float = DEFAULT_RTOL) -> AreReport:
    W, V = Wilcoxon(), VanDerWaerden()
    if serial:
        return are_serial(W, W, V, V, f, rtol=rtol)
    return are_nonserial(W, V, f, rtol=rtol)


# --- the a -> 0 limit of the piecewise Gaussian family -------------------

class HLQuantity(enum.Enum):
    C_F = "C_f"
    D_F = "D_f"
    ARE = "ARE"
    ARE_SERIAL = "ARE_serial"


def _pick(report: AreReport, q: HLQuantity) -> float:
    return {
        HLQuantity.C_F: report.c_f,
        HLQuantity.D_F: report.d_f,
        HLQuantity.ARE: report.are,
        HLQuantity.ARE_SERIAL: report.are,
    }[q]


def _hl_at(a: float, eps: float, q: HLQuantity) -> float:
    serial = q in (HLQuantity.D_F, HLQuantity.ARE_SERIAL)
    return _pick(_w_vdw(HodgesLehmann(a, eps), serial), q)


def richardson10(v1: float, v2: float, v3: float) -> tuple[float, float]:
    """Two Richardson passes on values at ``h, h/10, h/100``.

    Returns ``(final, previous)``: the order-2 estimate and the last order-1
    estimate it was built from.
    """
    r1a = (10.0 * v2 - v1) / 9.0
    r1b = (10.0 * v3 - v2) / 9.0
    return (100.0 * r1b - r1a) / 99.0, r1b


def _hl_grid_scale(eps: float, q: HLQuantity) -> float:
    # C is a ratio of functions affine in a with a pole near minus the
    # central mass 2 Phi(eps) - 1.  D is a ratio of functions affine in 1/a
    # whose a -> 0 behaviour sets in only once a is below the tail mass
    # 2 Phi(-eps).  Keep the grid inside both.
    s = min(1.0, 2.0 * float(norm_cdf(eps)) - 1.0)
    if q in (HLQuantity.D_F, HLQuantity.ARE_SERIAL):
        s = min(s, 2.0 * float(norm_cdf(-eps)))
    return s


def _hl_richardson(eps: float, q: HLQuantity) -> float:
    s = _hl_grid_scale(eps, q)
    if s * 1e-4 < 1e-300:
        raise ExtrapolationUnstable(
            f"{q.value} at eps={eps:g}: tail mass below double range, use method='exact'"
        )
    vals = [_hl_at(s * a, eps, q) for a in (1e-2, 1e-3, 1e-4)]
    est, prev = richardson10(*vals)
    if abs(est - prev) > EXTRAPOLATION_TOL:
        raise ExtrapolationUnstable(
            f"{q.value} at eps={eps:g}: estimates {prev:.6g} and {est:.6g} disagree"
        )
    return est


# x-space integrands for the two scores: J(Phi(-x)) and J'(Phi(-x)) phi(x)^2
_HL_SCORES = {
    "wilcoxon": (lambda x: special.ndtr(-x) - 0.5, lambda x: norm_pdf(x) ** 2),
    "vdw": (lambda x: -x, lambda x: norm_pdf(x)),
}


def _hl_pieces(eps: float, name: str):
    """Central and tail pieces of ``K(J, f_{a,eps})`` and ``J(J, f_{a,eps})``.

    With ``K = 2 (c + a t)`` and ``J = 2 (m + T / a)`` only ``c`` and ``T``
    survive as ``a -> 0``.  Both are integrated over ``x = -Phi^{-1}(v)``;
    the tail is returned divided by ``phi(eps)``, which cancels in ratios
    and keeps large ``eps`` from underflowing.
    """
    j_of_x, central = _HL_SCORES[name]
    c = fn.integrate_interval(central, 0.0, min(eps, 38.0), 0.0, rtol=1e-13)
    y_max = math.sqrt(eps * eps + 1500.0) - eps  # exp(-eps y - y^2 / 2) < e^-750 beyond

    def tail(y):
        return -j_of_x(eps + y) * y * np.exp(-eps * y - 0.5 * y * y)

    t = fn.integrate_interval(tail, 0.0, y_max, 0.0, rtol=1e-13)
    return c.value, t.value


def _hl_exact(eps: float, q: HLQuantity) -> float:
    if eps == 0.0:
        # iterated limit eps -> 0 of the a -> 0 limit, in closed form
        c = 1.0 / math.sqrt(2.0 * math.pi)
        d = 0.5 / math.sqrt(math.pi)
    else:
        cw, tw = _hl_pieces(eps, "wilcoxon")
        cv, tv = _hl_pieces(eps, "vdw")
        c, d = cw / cv, tw / tv
    return {
        HLQuantity.C_F: c,
        HLQuantity.D_F: d,
        HLQuantity.ARE: 12.0 * c * c,
        HLQuantity.ARE_SERIAL: 144.0 * c * c * d * d,
    }[q]


def hl_limit(eps: float, quantity: str | HLQuantity, *, method: str = "richardson") -> float:
    """``lim_{a -> 0}`` of a W-versus-vdW quantity under ``f_{a, eps}``.

    ``eps = 0`` is the iterated limit: first ``a -> 0``, then ``eps -> 0``.
    ``method="richardson"`` extrapolates numerical values on a grid of
    ``a``; ``method="exact"`` drops the vanishing terms analytically.
    """
    if not eps >= 0:
        raise DomainError("eps must be non-negative")
    q = HLQuantity(quantity)
    if method == "exact":
        return _hl_exact(eps, q)
    if method != "richardson":
        raise DomainError(f"unknown method {method!r}")
    if eps > 0:
        return _hl_richardson(eps, q)
    lo, hi = _hl_richardson(1e-2, q), _hl_richardson(1e-3, q)
    est = (10.0 * hi - lo) / 9.0
    if abs(est - hi) > EXTRAPOLATION_TOL:
        raise ExtrapolationUnstable(f"{q.value} at eps -> 0: {hi:.6g} and {est:.6g} disagree")
    return est


# --- closed-form bounds --------------------------------------------------

_SYMMETRIC_BOUNDS = {
    "w_vs_vdw": 6.0 / math.pi,
    "cauchy_vs_w": 2.0 * math.pi**2 / 3.0,
    "cauchy_vs_vdw": 4.0 * math.pi,
}


def bound_symmetric(which: str) -> float:
    """Upper bounds valid for every symmetric density.

    ``w_vs_vdw`` bounds ARE(W / vdW), ``cauchy_vs_w`` bounds
    ARE(Cauchy / W) and ``cauchy_vs_vdw`` bounds ARE(Cauchy / vdW).
    """
    try:
        return _SYMMETRIC_BOUNDS[which.lower()]
    except KeyError:
        raise DomainError(f"unknown bound {which!r}") from None


def bound_student_scores(nu: float) -> tuple[float, float]:
    """Upper bounds on ARE(t_nu / W) and ARE(t_nu / vdW), ``0 < nu <= 1``."""
    if not 0 < nu <= 1:
        raise DomainError("nu must lie in (0, 1]")
    g2 = math.exp(2.0 * (special.gammaln(nu / 2) - special.gammaln((nu + 1) / 2)))
    core = g2 * (nu + 3) * (nu + 1) / nu
    return math.pi * core / 12.0, core / 2.0


@dataclass(frozen=True)
class GenericBound:
    """Bounds on ``12 ARE_f(phi_J / phi_W)``; ``lower`` is None when unknown."""

    lower: float | None
    upper: float
    numeric: bool = False


def bound_generic(J: Score) -> GenericBound:
    K = J.k_of_j()
    try:
        kb = J.kappa_bounds()
    except UnsupportedError:
        return GenericBound(None, math.inf)
    upper = math.inf if kb.truncated else kb.upper**2 / K
    lower = kb.lower**2 / K if J.monotone else None
    slope_half = float(J.deriv(0.5))
    if J.shape.is_convex and J.monotone:
        lower = slope_half**2 / K
    if J.shape.is_concave:
        upper = slope_half**2 / K
    if isinstance(J, FromDensity) and J.monotone:
        # (mu''(0) / K_g)^2 / I(g): the same J'(1/2)^2 / K(J) in closed form
        lower = slope_half**2 / K
    return GenericBound(lower, upper, numeric=kb.numeric)


def bound_serial_sww(J1: Score, J2: Score) -> float:
    """Bound on serial efficiency against Spearman-Wald-Wolfowitz.

    Both scores convex on ``[1/2, 1)``: upper bound on ARE*(SWW / J1J2).
    Both concave: upper bound on ARE*(J1J2 / SWW).
    """
    for J in (J1, J2):
        if not J.monotone:
            raise ShapeError(f"{J.name} is not monotone")
    d1, d2 = float(J1.deriv(0.5)), float(J2.deriv(0.5))
    if not (d1 > 0 and d2 > 0):
        raise ShapeError("J'(1/2) must be positive")
    ratio = J1.k_of_j() * J2.k_of_j() / (d1 * d2) ** 2
    if J1.shape.is_convex and J2.shape.is_convex:
        return 144.0 * ratio
    if J1.shape.is_concave and J2.shape.is_concave:
        return 1.0 / (144.0 * ratio)
    raise ShapeError("scores must be both convex or both concave on [1/2, 1)")


# --- parameter scans -----------------------------------------------------

FAMILIES: dict[str, Callable[[float], Density]] = {
    "student": StudentT,
    "powerexp": PowerExp,
}


@dataclass(frozen=True)
class Crossing:
    parameter: float
    value: float


def _family(family) -> Callable[[float], Density]:
    if callable(family):
        return family
    try:
        return FAMILIES[family.lower()]
    except KeyError:
        raise DomainError(f"unknown family {family!r}") from None


def family_quantity(family, quantity: str, J1: Score | None = None, J2: Score | None = None):
    """``theta -> ARE`` (or serial ARE) of ``J1`` versus ``J2`` across a family."""
    make = _family(family)
    J1 = J1 or Wilcoxon()
    J2 = J2 or VanDerWaerden()
    if quantity == "ARE":
        return lambda th: are_nonserial(J1, J2, make(th)).are
    if quantity == "ARE_serial":
        return lambda th: are_serial(J1, J1, J2, J2, make(th)).are
    raise DomainError(f"unknown quantity {quantity!r}")


def crossing_scan(
    family,
    quantity: str,
    bracket: tuple[float, float],
    *,
    target: float | None = None,
    extremum: str | None = None,
    xtol: float = 1e-6,
) -> Crossing:
    """Where ``quantity`` hits ``target``, or its interior ``"max"``/``"min"``."""
    if (target is None) == (extremum is None):
        raise DomainError("give exactly one of target or extremum")
    g = family_quantity(family, quantity)
    lo, hi = bracket
    if target is not None:
        glo, ghi = g(lo) - target, g(hi) - target
        if glo * ghi > 0:
            raise NoBracketError(f"no sign change of {quantity} - {target} on [{lo}, {hi}]")
        root = optimize.brentq(lambda t: g(t) - target, lo, hi, xtol=xtol)
        return Crossing(root, g(root))
    sign = {"max": -1.0, "min": 1.0}.get(extremum)
    if sign is None:
        raise DomainError("extremum must be 'max' or 'min'")
    res = optimize.minimize_scalar(lambda t: sign * g(t), bounds=(lo, hi), method="bounded", options={"xatol": xtol})
    th = float(res.x)
    if min(th - lo, hi - th) < 10 * xtol:
        raise NoBracketError(f"{extremum} of {quantity} lies on the bracket edge")
    return Crossing(th, g(th))


# --- table rows ----------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    param: float
    c_f: float
    d_f: float | None
    are: float
    are_serial: float | None


def table_row(which: int, param: float, *, method: str = "richardson") -> TableRow:
    """One row of C_f, D_f, ARE and serial ARE for W versus vdW.

    ``which`` selects the family: 1 the a -> 0 limit of the piecewise
    Gaussian (``param = eps``), 2 Student (``nu``), 3 power-exponential
    (``alpha``).  Diverging moment integrals give ``None`` cells.
    """
    if which == 1:
        def cell(q):
            try:
                return hl_limit(param, q, method=method)
            except ExtrapolationUnstable:
                return math.nan

        return TableRow(param, cell("C_f"), cell("D_f"), cell("ARE"), cell("ARE_serial"))
    make = {2: StudentT, 3: PowerExp}.get(which)
    if make is None:
        raise DomainError("table must be 1, 2 or 3")
    f = make(param)
    ns = _w_vdw(f, serial=False)
    try:
        s = _w_vdw(f, serial=True)
    except DivergenceError:
        return TableRow(param, ns.c_f, None, ns.are, None)
    return TableRow(param, ns.c_f, s.d_f, ns.are, s.are)


def parse_scores(*names: str) -> list[Score]:
    return [parse_score(n) for n in names]
