"""Score-generating functions on (0, 1).

All shipped scores are skew-symmetric about 1/2.  They are evaluated on the
lower half and mirrored, which keeps ``J(1 - u) == -J(u)`` exact and keeps
tail evaluations accurate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .densities import (
    SQRT_2PI,
    Density,
    Gaussian,
    StudentT,
    _as_unit,
    _lower_half,
    inv_reg_incomplete_beta,
)
from .errors import PreconditionError, UnsupportedError


class Shape(enum.Enum):
    """Shape of ``J`` on ``[1/2, 1)``."""

    CONVEX = "convex"
    CONCAVE = "concave"
    LINEAR = "linear"  # both convex and concave
    NEITHER = "neither"

    @property
    def is_convex(self) -> bool:
        return self in (Shape.CONVEX, Shape.LINEAR)

    @property
    def is_concave(self) -> bool:
        return self in (Shape.CONCAVE, Shape.LINEAR)


@dataclass(frozen=True)
class KappaBounds:
    """``inf`` and ``sup`` of ``|J'(u)|`` over ``u >= 1/2``.

    ``numeric`` marks values obtained by scanning rather than closed form;
    ``truncated`` marks a supremum taken over ``[1/2, 1 - 1e-9]`` only.
    """

    lower: float
    upper: float
    numeric: bool = False
    truncated: bool = False


_KAPPA_EDGE = 1e-9


class Score:
    """Base class for score-generating functions."""

    name: str = "score"
    shape: Shape = Shape.NEITHER
    monotone: bool = False
    #: monotone or a difference of two monotone functions
    bounded_variation: bool = True
    #: J(u) ~ u^p as u -> 0
    endpoint_order: float = 0.0

    def __call__(self, u):
        v, sign = _lower_half(_as_unit(u))
        return -sign * self._low(v)

    def deriv(self, u):
        v, _ = _lower_half(_as_unit(u))
        return self._deriv_low(v)

    def k_of_j(self) -> float:
        """``int_0^1 J(u)^2 du``."""
        raise NotImplementedError

    def kappa_bounds(self, *, allow_truncated: bool = False) -> KappaBounds:
        return _scan_kappa(self)

    # hooks: 0 < v <= 1/2; _low returns J(v) (<= 0), _deriv_low returns J'(v)
    def _low(self, v):
        raise NotImplementedError

    def _deriv_low(self, v):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


@dataclass(frozen=True, repr=False)
class Wilcoxon(Score):
    name = "wilcoxon"
    shape = Shape.LINEAR
    monotone = True

    def _low(self, v):
        return v - 0.5

    def _deriv_low(self, v):
        return np.ones_like(v)

    def k_of_j(self):
        return 1.0 / 12.0

    def kappa_bounds(self, *, allow_truncated=False):
        return KappaBounds(1.0, 1.0)


@dataclass(frozen=True, repr=False)
class VanDerWaerden(Score):
    name = "vdw"
    shape = Shape.CONVEX
    monotone = True

    def _low(self, v):
        return special.ndtri(v)

    def _deriv_low(self, v):
        z = special.ndtri(v)
        with np.errstate(over="ignore"):
            return SQRT_2PI * np.exp(0.5 * z * z)

    def k_of_j(self):
        return 1.0

    def kappa_bounds(self, *, allow_truncated=False):
        return KappaBounds(SQRT_2PI, math.inf)


@dataclass(frozen=True, repr=False)
class CauchyScore(Score):
    """``sin(2 pi (u - 1/2))``: concave on ``[1/2, 1)`` but not monotone."""

    name = "cauchy"
    shape = Shape.CONCAVE
    monotone = False
    endpoint_order = 1.0

    def _low(self, v):
        return -np.sin(2.0 * math.pi * v)  # sin(2 pi (v - 1/2)) = -sin(2 pi v)

    def _deriv_low(self, v):
        return -2.0 * math.pi * np.cos(2.0 * math.pi * v)

    def k_of_j(self):
        return 0.5

    def kappa_bounds(self, *, allow_truncated=False):
        return KappaBounds(0.0, 2.0 * math.pi)


def student_kappa_half(nu: float) -> float:
    """``J'(1/2)`` for Student scores with ``nu`` degrees of freedom."""
    return math.sqrt(math.pi) * (nu + 1) * math.exp(
        special.gammaln(nu / 2) - special.gammaln((nu + 1) / 2)
    ) / math.sqrt(nu)


@dataclass(frozen=True, repr=False)
class StudentScore(Score):
    """Optimal scores of the Student t density, ``phi_t(F_t^{-1}(u))``.

    Evaluated through the Student quantile; :meth:`beta_form` and
    :meth:`deriv_beta_form` give the inverse-incomplete-beta expressions
    for cross-checking.
    """

    nu: float = 1.0
    shape = Shape.NEITHER
    monotone = False

    @property
    def name(self):
        return f"student:{self.nu:g}"

    @property
    def endpoint_order(self):
        return 1.0 / self.nu

    @property
    def _t(self) -> StudentT:
        return StudentT(self.nu)

    def _low(self, v):
        x = special.stdtrit(self.nu, v)
        return -self._t._score_pos(np.abs(x))

    def _deriv_low(self, v):
        t = self._t
        x = np.abs(special.stdtrit(self.nu, v))
        nu = self.nu
        # J'(u) = psi'(x) / f(x), assembled in logs to survive |x| ~ 1e300
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            x2 = x * x
            ratio = np.where(np.isinf(x2), -1.0, (nu - x2) / (nu + x2))
            log_s = t._log_nu_plus_x2(x)
            expo = 0.5 * (nu - 1.0) * log_s if nu != 1.0 else 0.0 * log_s
            log_mag = math.log(nu + 1) + expo - t._log_norm - 0.5 * (nu + 1) * math.log(nu)
            out = ratio * np.exp(log_mag)
        return out

    def beta_form(self, u):
        """``J(u)`` from the inverse regularized incomplete beta."""
        v, sign = _lower_half(_as_unit(u))
        ib = inv_reg_incomplete_beta(self.nu / 2, 0.5, 2.0 * v)
        return sign * (1 + self.nu) / math.sqrt(self.nu) * np.sqrt(ib * (1.0 - ib))

    def deriv_beta_form(self, u):
        v, _ = _lower_half(_as_unit(u))
        ib = inv_reg_incomplete_beta(self.nu / 2, 0.5, 2.0 * v)
        return student_kappa_half(self.nu) * (2.0 * ib - 1.0) * ib ** ((1.0 - self.nu) / 2)

    def k_of_j(self):
        return (self.nu + 1) / (self.nu + 3)

    def kappa_bounds(self, *, allow_truncated=False):
        # J' changes sign at x = sqrt(nu), so the infimum of |J'| is 0
        if self.nu <= 1:
            return KappaBounds(0.0, student_kappa_half(self.nu))
        if not allow_truncated:
            raise UnsupportedError(
                f"J' is unbounded near 1 for nu={self.nu:g} > 1; "
                "pass allow_truncated=True for a truncated numeric supremum"
            )
        scanned = _scan_kappa(self)
        return KappaBounds(0.0, scanned.upper, numeric=True, truncated=True)


@dataclass(frozen=True, repr=False)
class FromDensity(Score):
    """Optimal scores ``phi_g(G^{-1}(u))`` of a symmetric density ``g``."""

    g: Density = Gaussian()

    def __post_init__(self):
        if self.g.has_density_jump:
            raise PreconditionError("optimal scores need an absolutely continuous density")

    @property
    def name(self):
        return f"opt[{self.g.name}]"

    @property
    def shape(self):
        from .densities import PowerExp

        if isinstance(self.g, PowerExp):
            return Shape.CONVEX if self.g.alpha >= 2 else Shape.NEITHER
        return Shape.CONVEX if self.g.log_concave else Shape.NEITHER

    @property
    def monotone(self):
        return self.g.log_concave

    @property
    def endpoint_order(self):
        return 1.0 / self.g.nu if isinstance(self.g, StudentT) else 0.0

    def _low(self, v):
        x = self.g.quantile(v)
        return self.g.location_score(x)

    def _deriv_low(self, v):
        x = self.g.quantile(v)
        return self.g.location_score_deriv(x) / self.g.pdf_at_quantile(v)

    def k_of_j(self):
        return self.g.fisher_info()


def _scan_kappa(J: Score) -> KappaBounds:
    """Grid scan plus bounded refinement of ``|J'|`` on ``[1/2, 1 - 1e-9]``."""
    # grid clustered toward u = 1 (lower-half coordinate v = 1 - u)
    v = np.concatenate([np.linspace(0.5, 0.01, 400), np.geomspace(0.01, _KAPPA_EDGE, 400)[1:]])
    vals = np.abs(J._deriv_low(v))
    finite = np.isfinite(vals)
    if not finite.all():
        return KappaBounds(float(np.nanmin(vals)), math.inf, numeric=True, truncated=True)

    def refine(idx, sign):
        lo_i, hi_i = max(idx - 1, 0), min(idx + 1, len(v) - 1)
        lo, hi = sorted((v[lo_i], v[hi_i]))
        if lo == hi:
            return vals[idx]
        res = optimize.minimize_scalar(
            lambda t: sign * abs(float(J._deriv_low(np.array([t]))[0])),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return min(res.fun, vals[idx]) if sign > 0 else max(-res.fun, vals[idx])

    upper = refine(int(np.argmax(vals)), -1.0)
    upper = max(upper, float(vals.max()))
    lower = refine(int(np.argmin(vals)), 1.0)
    truncated = bool(np.argmax(vals) == len(v) - 1)
    return KappaBounds(float(lower), float(upper), numeric=True, truncated=truncated)


def parse_score(spec: str) -> Score:
    """``wilcoxon``, ``vdw``, ``cauchy`` or ``student:<nu>``."""
    from .errors import DomainError

    s = spec.strip().lower()
    if s in ("wilcoxon", "w", "sww"):
        return Wilcoxon()
    if s in ("vdw", "vanderwaerden", "normal"):
        return VanDerWaerden()
    if s == "cauchy":
        return CauchyScore()
    if s.startswith("student:"):
        try:
            return StudentScore(float(s.split(":", 1)[1]))
        except ValueError:
            pass
    raise DomainError(f"unknown score spec {spec!r}")
