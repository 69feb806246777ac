"""Symmetric univariate density families.

Every family is symmetric about zero and exposes pdf, cdf, quantile, the
location score ``-f'/f`` and its derivative, Fisher information for
location and ``f(F^{-1}(u))``.  Quantile-type evaluations are always done on
the lower half ``u <= 1/2`` (where floating point resolves the tail down to
``u ~ 1e-300``) and mirrored, so skew-symmetry holds exactly.

Special functions come from :mod:`scipy.special`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate, optimize, special

from .errors import DivergenceError, DomainError, PreconditionError

SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def norm_cdf(x):
    return special.ndtr(x)


def norm_ppf(u):
    return special.ndtri(u)


def inv_reg_incomplete_beta(a, b, y):
    """Inverse of the regularized incomplete beta function ``I_x(a, b) = y``."""
    return special.betaincinv(a, b, y)


def _as_unit(u):
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise DomainError("u must lie in the open interval (0, 1)")
    return u


def _lower_half(u):
    """Return ``(v, sign)`` with ``v = min(u, 1-u)`` and ``sign = -1`` below 1/2.

    ``1 - u`` is exact for ``u >= 1/2``.
    """
    upper = u > 0.5
    v = np.where(upper, 1.0 - u, u)
    sign = np.where(upper, 1.0, -1.0)
    return v, sign


@dataclass(frozen=True)
class Density:
    """Base class; subclasses implement the unit-scale ``_method`` hooks.

    ``scale`` rescales the family, ``x -> x / scale``.
    """

    scale: float = field(default=1.0, kw_only=True)

    # --- regularity metadata -------------------------------------------
    in_F = True  # finite Fisher information
    in_F0 = True  # f -> 0 at +-inf
    finite_variance = True
    has_density_jump = False
    log_concave = False
    #: F^{-1}(u) ~ u^{-p} as u -> 0 (0 for tails lighter than any power)
    quantile_tail_exponent = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale must be positive")

    @property
    def name(self) -> str:
        raise NotImplementedError

    # --- public, scale-aware API ---------------------------------------
    def pdf(self, x):
        x = np.asarray(x, dtype=float) / self.scale
        return self._pdf(np.abs(x)) / self.scale

    def cdf(self, x):
        x = np.asarray(x, dtype=float) / self.scale
        lower = self._cdf_neg(-np.abs(x))
        return np.where(x > 0, 1.0 - lower, lower)

    def quantile(self, u):
        v, sign = _lower_half(_as_unit(u))
        q = sign * np.abs(self._quantile_low(v)) * self.scale
        return np.where(v == 0.5, 0.0, q)  # exact median by symmetry

    def location_score(self, x):
        x = np.asarray(x, dtype=float) / self.scale
        return np.sign(x) * self._score_pos(np.abs(x)) / self.scale

    def location_score_deriv(self, x):
        x = np.asarray(x, dtype=float) / self.scale
        return self._score_deriv_pos(np.abs(x)) / self.scale**2

    def fisher_info(self) -> float:
        if not self.in_F:
            raise DivergenceError(f"{self.name} has infinite Fisher information")
        return self._fisher_info() / self.scale**2

    def pdf_at_quantile(self, u):
        """``f(F^{-1}(u))`` evaluated branch-aware on the lower half."""
        v, _ = _lower_half(_as_unit(u))
        return self._pdf_at_quantile_low(v) / self.scale

    def u_breakpoints(self) -> tuple[float, ...]:
        """Points in (0, 1) where ``f(F^{-1}(u))`` is discontinuous."""
        return ()

    def sample(self, seed, n: int) -> np.ndarray:
        """``n`` i.i.d. draws by inverse-cdf transform; deterministic in ``seed``."""
        if n < 1:
            raise DomainError("n must be >= 1")
        rng = np.random.default_rng(seed)
        return self.from_uniforms(rng.random(n), rng.random(n))

    def from_uniforms(self, u_mag, u_sign) -> np.ndarray:
        """Draws from two arrays of ``U[0, 1)`` variates, elementwise.

        ``u_mag`` picks the lower-half quantile level ``(1 - u) / 2`` and
        ``u_sign`` the sign, so tails are resolved without ``1 - u`` rounding.
        """
        v = 0.5 * (1.0 - np.asarray(u_mag, dtype=float))  # in (0, 1/2]
        sign = np.where(np.asarray(u_sign) < 0.5, -1.0, 1.0)
        return sign * np.abs(self._quantile_low(v)) * self.scale

    def rescaled(self, scale: float) -> "Density":
        from dataclasses import replace

        return replace(self, scale=self.scale * scale)

    # --- hooks ------------------------------------------------------------
    def _pdf(self, x):  # x >= 0
        raise NotImplementedError

    def _cdf_neg(self, x):  # x <= 0
        raise NotImplementedError

    def _quantile_low(self, v):  # 0 < v <= 1/2, returns <= 0
        raise NotImplementedError

    def _score_pos(self, x):  # x >= 0
        raise NotImplementedError

    def _score_deriv_pos(self, x):
        raise NotImplementedError

    def _fisher_info(self) -> float:
        raise NotImplementedError

    def _pdf_at_quantile_low(self, v):
        return self._pdf(np.abs(self._quantile_low(v)))


@dataclass(frozen=True)
class Gaussian(Density):
    log_concave = True

    @property
    def name(self):
        return "gaussian"

    def _pdf(self, x):
        return norm_pdf(x)

    def _cdf_neg(self, x):
        return special.ndtr(x)

    def _quantile_low(self, v):
        return special.ndtri(v)

    def _score_pos(self, x):
        return np.asarray(x, dtype=float)

    def _score_deriv_pos(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def _fisher_info(self):
        return 1.0


@dataclass(frozen=True)
class StudentT(Density):
    nu: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.nu > 0:
            raise DomainError("degrees of freedom must be positive")

    @property
    def name(self):
        return f"student:{self.nu:g}"

    @property
    def finite_variance(self):
        return self.nu > 2

    @property
    def quantile_tail_exponent(self):
        return 1.0 / self.nu

    @property
    def _log_norm(self):
        nu = self.nu
        return special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)

    def _log_nu_plus_x2(self, x):
        # log(nu + x^2) without overflow for huge |x|
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            big = x > 1e100
            xs = np.where(big, 1.0, x)
            small_form = np.log(self.nu + xs * xs)
            xb = np.where(big, x, 1e100)
            big_form = 2.0 * np.log(xb) + np.log1p(self.nu / (xb * xb))
        return np.where(big, big_form, small_form)

    def _pdf(self, x):
        nu = self.nu
        with np.errstate(over="ignore"):
            return np.exp(self._log_norm - 0.5 * (nu + 1) * (self._log_nu_plus_x2(x) - math.log(nu)))

    def _cdf_neg(self, x):
        return special.stdtr(self.nu, x)

    def _quantile_low(self, v):
        return special.stdtrit(self.nu, v)

    def _score_pos(self, x):
        x = np.asarray(x, dtype=float)
        nu = self.nu
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            t = np.where(x > 1.0, 1.0 / np.where(x > 1.0, x, 1.0), 0.0)
            direct = (nu + 1) * x / (nu + x * x)
            inverted = (nu + 1) * t / (nu * t * t + 1.0)
        return np.where(x > 1.0, inverted, direct)

    def _score_deriv_pos(self, x):
        x = np.asarray(x, dtype=float)
        nu = self.nu
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            x2 = x * x
            ratio = np.where(np.isinf(x2), -1.0, (nu - x2) / (nu + x2))
            inv = np.exp(-self._log_nu_plus_x2(x))
        return (nu + 1) * ratio * inv

    def _fisher_info(self):
        return (self.nu + 1) / (self.nu + 3)


def Cauchy(*, scale: float = 1.0) -> StudentT:
    """The Cauchy density, i.e. Student t with one degree of freedom."""
    return StudentT(1.0, scale=scale)


@dataclass(frozen=True)
class PowerExp(Density):
    """Power-exponential density ``exp(-|x|^alpha) / (2 Gamma(1 + 1/alpha))``."""

    alpha: float = 2.0

    def __post_init__(self):
        super().__post_init__()
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")

    @property
    def name(self):
        return f"powerexp:{self.alpha:g}"

    @property
    def in_F(self):
        return self.alpha > 0.5

    @property
    def log_concave(self):
        return self.alpha >= 1

    @property
    def _norm(self):
        return 0.5 / math.gamma(1.0 + 1.0 / self.alpha)

    def _pdf(self, x):
        return self._norm * np.exp(-np.abs(x) ** self.alpha)

    def _cdf_neg(self, x):
        return 0.5 * special.gammaincc(1.0 / self.alpha, np.abs(x) ** self.alpha)

    def _tail_power(self, v):
        """``|F^{-1}(v)|^alpha`` for ``v <= 1/2``, Newton-polished."""
        s = 1.0 / self.alpha
        y = special.gammainccinv(s, 2.0 * v)
        # one Newton step on Q(s, y) = 2v; dQ/dy = -y^(s-1) e^-y / Gamma(s)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            resid = special.gammaincc(s, y) - 2.0 * v
            slope = -np.exp((s - 1.0) * np.log(y) - y - special.gammaln(s))
            step = np.where((slope != 0) & np.isfinite(slope), resid / slope, 0.0)
            y_new = y - step
        return np.where((y_new > 0) & np.isfinite(y_new), y_new, y)

    def _quantile_low(self, v):
        return -(self._tail_power(v) ** (1.0 / self.alpha))

    def _pdf_at_quantile_low(self, v):
        return self._norm * np.exp(-self._tail_power(v))

    def _score_pos(self, x):
        with np.errstate(divide="ignore"):
            return self.alpha * np.asarray(x, dtype=float) ** (self.alpha - 1.0)

    def _score_deriv_pos(self, x):
        a = self.alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            return a * (a - 1.0) * np.asarray(x, dtype=float) ** (a - 2.0)

    def _fisher_info(self):
        a = self.alpha
        return a * a * math.gamma(2.0 - 1.0 / a) / math.gamma(1.0 / a)


@dataclass(frozen=True)
class HodgesLehmann(Density):
    """Gaussian centre on ``[-eps, eps]`` with tails stretched by ``1/a``.

    ``F(x) = Phi(x)`` for ``0 <= x <= eps`` and ``Phi(eps + a (x - eps))``
    beyond, mirrored for negative ``x``.  The density jumps by the factor
    ``a`` at ``+-eps``.
    """

    a: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        if not self.a > 0:
            raise DomainError("a must be positive (a -> 0 is a limit, not a member)")
        if not self.eps >= 0:
            raise DomainError("eps must be non-negative")

    @property
    def name(self):
        return f"hl:{self.a:g}:{self.eps:g}"

    @property
    def has_density_jump(self):
        return self.a != 1.0 and self.eps > 0

    @property
    def in_F(self):
        return not self.has_density_jump

    def _pdf(self, x):
        a, e = self.a, self.eps
        return np.where(x <= e, norm_pdf(x), a * norm_pdf(e + a * (x - e)))

    def _cdf_neg(self, x):
        a, e = self.a, self.eps
        return np.where(x >= -e, special.ndtr(x), special.ndtr(-e + a * (x + e)))

    def _quantile_low(self, v):
        a, e = self.a, self.eps
        z = special.ndtri(v)
        return np.where(z >= -e, z, -e + (z + e) / a)

    def _pdf_at_quantile_low(self, v):
        # central branch for v >= Phi(-eps), mirrored from u <= Phi(eps)
        z = special.ndtri(v)
        return np.where(z >= -self.eps, 1.0, self.a) * norm_pdf(z)

    def u_breakpoints(self):
        if not self.has_density_jump:
            return ()
        lo = float(special.ndtr(-self.eps))
        return (lo, 1.0 - lo)

    def location_score(self, x):
        xs = np.abs(np.asarray(x, dtype=float) / self.scale)
        if self.has_density_jump and np.any(xs == self.eps):
            raise DomainError("location score undefined at the density jump")
        return super().location_score(x)

    def _score_pos(self, x):
        a, e = self.a, self.eps
        return np.where(x <= e, x, a * (e + a * (x - e)))

    def _score_deriv_pos(self, x):
        return np.where(x <= self.eps, 1.0, self.a**2)

    def _fisher_info(self):
        return self.a**2 if self.eps == 0 else 1.0


@dataclass(frozen=True)
class LogConcave(Density):
    """Symmetric log-concave density ``K exp(-mu(x))``.

    ``mu`` must be even, convex and twice differentiable; ``dmu`` and
    ``d2mu`` are its derivatives.  Normalisation, cdf and quantile are
    numerical.
    """

    mu: Callable[[float], float] = None
    dmu: Callable[[float], float] = None
    d2mu: Callable[[float], float] = None
    label: str = "logconcave"

    log_concave = True

    def __post_init__(self):
        super().__post_init__()
        if self.mu is None or self.dmu is None or self.d2mu is None:
            raise DomainError("mu, dmu and d2mu are required")

    @property
    def name(self):
        return self.label

    @cached_property
    def K(self) -> float:
        """Normalising constant, ``1 / int exp(-mu)``."""
        half, _ = integrate.quad(lambda t: math.exp(-self.mu(t)), 0.0, math.inf, epsabs=1e-14, epsrel=1e-13)
        return 1.0 / (2.0 * half)

    def _pdf(self, x):
        K = self.K
        return np.vectorize(lambda t: K * math.exp(-self.mu(t)))(x)

    def _cdf_neg(self, x):
        K = self.K

        def one(t):
            tail, _ = integrate.quad(lambda s: math.exp(-self.mu(s)), -t, math.inf, epsabs=1e-15, epsrel=1e-13)
            return K * tail

        return np.vectorize(one)(x)

    def _quantile_low(self, v):
        def one(p):
            if p == 0.5:
                return 0.0
            hi = 1.0
            while self._cdf_neg(-hi) > p:
                hi *= 2.0
            return -optimize.brentq(lambda t: float(self._cdf_neg(-t)) - p, 0.0, hi, xtol=1e-14, rtol=1e-14)

        return np.vectorize(one)(v)

    def _score_pos(self, x):
        return np.vectorize(self.dmu)(x)

    def _score_deriv_pos(self, x):
        return np.vectorize(self.d2mu)(x)

    def _fisher_info(self):
        K = self.K
        val, _ = integrate.quad(lambda t: self.dmu(t) ** 2 * K * math.exp(-self.mu(t)), 0.0, math.inf, epsabs=1e-14, epsrel=1e-12)
        return 2.0 * val


def parse_density(spec: str) -> Density:
    """Build a density from a CLI string.

    ``gaussian``, ``cauchy``, ``laplace``, ``student:<nu>``,
    ``powerexp:<alpha>`` or ``hl:<a>:<eps>``.
    """
    parts = spec.strip().lower().split(":")
    head, args = parts[0], parts[1:]
    try:
        if head in ("gaussian", "normal") and not args:
            return Gaussian()
        if head == "cauchy" and not args:
            return Cauchy()
        if head == "laplace" and not args:
            return PowerExp(1.0)
        if head in ("student", "t") and len(args) == 1:
            return StudentT(float(args[0]))
        if head == "powerexp" and len(args) == 1:
            return PowerExp(float(args[0]))
        if head == "hl" and len(args) == 2:
            return HodgesLehmann(float(args[0]), float(args[1]))
    except ValueError as exc:
        raise DomainError(f"bad density spec {spec!r}: {exc}") from None
    raise DomainError(f"unknown density spec {spec!r}")


def require_F0(f: Density) -> None:
    if not f.in_F0:
        raise PreconditionError(f"{f.name} does not vanish at infinity")
