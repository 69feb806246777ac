"""Monte Carlo power of rank tests and empirical efficiencies.

Replications are split into fixed-size chunks, each with its own child of
``SeedSequence(seed)``, so results do not depend on how many threads run
them.  Within a chunk, observation ``i`` of every replication comes from row
``i`` of one uniform array, so runs at different ``n`` share their first
observations (common random numbers): power is then close to monotone in
``n``, which keeps the sample-size search in :func:`empirical_are` stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal, special

from . import serial_stats as ss
from ._parallel import pmap
from .densities import Density, parse_density
from .errors import BudgetExceeded, DomainError
from .scores import Score, parse_score

CHUNK = 1_000
MAX_N = 100_000
BURN_IN = 200

CSV_HEADER = ["test", "n", "alt", "level", "power", "mc_se", "reps", "seed"]


@dataclass(frozen=True)
class PowerEstimate:
    test: str
    n: int
    alternative: float
    level: float
    power: float
    mc_se: float
    reps: int
    seed: int

    def row(self) -> list:
        return [self.test, self.n, repr(self.alternative), repr(self.level), repr(self.power),
                repr(self.mc_se), self.reps, self.seed]


def _estimate(test, n, alt, level, rejections, reps, seed) -> PowerEstimate:
    p = rejections / reps
    return PowerEstimate(test, n, alt, level, p, math.sqrt(p * (1.0 - p) / reps), reps, seed)


def _chunks(reps: int, seed: int):
    sizes = [CHUNK] * (reps // CHUNK) + ([reps % CHUNK] if reps % CHUNK else [])
    return list(zip(np.random.SeedSequence(seed).spawn(len(sizes)), sizes))


def _check_level(level: float):
    if not 0 < level < 1:
        raise DomainError("level must lie in (0, 1)")


def _ranks_columns(z: np.ndarray) -> np.ndarray:
    """Ranks 1..N down each column."""
    r = np.empty(z.shape, dtype=np.int64)
    order = np.argsort(z, axis=0, kind="stable")
    np.put_along_axis(r, order, np.arange(1, z.shape[0] + 1)[:, None], axis=0)
    return r


def _two_sample_chunk(args):
    J, f, delta, n, crit, seq, size = args
    rng = np.random.default_rng(seq)
    u = rng.random((n, size, 4))  # row i holds (x_i, y_i) for every replication
    x = f.from_uniforms(u[..., 0], u[..., 1])
    y = f.from_uniforms(u[..., 2], u[..., 3]) + delta
    N = 2 * n
    a = np.asarray(J(np.arange(1, N + 1) / (N + 1)), dtype=float)
    r = _ranks_columns(np.vstack([x, y]))
    stat = a[r[n:] - 1].sum(axis=0)
    # permutation moments of a sum over n of the N scores
    mean = n * a.mean()
    var = n * n / (N * (N - 1.0)) * float(np.sum((a - a.mean()) ** 2))
    return int(np.sum((stat - mean) / math.sqrt(var) > crit))


def two_sample_power(
    J: Score,
    f: Density,
    delta: float,
    n: int,
    level: float = 0.05,
    reps: int = 2000,
    seed: int = 0,
) -> PowerEstimate:
    """One-sided power of the linear rank test with scores ``J``.

    Two samples of size ``n`` from ``f``, the second shifted by ``delta``.
    The statistic is the score sum over the second sample, standardised by
    its exact permutation mean and variance and compared with the normal
    ``1 - level`` quantile.
    """
    _check_level(level)
    if n < 2:
        raise DomainError("n must be at least 2")
    crit = float(special.ndtri(1.0 - level))
    parts = pmap(_two_sample_chunk, [(J, f, delta, n, crit, s, z) for s, z in _chunks(reps, seed)])
    return _estimate(f"two_sample:{J.name}:{f.name}", n, delta, level, sum(parts), reps, seed)


def _required_n(power_at, target: float, n0: int = 4) -> float:
    """Smallest ``n`` with ``power_at(n) >= target``, linearly interpolated."""
    cache = {}

    def p(n):
        if n not in cache:
            cache[n] = power_at(n)
        return cache[n]

    lo, hi = n0 // 2, n0
    while p(hi) < target:
        lo, hi = hi, 2 * hi
        if hi > MAX_N:
            raise BudgetExceeded(f"power {target} not reached by n = {MAX_N}")
    lo = max(lo, 2)
    if p(lo) >= target:
        return float(lo)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if p(mid) >= target:
            hi = mid
        else:
            lo = mid
    plo, phi = p(lo), p(hi)
    return lo + (target - plo) / (phi - plo) if phi > plo else float(hi)


def empirical_are(
    J1: Score,
    J2: Score,
    f: Density,
    delta: float,
    level: float = 0.05,
    target_power: float = 0.5,
    seed: int = 0,
    reps: int = 4000,
) -> float:
    """``n2 / n1``: sample sizes at which each test first reaches ``target_power``.

    Both tests see the same simulated data.  Values above one favour ``J1``.
    """
    _check_level(level)
    if not level < target_power < 1:
        raise DomainError("target_power must lie strictly between level and 1")
    n1 = _required_n(lambda n: two_sample_power(J1, f, delta, n, level, reps, seed).power, target_power)
    n2 = _required_n(lambda n: two_sample_power(J2, f, delta, n, level, reps, seed).power, target_power)
    return n2 / n1


def _ar1_chunk(args):
    stat, f, rho, n, crit, mom, seq, size = args
    rng = np.random.default_rng(seq)
    u = rng.random((n + BURN_IN, size, 2))
    eps = f.from_uniforms(u[..., 0], u[..., 1])
    x = signal.lfilter([1.0], [1.0, -rho], eps, axis=0)[BURN_IN:]
    r = _ranks_columns(x).T
    raw = ss.raw_batch(stat, r, 1)
    z = math.sqrt(n - 1) * (raw - mom.mean) / mom.sd
    return int(np.sum(z > crit))


def ar1_serial_power(
    stat: str,
    f: Density,
    rho: float,
    n: int,
    level: float = 0.05,
    reps: int = 2000,
    seed: int = 0,
) -> PowerEstimate:
    """One-sided lag-1 power of a rank autocorrelation against AR(1).

    ``X_t = rho X_{t-1} + e_t`` with ``e_t`` drawn from ``f``; the series
    is started ``BURN_IN`` steps early.
    """
    _check_level(level)
    if not abs(rho) < 1:
        raise DomainError("need |rho| < 1")
    if n < 4:
        raise DomainError("n must be at least 4")
    st = ss.statistic(stat)
    mom = ss.permutation_moments(n, 1, st)
    crit = float(special.ndtri(1.0 - level))
    parts = pmap(_ar1_chunk, [(st, f, rho, n, crit, mom, s, z) for s, z in _chunks(reps, seed)])
    return _estimate(f"ar1:{st.name}:{f.name}", n, rho, level, sum(parts), reps, seed)


def run_config(config: dict) -> list[PowerEstimate]:
    """Run every entry of ``config["runs"]``.

    Each run has ``kind`` (``two_sample`` or ``ar1``), ``family``, a list or
    single value ``n``, and ``score`` plus ``delta`` or ``stat`` plus
    ``rho``.  ``reps``, ``level`` and ``seed`` may be set per run or at top
    level.
    """
    out = []
    defaults = {k: config[k] for k in ("reps", "level", "seed") if k in config}
    for i, run in enumerate(config.get("runs", [])):
        run = {**defaults, **run}
        kind = run.get("kind")
        f = parse_density(run["family"])
        ns = run["n"] if isinstance(run["n"], list) else [run["n"]]
        common = dict(level=float(run.get("level", 0.05)), reps=int(run.get("reps", 2000)), seed=int(run.get("seed", 0)))
        for n in ns:
            if kind == "two_sample":
                out.append(two_sample_power(parse_score(run["score"]), f, float(run["delta"]), int(n), **common))
            elif kind == "ar1":
                out.append(ar1_serial_power(run["stat"], f, float(run["rho"]), int(n), **common))
            else:
                raise DomainError(f"run {i}: unknown kind {kind!r}")
    return out


def load_config(path) -> dict:
    with open(Path(path)) as fh:
        return json.load(fh)
