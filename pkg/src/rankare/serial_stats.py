"""Rank autocorrelations of an observed series.

The lag-``k`` statistics are built on the ``m = n - k`` lagged rank pairs
``(R_t, R_{t-k})``:

* score autocorrelations, raw value ``m^-1 sum J1(R_t/(n+1)) J2(R_{t-k}/(n+1))``
  (van der Waerden: both scores normal quantiles; Spearman-Wald-Wolfowitz:
  both Wilcoxon ``u - 1/2``);
* Kendall, raw value ``1 - 4 D / (m (m - 1))`` with ``D`` the number of
  discordant pairs among the lagged pairs.

Standardisation is ``sqrt(m) (raw - mean) / sd`` where ``mean`` is the null
mean of ``raw`` and ``sd`` the null standard deviation of ``sqrt(m) raw``,
both under exchangeable ranks.  Means are exact closed forms.  Standard
deviations come from full enumeration of the ``n!`` rank orders for
``n <= 9`` and from seeded random permutations beyond.
"""

from __future__ import annotations

import csv
import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _kernels
from ._parallel import pmap
from .errors import DomainError, TiesError
from .scores import Score, VanDerWaerden, Wilcoxon

ENUMERATION_MAX_N = 9
MC_PERMUTATIONS = 100_000
MC_SEED = 20130917
_CHUNK = 5_000


class MomentMethod(enum.Enum):
    ENUMERATION = "enumeration"
    MONTE_CARLO = "montecarlo"


@dataclass(frozen=True)
class RankSeries:
    data: np.ndarray
    ranks: np.ndarray  # 1..n
    n: int


def ranks(x, ties: str | None = None) -> RankSeries:
    """Rank a series (1 = smallest).

    Ties raise :class:`TiesError` unless ``ties="random:<seed>"``, which
    orders tied values by a seeded random key.
    """
    data = np.asarray(x, dtype=float).ravel()
    n = data.size
    if n < 2:
        raise DomainError("need at least two observations")
    if not np.all(np.isfinite(data)):
        raise DomainError("series contains non-finite values")
    if ties is None:
        order = np.argsort(data, kind="stable")
        sorted_x = data[order]
        dup = sorted_x[1:] == sorted_x[:-1]
        if dup.any():
            mask = np.zeros(n, dtype=bool)
            mask[1:] |= dup
            mask[:-1] |= dup
            raise TiesError(sorted(order[mask].tolist()))
    else:
        kind, _, seed = ties.partition(":")
        if kind != "random" or not seed.strip().lstrip("-").isdigit():
            raise DomainError(f"ties must be 'random:<seed>', got {ties!r}")
        key = np.random.default_rng(int(seed)).random(n)
        order = np.lexsort((key, data))
    r = np.empty(n, dtype=np.int64)
    r[order] = np.arange(1, n + 1)
    data.setflags(write=False)
    r.setflags(write=False)
    return RankSeries(data, r, n)


def _check_lag(n: int, k: int):
    if not 1 <= k <= n - 2:
        raise DomainError(f"lag must lie in 1..{n - 2}, got {k}")


def discordances(r: RankSeries, k: int) -> int:
    """Discordant pairs among the lagged pairs ``(R_t, R_{t-k})``, O(m log m)."""
    _check_lag(r.n, k)
    return int(_kernels.count_discordances(r.ranks[k:], r.ranks[:-k]))


def discordances_bruteforce(r: RankSeries, k: int) -> int:
    """Quadratic reference count."""
    _check_lag(r.n, k)
    a = r.ranks[k:]
    b = r.ranks[:-k]
    total = 0
    for i in range(a.size):
        total += int(np.sum((a[i] - a[i + 1:]) * (b[i] - b[i + 1:]) < 0))
    return total


# --- statistic descriptions ------------------------------------------------

@dataclass(frozen=True)
class Statistic:
    """Either a score pair or Kendall (``scores is None``)."""

    name: str
    scores: tuple[Score, Score] | None

    def score_vectors(self, n: int):
        u = np.arange(1, n + 1) / (n + 1)
        J1, J2 = self.scores
        return np.asarray(J1(u), dtype=float), np.asarray(J2(u), dtype=float)


_NAMED = {
    "vdw": Statistic("vdw", (VanDerWaerden(), VanDerWaerden())),
    "sww": Statistic("sww", (Wilcoxon(), Wilcoxon())),
    "kendall": Statistic("kendall", None),
}


def statistic(spec) -> Statistic:
    """``"vdw"``, ``"sww"``, ``"kendall"`` or a pair of scores."""
    if isinstance(spec, Statistic):
        return spec
    if isinstance(spec, str):
        try:
            return _NAMED[spec.lower()]
        except KeyError:
            raise DomainError(f"unknown statistic {spec!r}") from None
    J1, J2 = spec
    return Statistic(f"{J1.name}x{J2.name}", (J1, J2))


def raw_batch(spec, perms: np.ndarray, k: int) -> np.ndarray:
    """Raw statistic for each row of ``perms`` (ranks 1..n)."""
    stat = statistic(spec)
    perms = np.asarray(perms, dtype=np.int64)
    n = perms.shape[1]
    m = n - k
    if stat.scores is None:
        d = _kernels.batch_discordances(perms[:, k:], perms[:, :-k])
        return 1.0 - 4.0 * d / (m * (m - 1))
    s1, s2 = stat.score_vectors(n)
    return _kernels.batch_lagged_products(s1, s2, perms - 1, k) / m


def exact_mean(n: int, k: int, spec) -> float:
    """Null mean of the raw statistic under exchangeable ranks."""
    _check_lag(n, k)
    stat = statistic(spec)
    m = n - k
    if stat.scores is None:
        # lagged pairs sharing a time point are discordant with probability
        # 2/3, all others with probability 1/2
        shared = max(0, m - k)
        mean_d = Fraction(m * (m - 1), 4) + Fraction(shared, 6)
        return float(1 - 4 * mean_d / (m * (m - 1)))
    a, b = stat.score_vectors(n)
    return (math.fsum(a) * math.fsum(b) - math.fsum(a * b)) / (n * (n - 1))


@dataclass(frozen=True)
class Moments:
    mean: float
    sd: float  # of sqrt(n - k) * raw
    method: MomentMethod
    samples: int


def _all_perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)


def enumerate_raw(n: int, k: int, spec) -> np.ndarray:
    """Raw statistic over every one of the ``n!`` rank orders."""
    if n > ENUMERATION_MAX_N:
        raise DomainError(f"enumeration is limited to n <= {ENUMERATION_MAX_N}")
    _check_lag(n, k)
    return raw_batch(statistic(spec), _all_perms(n), k)


def _mc_chunk(args):
    stat, n, k, seed_seq, size = args
    rng = np.random.default_rng(seed_seq)
    perms = rng.permuted(np.tile(np.arange(1, n + 1, dtype=np.int64), (size, 1)), axis=1)
    raw = raw_batch(stat, perms, k)
    return math.fsum(raw), math.fsum(raw * raw), raw.size


@lru_cache(maxsize=256)
def _moments_cached(n: int, k: int, stat: Statistic, reps: int, seed: int) -> Moments:
    m = n - k
    mean = exact_mean(n, k, stat)
    if n <= ENUMERATION_MAX_N:
        raw = raw_batch(stat, _all_perms(n), k)
        var = math.fsum((raw - mean) ** 2) / raw.size
        return Moments(mean, math.sqrt(m * var), MomentMethod.ENUMERATION, raw.size)
    sizes = [_CHUNK] * (reps // _CHUNK) + ([reps % _CHUNK] if reps % _CHUNK else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = pmap(_mc_chunk, [(stat, n, k, s, z) for s, z in zip(seeds, sizes)])
    total = sum(p[2] for p in parts)
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    # centred on the exact mean, so no degree of freedom is spent on it
    var = max(s2 / total - 2.0 * mean * s1 / total + mean * mean, 0.0)
    return Moments(mean, math.sqrt(m * var), MomentMethod.MONTE_CARLO, total)


def permutation_moments(n: int, k: int, spec, *, reps: int = MC_PERMUTATIONS, seed: int = MC_SEED) -> Moments:
    """Null mean of ``raw`` and null sd of ``sqrt(n - k) raw``."""
    _check_lag(n, k)
    if reps < 1:
        raise DomainError("reps must be positive")
    return _moments_cached(n, k, statistic(spec), reps, seed)


@dataclass(frozen=True)
class AutocorrResult:
    lag: int
    statistic: str
    raw: float
    mean: float
    sd: float
    standardized: float
    method: MomentMethod

    def row(self) -> list:
        return [self.lag, self.statistic, repr(self.raw), repr(self.mean), repr(self.sd),
                repr(self.standardized), self.method.value]


CSV_HEADER = ["lag", "statistic", "raw", "mean", "sd", "standardized", "method"]


def _raw_single(r: RankSeries, k: int, stat: Statistic) -> float:
    m = r.n - k
    if stat.scores is None:
        return 1.0 - 4.0 * discordances(r, k) / (m * (m - 1))
    s1, s2 = stat.score_vectors(r.n)
    idx = r.ranks - 1
    return math.fsum(s1[idx[k:]] * s2[idx[:-k]]) / m


def _result(r: RankSeries, k: int, stat: Statistic, **kw) -> AutocorrResult:
    _check_lag(r.n, k)
    raw = _raw_single(r, k, stat)
    mom = permutation_moments(r.n, k, stat, **kw)
    z = math.sqrt(r.n - k) * (raw - mom.mean) / mom.sd
    return AutocorrResult(k, stat.name, raw, mom.mean, mom.sd, z, mom.method)


def rank_autocorr(r: RankSeries, k: int, J1: Score, J2: Score, **kw) -> AutocorrResult:
    """Lag-``k`` score autocorrelation with scores ``J1`` (time t) and ``J2`` (t-k)."""
    named = {("wilcoxon", "wilcoxon"): "sww", ("vdw", "vdw"): "vdw"}.get((J1.name, J2.name))
    stat = _NAMED[named] if named else statistic((J1, J2))
    return _result(r, k, stat, **kw)


def kendall_autocorr(r: RankSeries, k: int, **kw) -> AutocorrResult:
    return _result(r, k, _NAMED["kendall"], **kw)


def autocorr(r: RankSeries, k: int, stat: str = "vdw", **kw) -> AutocorrResult:
    """Dispatch on ``"vdw"``, ``"sww"`` or ``"kendall"``."""
    return _result(r, k, statistic(stat), **kw)


def read_series(path) -> np.ndarray:
    """One numeric column from CSV (header optional) or plain text."""
    values = []
    with open(Path(path), newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            cells = [c.strip() for c in row if c.strip()]
            if not cells or cells[0].startswith("#"):
                continue
            if len(cells) != 1:
                raise DomainError(f"line {i + 1}: expected one column, got {len(cells)}")
            try:
                values.append(float(cells[0]))
            except ValueError:
                if values:
                    raise DomainError(f"line {i + 1}: not a number: {cells[0]!r}") from None
                # a header line before any data
    if len(values) < 2:
        raise DomainError("series needs at least two values")
    return np.array(values)


__all__ = [
    "AutocorrResult", "CSV_HEADER", "Moments", "MomentMethod", "RankSeries", "Statistic",
    "autocorr", "discordances", "discordances_bruteforce", "enumerate_raw", "exact_mean",
    "kendall_autocorr", "permutation_moments", "rank_autocorr", "ranks", "raw_batch", "read_series",
    "statistic",
]
