"""Increasing root-to-leaf paths in randomly labeled D-ary trees.

Two simulators live here.  ``has_increasing_root_leaf_path`` samples the event
on the implicit tree ``T_D^k`` without ever building it: the labels below a
node are drawn from a hash of the node's address and the trial key, so the
sampled labeled tree does not depend on the order in which the search visits
nodes.  ``second_moment_diagnostics`` materializes small trees
and counts *good* paths, whose probability has a closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels, seeding
from .graphs import BudgetExceededError
from .seeding import Seed, SeedLike, as_seed

__all__ = [
    "TreeSearchConfig",
    "TreeEstimate",
    "ExpansionCapExceeded",
    "has_increasing_root_leaf_path",
    "estimate_root_leaf_probability",
    "GoodPathParams",
    "good_path_probability",
    "good_path_bounds",
    "is_good_path",
    "unique_good_rotation",
    "good_rotations",
    "SecondMomentRecord",
    "second_moment_diagnostics",
]

DEFAULT_EXPANSION_CAP = 10 ** 8
DEFAULT_LEAF_BUDGET = 2_000_000


class ExpansionCapExceeded(RuntimeError):
    def __init__(self, D, k, cap):
        super().__init__(f"search of T_{D}^{k} expanded more than {cap} nodes")
        self.cap = cap


@dataclass(frozen=True)
class TreeSearchConfig:
    D: int
    k: int
    trials: int = 1000
    seed: Seed = Seed(0)
    expansion_cap: int = DEFAULT_EXPANSION_CAP

    def __post_init__(self):
        if self.D < 1 or self.k < 1:
            raise ValueError("need D >= 1 and k >= 1")
        object.__setattr__(self, "seed", as_seed(self.seed))


def _trial_key(seed: SeedLike, trial: int) -> np.uint64:
    return np.uint64(as_seed(seed).child(seeding.TREE, trial).key64())


def has_increasing_root_leaf_path(D: int, k: int, seed: SeedLike, trial: int = 0,
                                  expansion_cap: int = DEFAULT_EXPANSION_CAP) -> bool:
    """One sample of "some root-to-leaf path of ``T_D^k`` is increasing" under i.i.d. uniform labels.

    Raises :class:`ExpansionCapExceeded` rather than guessing when the search
    is cut short.
    """
    if D < 1 or k < 0:
        raise ValueError("need D >= 1 and k >= 0")
    outcome, _ = _kernels.tree_search(D, k, _trial_key(seed, trial), expansion_cap)
    if outcome < 0:
        raise ExpansionCapExceeded(D, k, expansion_cap)
    return bool(outcome)


@dataclass(frozen=True)
class TreeEstimate:
    D: int
    k: int
    trials: int
    successes: int
    capped: int

    @property
    def valid(self) -> int:
        return self.trials - self.capped

    @property
    def estimate(self) -> float:
        return self.successes / self.valid if self.valid else math.nan

    @property
    def stderr(self) -> float:
        if not self.valid:
            return math.nan
        q = self.estimate
        return math.sqrt(q * (1.0 - q) / self.valid)


def estimate_root_leaf_probability(cfg: TreeSearchConfig) -> TreeEstimate:
    successes = capped = 0
    for t in range(cfg.trials):
        outcome, _ = _kernels.tree_search(cfg.D, cfg.k, _trial_key(cfg.seed, t), cfg.expansion_cap)
        if outcome < 0:
            capped += 1
        else:
            successes += int(outcome)
    return TreeEstimate(cfg.D, cfg.k, cfg.trials, successes, capped)


# --------------------------------------------------------------------------
# good paths


@dataclass(frozen=True)
class GoodPathParams:
    k: int
    delta: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must lie in [0, 1)")
        if 1.0 - self.delta - 1.0 / self.k < 0.0:
            raise ValueError(f"need 1 - delta - 1/k >= 0, got k={self.k}, delta={self.delta}")

    @property
    def window(self) -> tuple[float, float]:
        return 1.0 - self.delta - 1.0 / self.k, 1.0 - self.delta


def good_path_probability(k: int, delta: float) -> float:
    """Probability that ``k`` i.i.d. uniform labels form a good path.

    Equals ``(1/k) * (1/k!) * ((1-delta)^k - (1-delta-1/k)^k)``: sorted with the
    last label in the window has probability ``((1-delta)^k - lo^k)/k!``, and
    the prefix condition then holds for exactly one of the k cyclic shifts of
    the increments.
    """
    params = GoodPathParams(k, delta)
    lo, hi = params.window
    log_hi = k * math.log(hi)
    # (hi^k - lo^k) = hi^k * (1 - (lo/hi)^k)
    ratio_pow = math.exp(k * math.log(lo / hi)) if lo > 0 else 0.0
    log_val = -math.log(k) - math.lgamma(k + 1) + log_hi + math.log1p(-ratio_pow)
    return math.exp(log_val)


def good_path_bounds(k: int, delta: float) -> tuple[float, float]:
    """``((1-delta)^k / (2k*k!), (1-delta)^k / (k*k!))``."""
    GoodPathParams(k, delta)
    upper = math.exp(k * math.log1p(-delta) - math.log(k) - math.lgamma(k + 1))
    return upper / 2.0, upper


def is_good_path(labels: Sequence[float], delta: float) -> bool:
    x = np.asarray(labels, dtype=np.float64)
    k = len(x)
    if k == 0:
        return False
    if np.any(np.diff(x) < 0):
        return False
    last = x[-1]
    if not (1.0 - delta - 1.0 / k <= last <= 1.0 - delta):
        return False
    ramp = np.arange(1, k + 1) / k * last
    return bool(np.all(x >= ramp))


def _ramp_excess(increments: np.ndarray) -> np.ndarray:
    k = len(increments)
    total = increments.sum()
    prefix = np.concatenate([[0.0], np.cumsum(increments)[:-1]])
    return prefix - np.arange(k) / k * total


def good_rotations(increments: Sequence[float]) -> list[int]:
    """Every rotation index whose prefix sums dominate the linear ramp (up to rounding)."""
    inc = np.asarray(increments, dtype=np.float64)
    w = _ramp_excess(inc)
    tol = 1e-12 * max(inc.sum(), 1e-300)
    return np.nonzero(w <= w.min() + tol)[0].tolist()


def unique_good_rotation(increments: Sequence[float], *, with_flag: bool = False):
    """The cyclic shift ``r`` such that ``increments[r:] + increments[:r]`` has
    every prefix sum ``>= (j/k) * total``.

    The qualifying shifts are exactly the minimizers of
    ``prefix_sum(r) - (r/k) * total``; generically there is one.  On ties the
    smallest index wins; ``with_flag=True`` returns ``(r, tied)``.
    """
    inc = np.asarray(increments, dtype=np.float64)
    if len(inc) == 0 or np.any(inc < 0) or inc.sum() <= 0:
        raise ValueError("increments must be non-negative with a positive sum")
    rots = good_rotations(inc)
    r = rots[0]
    return (r, len(rots) > 1) if with_flag else r


# --------------------------------------------------------------------------
# second moment of the good-path count


@dataclass(frozen=True)
class SecondMomentRecord:
    D: int
    k: int
    delta: float
    trials: int
    mean_z: float
    mean_z2: float
    stderr_z: float
    hit_rate: float
    expected_z: float
    Q: float

    @property
    def ratio(self) -> float:
        """``E[Z^2] / E[Z]^2`` estimated from the trials."""
        return self.mean_z2 / self.mean_z ** 2 if self.mean_z > 0 else math.inf

    @property
    def c_k32(self) -> float:
        """Fitted constant in ``P[Z >= 1] ~ c / k^{3/2}``."""
        return self.hit_rate * self.k ** 1.5

    @property
    def c_k(self) -> float:
        """Fitted constant in ``P[Z >= 1] ~ c / k``."""
        return self.hit_rate * self.k

    def as_row(self) -> dict:
        return {
            "D": self.D, "k": self.k, "delta": self.delta, "trials": self.trials,
            "mean_z": self.mean_z, "mean_z2": self.mean_z2, "ratio": self.ratio,
            "hit_rate": self.hit_rate, "c_k32": self.c_k32, "c_k": self.c_k,
            "expected_z": self.expected_z, "Q": self.Q,
        }


def q_ratio(D: int, k: int, delta: float) -> float:
    return D * math.e * (1.0 - delta) / k


def second_moment_diagnostics(D: int, k: int, delta: float, trials: int, seed: SeedLike,
                              leaf_budget: int = DEFAULT_LEAF_BUDGET) -> SecondMomentRecord:
    """Monte Carlo moments of the number ``Z`` of good root-to-leaf paths in ``T_D^k``."""
    GoodPathParams(k, delta)
    leaves = D ** k
    if leaves > leaf_budget:
        raise BudgetExceededError(f"T_{D}^{k} has {leaves} leaves, above the budget of {leaf_budget}")
    rng = as_seed(seed).child(seeding.TREE, 1 << 20).generator()
    lo, hi = 1.0 - delta - 1.0 / k, 1.0 - delta
    ramp = np.arange(1, k + 1) / k
    leaf = np.arange(leaves)
    ancestors = [leaf // D ** (k - j) for j in range(1, k + 1)]
    batch = max(1, 4_000_000 // (leaves * k))
    z_sum = z2_sum = hits = 0.0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        paths = np.empty((b, leaves, k))
        for j in range(k):
            level = rng.random((b, D ** (j + 1)))
            paths[:, :, j] = level[:, ancestors[j]]
        last = paths[:, :, -1]
        good = np.all(np.diff(paths, axis=2) >= 0, axis=2)
        good &= (last >= lo) & (last <= hi)
        good &= np.all(paths >= ramp * last[:, :, None], axis=2)
        z = good.sum(axis=1).astype(np.float64)
        z_sum += z.sum()
        z2_sum += (z * z).sum()
        hits += np.count_nonzero(z)
        done += b
    mean_z = z_sum / trials
    mean_z2 = z2_sum / trials
    var = max(mean_z2 - mean_z ** 2, 0.0)
    return SecondMomentRecord(
        D=D, k=k, delta=delta, trials=trials,
        mean_z=mean_z, mean_z2=mean_z2,
        stderr_z=math.sqrt(var / trials) if trials > 1 else math.nan,
        hit_rate=hits / trials,
        expected_z=leaves * good_path_probability(k, delta),
        Q=q_ratio(D, k, delta),
    )
