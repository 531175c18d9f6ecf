"""Streaming arm statistics and bandit indices for cost minimization.

Rewards are heuristic values, i.e. costs, so both indices are lower
confidence bounds and arms are chosen by argmin:

    ucb1     mean - c * sqrt(2 ln T / t)
    normal2  mean - sigma * sqrt(2 ln T)

Arms without enough samples for their index get ``-inf`` and are tried first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

NEG_INF = -math.inf


class ArmStats(NamedTuple):
    t: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @property
    def variance(self) -> float:
        if self.t < 2:
            raise ValueError("sample variance needs at least two samples")
        return self.m2 / (self.t - 1)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


EMPTY = ArmStats()


@dataclass(frozen=True)
class BanditContext:
    T: int
    c: float = 1.0


def update(stats: ArmStats, reward: float) -> ArmStats:
    t = stats.t + 1
    delta = reward - stats.mean
    mean = stats.mean + delta / t
    return ArmStats(t, mean, stats.m2 + delta * (reward - mean))


def combine(a: ArmStats, b: ArmStats) -> ArmStats:
    if not b.t:
        return a
    if not a.t:
        return b
    t = a.t + b.t
    delta = b.mean - a.mean
    mean = a.mean + delta * b.t / t
    return ArmStats(t, mean, a.m2 + b.m2 + delta * delta * a.t * b.t / t)


def from_samples(rewards) -> ArmStats:
    s = EMPTY
    for r in rewards:
        s = update(s, r)
    return s


def index_ucb1(stats: ArmStats, ctx: BanditContext) -> float:
    if ctx.T < 1:
        raise ValueError(f"total pulls must be >= 1, got {ctx.T}")
    if stats.t < 1:
        return NEG_INF
    return stats.mean - ctx.c * math.sqrt(2.0 * math.log(ctx.T) / stats.t)


def index_normal2(stats: ArmStats, ctx: BanditContext) -> float:
    if ctx.T < 1:
        raise ValueError(f"total pulls must be >= 1, got {ctx.T}")
    if stats.t < 2:
        return NEG_INF
    return stats.mean - math.sqrt(stats.m2 / (stats.t - 1)) * math.sqrt(2.0 * math.log(ctx.T))


def index_mean(stats: ArmStats, ctx: BanditContext) -> float:
    # exploration switched off
    return NEG_INF if stats.t < 1 else stats.mean


INDICES = {"ucb1": index_ucb1, "normal2": index_normal2, "mean": index_mean}


def select_arm(children: Sequence[ArmStats], ctx: BanditContext, policy: str = "normal2",
               locked: Sequence[bool] | None = None) -> int:
    """Position of the argmin-index unlocked arm; ties go to the lower position."""
    try:
        index = INDICES[policy]
    except KeyError:
        raise ValueError(f"unknown policy {policy!r}; choose from {sorted(INDICES)}") from None
    best, best_val = -1, None
    for i, s in enumerate(children):
        if locked is not None and locked[i]:
            continue
        v = index(s, ctx)
        if best < 0 or v < best_val:
            best, best_val = i, v
    if best < 0:
        raise ValueError("every arm is locked")
    return best


def total_pulls(children: Sequence[ArmStats], locked: Sequence[bool] | None = None) -> int:
    """Sum of pulls over the candidate arms, floored at 1 so log T is defined."""
    T = sum(s.t for i, s in enumerate(children) if locked is None or not locked[i])
    return max(T, 1)
