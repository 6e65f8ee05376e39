"""Sampling generating sets, uniformly and under arbitrary distributions.

``algorithm1`` grows a candidate set round by round and stops as soon as a
whole round of fresh samples already lies in the span; ``algorithm2`` skips
the membership test and always draws ``N*k + 1`` samples. Given the same
stream, algorithm 2's output contains algorithm 1's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .distributions import GroupDistribution, covering_probability
from .errors import ParameterError
from .groups import Group, Subgroup
from .rng import trial_rng

_INT_SNAP = 1e-9


def compute_N(k: int, delta: float, delta_star: float) -> int:
    """Samples per round: ceil((log(1 - delta*) - log k) / log delta), at least 1.

    Base 2 throughout. Ratios within 1e-9 of an integer are snapped to it so
    that exact cases such as k=1, delta=delta*=1/2 are not pushed up by
    rounding noise.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if not 0 <= delta_star < 1:
        raise ParameterError(f"delta* must lie in [0, 1), got {delta_star}")
    ratio = (math.log2(1 - delta_star) - math.log2(k)) / math.log2(delta)
    if abs(ratio - round(ratio)) < _INT_SNAP:
        ratio = round(ratio)
    return max(1, math.ceil(ratio))


@dataclass(frozen=True)
class SamplerConfig:
    k: int
    delta: float
    delta_star: float
    N: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "N", compute_N(self.k, self.delta, self.delta_star))

    @property
    def total_samples(self) -> int:
        return self.N * self.k + 1


@dataclass
class SamplingRun:
    """Output of algorithm 1 plus its instrumentation.

    ``order_trace[l]`` is |<S_l>|: entry 0 after the initial sample, then one
    entry per completed extension round.
    """

    generators: list
    order_trace: list[int]
    aborted: bool
    samples_used: int

    @property
    def rounds_extended(self) -> int:
        return len(self.order_trace) - 1

    def growth_violations(self) -> list[int]:
        """Rounds l where |<S_l>| < 2^l or the order failed to at least double."""
        bad = []
        for l, o in enumerate(self.order_trace):
            if o < 2**l or (l > 0 and o < 2 * self.order_trace[l - 1]):
                bad.append(l)
        return bad


def algorithm1(dist: GroupDistribution, k: int, delta: float, delta_star: float, rng) -> SamplingRun:
    N = compute_N(k, delta, delta_star)
    x = dist.sample(rng)
    S = [x]
    seen = {x}
    span = Subgroup(dist.group, S)
    trace = [span.order]
    used = 1
    aborted = False
    for _ in range(k):
        xs = [dist.sample(rng) for _ in range(N)]
        used += N
        if all(x in span for x in xs):
            aborted = True
            break
        fresh = []
        for x in xs:
            if x not in seen:
                seen.add(x)
                fresh.append(x)
        S.extend(fresh)
        span = span.extend(fresh)
        trace.append(span.order)
    return SamplingRun(S, trace, aborted, used)


def algorithm2(dist: GroupDistribution, k: int, delta: float, delta_star: float, rng) -> list:
    N = compute_N(k, delta, delta_star)
    return [dist.sample(rng) for _ in range(N * k + 1)]


def genset_trials(dist: GroupDistribution, k: int, delta: float, delta_star: float,
                  trials: int, seed: int, algorithm: int = 2, first_trial: int = 0) -> list[dict]:
    """One row per seeded trial; success is checked exactly over the closure."""
    rows = []
    for t in range(first_trial, first_trial + trials):
        rng = trial_rng(seed, t, "genset")
        if algorithm == 1:
            run = algorithm1(dist, k, delta, delta_star, rng)
            gens, used = run.generators, run.samples_used
        elif algorithm == 2:
            gens = algorithm2(dist, k, delta, delta_star, rng)
            used = len(gens)
        else:
            raise ParameterError(f"algorithm must be 1 or 2, got {algorithm}")
        sub = Subgroup(dist.group, gens)
        cover = covering_probability(sub, dist)
        rows.append({
            "trial": t,
            "samples_used": used,
            "subgroup_order": sub.order,
            "covering_prob": float(cover),
            "success": bool(cover >= delta),
        })
    return rows


def pak_bratus_hits(G: Group, extra: int, trials: int, seed: int, first_trial: int = 0) -> int:
    m = G.k + extra
    hits = 0
    for t in range(first_trial, first_trial + trials):
        rng = trial_rng(seed, t, "pak-bratus")
        if Subgroup(G, [G.sample(rng) for _ in range(m)]).order == G.order:
            hits += 1
    return hits


def pak_bratus_estimate(G: Group, extra: int, trials: int, seed: int) -> float:
    """Fraction of trials in which k + extra uniform samples generate G."""
    return pak_bratus_hits(G, extra, trials, seed) / trials


def gf2_spanning_probability(lam: int, m: int) -> Fraction:
    """Probability that m uniform vectors span GF(2)^lam."""
    p = Fraction(1)
    for i in range(lam):
        p *= 1 - Fraction(2**i, 2**m)
    return p
