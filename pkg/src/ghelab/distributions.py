"""Sampling distributions over group elements and delta-covering subgroups."""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

from .errors import DomainError, ParameterError
from .groups import BitVector, Element, Group, Subgroup, group_from_json

Prob = Union[Fraction, float]

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class GroupDistribution:
    """A sampler over ``group``, optionally with its probability mass function.

    ``mass`` is ``None`` for sample-only distributions, e.g. the encryption
    of a fixed message under fresh randomness.
    """

    group: Group
    sampler: Callable
    mass: Optional[Callable[[Element], Prob]] = None
    name: str = "custom"

    def sample(self, rng) -> Element:
        return self.sampler(rng)

    def prob(self, x) -> Prob:
        if self.mass is None:
            raise DomainError(f"distribution {self.name!r} has no mass function")
        return self.mass(self.group.element(x))

    def table(self) -> dict[Element, Prob]:
        """Mass of every element, in canonical order."""
        return {x: self.prob(x) for x in self.group.elements()}


def from_table(group: Group, pmf: Mapping, name: str = "table") -> GroupDistribution:
    """Distribution with an explicit mass table; missing elements get mass 0.

    Rational tables are sampled exactly with integer weights.
    """
    table = {group.element(x): p for x, p in pmf.items()}
    if any(p < 0 for p in table.values()):
        raise ParameterError("negative probability in table")
    total = sum(table.values())
    exact = all(isinstance(p, (int, Fraction)) for p in table.values())
    if (exact and total != 1) or abs(total - 1) > NORMALIZATION_TOL:
        raise ParameterError(f"probabilities sum to {total}, not 1")

    support = sorted(x for x, p in table.items() if p > 0)
    if exact:
        denom = math.lcm(*(Fraction(table[x]).denominator for x in support))
        cum, acc = [], 0
        for x in support:
            acc += int(Fraction(table[x]) * denom)
            cum.append(acc)

        def sampler(rng):
            return support[bisect.bisect_right(cum, rng.randrange(denom))]
    else:
        cum, acc = [], 0.0
        for x in support:
            acc += float(table[x])
            cum.append(acc)

        def sampler(rng):
            i = bisect.bisect_right(cum, rng.random() * acc)
            return support[min(i, len(support) - 1)]

    zero = Fraction(0) if exact else 0.0
    return GroupDistribution(group, sampler, lambda x: table.get(x, zero), name)


def uniform(G: Group) -> GroupDistribution:
    p = Fraction(1, G.order)
    return GroupDistribution(G, G.sample, lambda x: p, "uniform")


def uniform_over(sub: Subgroup, name: str = "uniform-subgroup") -> GroupDistribution:
    """Uniform over the elements of ``sub``, as a distribution on the parent group."""
    members = sub.elements
    p = Fraction(1, len(members))
    zero = Fraction(0)
    member_set = set(members)
    return GroupDistribution(sub.group, lambda rng: members[rng.randrange(len(members))],
                             lambda x: p if x in member_set else zero, name)


def exotic(lam: int) -> GroupDistribution:
    """Heavily skewed distribution on GF(2)^lam: vectors with v1 = 1 are
    almost never drawn.

    mass(v) = 2^-(lam-1) - 2^-lam(lam-1)   if v1 = 0
              2^-lam(lam-1)                otherwise
    """
    if lam < 2:
        raise ParameterError("exotic distribution needs lambda >= 2")
    G = BitVector(lam)
    e = lam * (lam - 1)
    low = Fraction(1, 2**e)
    high = Fraction(1, 2 ** (lam - 1)) - low
    half = 2 ** (lam - 1)
    # integer weights over 2^e: each v1=1 vector weighs 1, each v1=0 vector w0
    w0 = 2 ** (e - (lam - 1)) - 1

    def sampler(rng):
        u = rng.randrange(2**e)
        if u < half:
            return (1,) + _bits(u, lam - 1)
        return (0,) + _bits((u - half) // w0, lam - 1)

    return GroupDistribution(G, sampler, lambda v: high if v[0] == 0 else low, f"exotic({lam})")


def _bits(i: int, width: int) -> tuple:
    return tuple((i >> j) & 1 for j in range(width))


def exotic_v1_one_mass(lam: int) -> tuple[Fraction, Fraction]:
    """(per-vector mass, total mass) of the v1 = 1 half of ``exotic(lam)``."""
    per = Fraction(1, 2 ** (lam * (lam - 1)))
    return per, per * 2 ** (lam - 1)


def covering_probability(sub: Subgroup, D: GroupDistribution) -> Prob:
    """Pr[x in sub] for x drawn from D, summed exactly over the closure."""
    if sub.group != D.group:
        raise DomainError(f"subgroup lives in {sub.group}, distribution in {D.group}")
    return sum((D.prob(x) for x in sub.elements), Fraction(0))


def is_delta_covering(sub: Subgroup, D: GroupDistribution, delta: float) -> bool:
    _check_delta(delta)
    return covering_probability(sub, D) >= delta


def greedy_covering_generators(D: GroupDistribution, delta: float) -> Subgroup:
    """<h_1..h_b> for the shortest prefix of elements sorted by decreasing mass
    whose cumulative mass reaches ``delta``; always at least one element."""
    _check_delta(delta)
    ranked = sorted(D.table().items(), key=lambda kv: (-kv[1], kv[0]))
    prefix, acc = [], Fraction(0)
    for x, p in ranked:
        prefix.append(x)
        acc += p
        if acc >= delta:
            break
    return Subgroup(D.group, prefix)


def _check_delta(delta):
    if not 0 <= delta <= 1:
        raise ParameterError(f"delta must lie in [0, 1], got {delta}")


def total_variation(D: GroupDistribution, samples) -> float:
    """TV distance between the empirical law of ``samples`` and D."""
    counts = Counter(samples)
    n = len(samples)
    tv = sum(abs(counts.get(x, 0) / n - float(p)) for x, p in D.table().items())
    tv += sum(c / n for x, c in counts.items() if not D.group.is_valid(x))
    return tv / 2


def distribution_from_json(spec: dict, group: Optional[Group] = None) -> GroupDistribution:
    kind = spec.get("kind")
    if kind == "exotic":
        return exotic(int(spec["lambda"]))
    if "group" in spec:
        group = group_from_json(spec["group"])
    if group is None:
        raise ParameterError(f"distribution kind {kind!r} needs a group")
    if kind == "uniform":
        return uniform(group)
    if kind == "table":
        values = [Fraction(v) if isinstance(v, (str, int)) else float(v) for v in spec["pmf"]]
        elements = group.elements()
        if len(values) != len(elements):
            raise ParameterError(f"pmf has {len(values)} entries, group has {len(elements)}")
        return from_table(group, dict(zip(elements, values)))
    raise ParameterError(f"unknown distribution kind {kind!r}")
