"""Subgroup-membership and IND-CPA games, and the reduction between them.

SMP adversaries are callables ``adversary(instance, z, rng) -> bit`` that
answer 0 for "z is in H". IND-CPA adversaries provide
``choose(scheme, pk, rng) -> (m0, m1, state)`` and
``guess(scheme, pk, c, state, rng) -> bit``.

The challenger and the adversary draw from separate per-trial streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .distributions import GroupDistribution, exotic, uniform_over
from .errors import GameError, InstanceError
from .groups import BitVector, Element, Group, Subgroup
from .rng import coin, trial_rng
from .schemes import GroupHomomorphicScheme, KeyPair

Z95 = 1.96


@dataclass
class SmpInstance:
    """(G, H) with a sampler for H, a sampler for G \\ H and k = ceil(log2 |H|).

    ``h_support`` is the exhaustive element set of H when known; only
    omniscient baselines and checks may look at it.
    """

    group: Group
    h_sampler: GroupDistribution
    complement_sampler: Callable
    k: int
    h_generators: Optional[list] = None
    h_support: Optional[frozenset] = field(default=None, repr=False)
    name: str = "smp"

    def challenge(self, b: int, rng) -> Element:
        return self.complement_sampler(rng) if b else self.h_sampler.sample(rng)


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def smp_from_scheme(scheme: GroupHomomorphicScheme, pk) -> SmpInstance:
    """(C, C_1) with the samplers inherited from encryption: H draws
    Enc(1; r), the complement draws Enc(m; r) for uniform m != 1."""
    P = scheme.plaintext_group(pk)
    if P.order < 2:
        raise InstanceError("plaintext group is trivial")
    one = P.identity
    G = scheme.ciphertext_group(pk)
    h = GroupDistribution(G, lambda rng: scheme.encrypt(pk, one, rng), name="Enc(1)")

    def complement(rng):
        return scheme.encrypt(pk, scheme.random_message(pk, rng, exclude=one), rng)

    support = frozenset(scheme.enc(pk, one, r) for r in scheme.randomness(pk))
    return SmpInstance(G, h, complement, _ceil_log2(len(support)), h_support=support,
                       name=f"smp({scheme!r})")


def smp_from_subgroup(G: Group, gens, h_dist: Optional[GroupDistribution] = None,
                      name: str = "subgroup") -> SmpInstance:
    """H = <gens> inside G; H is sampled uniformly unless ``h_dist`` is given,
    and G \\ H uniformly by rejection."""
    H = Subgroup(G, gens)
    if h_dist is None:
        h_dist = uniform_over(H)
    if H.order == G.order:
        raise InstanceError("H must be a proper subgroup")

    def complement(rng):
        while True:
            z = G.sample(rng)
            if z not in H:
                return z

    support = frozenset(H.elements)
    return SmpInstance(G, h_dist, complement, _ceil_log2(H.order), list(H.generators),
                       support, name)


def exotic_instance(lam: int = 6) -> SmpInstance:
    """H = GF(2)^lam sampled by ``exotic(lam)``, embedded in GF(2)^(lam+1)
    as the vectors with last coordinate 0; the complement is uniform over
    the vectors with last coordinate 1."""
    G = BitVector(lam + 1)
    inner = exotic(lam)
    mass = inner.mass

    h = GroupDistribution(
        G,
        lambda rng: inner.sample(rng) + (0,),
        lambda v: mass(v[:-1]) if v[-1] == 0 else Fraction(0),
        f"exotic({lam})+0",
    )

    def complement(rng):
        return G.sample(rng)[:-1] + (1,)

    gens = [tuple(int(i == j) for j in range(lam + 1)) for i in range(lam)]
    support = frozenset(v + (0,) for v in inner.group.elements())
    return SmpInstance(G, h, complement, lam, gens, support, f"exotic-smp({lam})")


@dataclass(frozen=True)
class AdvantageReport:
    trials: int
    successes: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials

    @property
    def advantage(self) -> float:
        return abs(self.success_rate - 0.5)

    @property
    def halfwidth(self) -> float:
        """Conservative 95% normal-approximation halfwidth, 1.96 * sqrt(0.25 / trials)."""
        return Z95 * math.sqrt(0.25 / self.trials)

    def merge(self, other: "AdvantageReport") -> "AdvantageReport":
        return AdvantageReport(self.trials + other.trials, self.successes + other.successes)

    def to_dict(self) -> dict:
        return {"trials": self.trials, "successes": self.successes,
                "success_rate": self.success_rate, "advantage": self.advantage,
                "halfwidth": self.halfwidth}


def smp_experiment(instance: SmpInstance, adversary, trials: int, seed: int,
                   first_trial: int = 0) -> AdvantageReport:
    wins = 0
    for t in range(first_trial, first_trial + trials):
        crng = trial_rng(seed, t, "smp-challenger")
        b = coin(crng)
        z = instance.challenge(b, crng)
        d = adversary(instance, z, trial_rng(seed, t, "smp-adversary"))
        wins += d == b
    return AdvantageReport(trials, wins)


def indcpa_experiment(scheme: GroupHomomorphicScheme, keys: KeyPair, adversary,
                      trials: int, seed: int, first_trial: int = 0) -> AdvantageReport:
    pk = keys.pk
    P = scheme.plaintext_group(pk)
    wins = 0
    for t in range(first_trial, first_trial + trials):
        arng = trial_rng(seed, t, "cpa-adversary")
        crng = trial_rng(seed, t, "cpa-challenger")
        m0, m1, state = adversary.choose(scheme, pk, arng)
        m0, m1 = P.element(m0), P.element(m1)
        if m0 == m1:
            raise GameError(f"adversary chose equal messages {m0}")
        b = coin(crng)
        c = scheme.encrypt(pk, (m0, m1)[b], crng)
        wins += adversary.guess(scheme, pk, c, state, arng) == b
    return AdvantageReport(trials, wins)


# Baseline adversaries -------------------------------------------------------

def coin_flipper(instance, z, rng) -> int:
    return coin(rng)


def omniscient(instance: SmpInstance, z, rng) -> int:
    """Perfect distinguisher by exhaustive lookup in H."""
    if instance.h_support is None:
        raise InstanceError("instance has no exhaustive H")
    return 0 if z in instance.h_support else 1


class RandomGuesser:
    def choose(self, scheme, pk, rng):
        m0 = scheme.random_message(pk, rng)
        return m0, scheme.random_message(pk, rng, exclude=m0), None

    def guess(self, scheme, pk, c, state, rng):
        return coin(rng)


class SecretKeyAdversary:
    def __init__(self, sk):
        self.sk = sk

    def choose(self, scheme, pk, rng):
        m0 = scheme.random_message(pk, rng)
        return m0, scheme.random_message(pk, rng, exclude=m0), m0

    def guess(self, scheme, pk, c, m0, rng):
        return 0 if scheme.dec(self.sk, c) == m0 else 1


class ReducedAdversary:
    """IND-CPA adversary built from an SMP adversary: challenge 1 against a
    random m1 != 1 and relay the ciphertext."""

    def __init__(self, smp_adversary):
        self.smp_adversary = smp_adversary
        self._instances = {}

    def instance(self, scheme, pk) -> SmpInstance:
        key = (id(scheme), pk)
        if key not in self._instances:
            self._instances[key] = smp_from_scheme(scheme, pk)
        return self._instances[key]

    def choose(self, scheme, pk, rng):
        one = scheme.identity_message(pk)
        return one, scheme.random_message(pk, rng, exclude=one), None

    def guess(self, scheme, pk, c, state, rng):
        return self.smp_adversary(self.instance(scheme, pk), c, rng)


def reduce_smp_to_indcpa(smp_adversary) -> ReducedAdversary:
    return ReducedAdversary(smp_adversary)
