"""Order-comparison attacks on the subgroup membership problem.

Every attack ends the same way: ask the oracle for |<gens>| and
|<gens, z>| and answer "z in H" (0) iff they agree. They differ only in how
the generators are obtained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .games import SmpInstance
from .genset import algorithm2, compute_N
from .groups import Subgroup
from .rng import trial_rng


def attack_with_generators(instance: SmpInstance, gens, z, oracle, rng) -> int:
    gens = list(gens)
    if not gens:
        raise ParameterError("need at least one generator")
    o_h = oracle.order(instance.group, gens, rng)
    o_hz = oracle.order(instance.group, gens + [z], rng)
    return 0 if o_h == o_hz else 1


class KnownGeneratorsAttack:
    def __init__(self, oracle, gens=None):
        self.oracle = oracle
        self.gens = gens

    def __call__(self, instance, z, rng):
        gens = self.gens if self.gens is not None else instance.h_generators
        return attack_with_generators(instance, gens, z, self.oracle, rng)


class UniformAttack:
    """Draw k + 4 samples from H as generators."""

    def __init__(self, oracle, k=None):
        self.oracle = oracle
        self.k = k

    def sample_count(self, instance) -> int:
        return (self.k if self.k is not None else instance.k) + 4

    def __call__(self, instance, z, rng):
        gens = [instance.h_sampler.sample(rng) for _ in range(self.sample_count(instance))]
        return attack_with_generators(instance, gens, z, self.oracle, rng)


class ArbitraryAttack:
    """Draw N*k + 1 samples with algorithm 2 at delta = delta* = sqrt(1 - eps*)."""

    def __init__(self, oracle, eps_star: float, k=None):
        if not 0 < eps_star < 1:
            raise ParameterError(f"eps* must lie in (0, 1), got {eps_star}")
        self.oracle = oracle
        self.eps_star = eps_star
        self.delta = math.sqrt(1 - eps_star)
        self.k = k

    def _k(self, instance) -> int:
        # a trivial H has k = 0; one round of samples still makes sense
        return max(1, self.k if self.k is not None else instance.k)

    def N(self, instance) -> int:
        return compute_N(self._k(instance), self.delta, self.delta)

    def sample_count(self, instance) -> int:
        return self.N(instance) * self._k(instance) + 1

    def __call__(self, instance, z, rng):
        gens = algorithm2(instance.h_sampler, self._k(instance), self.delta, self.delta, rng)
        return attack_with_generators(instance, gens, z, self.oracle, rng)


def attack_uniform(oracle, k=None) -> UniformAttack:
    return UniformAttack(oracle, k)


def attack_arbitrary(oracle, eps_star: float, k=None) -> ArbitraryAttack:
    return ArbitraryAttack(oracle, eps_star, k)


def uniform_attack_bound(eps: float) -> float:
    return 0.75 * (1 - eps) ** 2


def arbitrary_attack_bound(eps_star: float, eps: float) -> float:
    return (1 - eps_star) * (1 - eps) ** 2


def sample_bound(k: int) -> int:
    """7k(2 + ceil(log2 k)) + 1 samples, the eps* = 1/4 budget."""
    return 7 * k * (2 + math.ceil(math.log2(k))) + 1


class EStarDistinguisher:
    """Challenge m_star against a random other message; answer 0 iff the
    ciphertext is the fixed Enc(m_star; r_star)."""

    def __init__(self, m_star, r_star, base_scheme):
        self.m_star = m_star
        self.r_star = r_star
        self.base = base_scheme

    def choose(self, scheme, pk, rng):
        m_star = scheme.plaintext_group(pk).element(self.m_star)
        return m_star, scheme.random_message(pk, rng, exclude=m_star), m_star

    def guess(self, scheme, pk, c, m_star, rng):
        return 0 if c == self.base.enc(pk, m_star, self.r_star) else 1


def estar_distinguisher(m_star, r_star, base_scheme) -> EStarDistinguisher:
    return EStarDistinguisher(m_star, r_star, base_scheme)


@dataclass(frozen=True)
class ProbeReport:
    trials: int
    p_in: float
    p_out: float
    subgroup_order: int

    @property
    def halfwidth_in(self) -> float:
        return 1.96 * math.sqrt(max(self.p_in * (1 - self.p_in), 0.25 / self.trials) / self.trials)

    @property
    def halfwidth_out(self) -> float:
        return 1.96 * math.sqrt(max(self.p_out * (1 - self.p_out), 0.25 / self.trials) / self.trials)

    def to_dict(self) -> dict:
        return {"trials": self.trials, "p_in": self.p_in, "p_out": self.p_out,
                "halfwidth_in": self.halfwidth_in, "halfwidth_out": self.halfwidth_out,
                "subgroup_order": self.subgroup_order}


def sufficient_condition_probe(scheme, keys, m, m_prime, gens, trials: int, seed: int) -> ProbeReport:
    """Estimate Pr[Enc(m) in <gens>] and Pr[Enc(m') not in <gens>]."""
    pk = keys.pk
    P = scheme.plaintext_group(pk)
    m, m_prime = P.element(m), P.element(m_prime)
    sub = Subgroup(scheme.ciphertext_group(pk), gens)
    inside = outside = 0
    for t in range(trials):
        rng = trial_rng(seed, t, "probe")
        inside += scheme.encrypt(pk, m, rng) in sub
        outside += scheme.encrypt(pk, m_prime, rng) not in sub
    return ProbeReport(trials, inside / trials, outside / trials, sub.order)
