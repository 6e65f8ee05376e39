import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ghelab.distributions import (covering_probability, distribution_from_json, exotic,
                                  exotic_v1_one_mass, from_table, greedy_covering_generators,
                                  is_delta_covering, total_variation, uniform, uniform_over)
from ghelab.errors import DomainError, ParameterError
from ghelab.groups import BitVector, CyclicProduct, MultMod, Subgroup, closure


class Enumerator:
    """Stand-in rng whose randrange returns a scripted value, to push every
    point of the integer sample space through a sampler."""

    def __init__(self, u):
        self.u = u

    def randrange(self, n):
        assert 0 <= self.u < n
        return self.u


def eq1_mass(v, lam):
    # direct evaluation of the defining formula
    if v[0] == 0:
        return Fraction(1, 2 ** (lam - 1)) - Fraction(1, 2 ** (lam * (lam - 1)))
    return Fraction(1, 2 ** (lam * (lam - 1)))


def test_uniform_examples():
    assert set(uniform(BitVector(2)).table().values()) == {Fraction(1, 4)}
    assert set(uniform(MultMod(7)).table().values()) == {Fraction(1, 6)}


def test_exotic_examples():
    assert set(exotic(2).table().values()) == {Fraction(1, 4)}
    t = exotic(3).table()
    assert all(p == (Fraction(15, 64) if v[0] == 0 else Fraction(1, 64)) for v, p in t.items())
    assert sum(t.values()) == 1


@pytest.mark.parametrize("lam", range(2, 8))
def test_exotic_matches_formula_and_normalizes(lam):
    t = exotic(lam).table()
    assert all(p == eq1_mass(v, lam) for v, p in t.items())
    assert sum(t.values()) == 1
    per, total = exotic_v1_one_mass(lam)
    assert per == Fraction(1, 2 ** (lam * (lam - 1)))
    assert total == sum(p for v, p in t.items() if v[0] == 1)
    assert total == Fraction(1, 2 ** ((lam - 1) ** 2))


@pytest.mark.parametrize("lam", [2, 3, 4])
def test_exotic_sampler_is_exact(lam):
    # every integer draw, counted: hits per vector must equal mass * 2^e
    e = lam * (lam - 1)
    D = exotic(lam)
    counts = Counter(D.sample(Enumerator(u)) for u in range(2**e))
    assert {v: Fraction(c, 2**e) for v, c in counts.items()} == D.table()


def test_exotic_rejects_small_lambda():
    with pytest.raises(ParameterError):
        exotic(1)


@pytest.mark.parametrize("D", [
    uniform(BitVector(6)),
    uniform(MultMod(7)),
    exotic(3),
    exotic(6),
    from_table(CyclicProduct((4,)), {(0,): 0.5, (1,): 0.25, (2,): 0.125, (3,): 0.125}),
    from_table(CyclicProduct((3,)), {(0,): Fraction(1, 3), (2,): Fraction(2, 3)}),
], ids=lambda D: D.name)
def test_sampler_tv_distance(D):
    rng = random.Random(D.name)
    samples = [D.sample(rng) for _ in range(100_000)]
    assert total_variation(D, samples) <= 0.02


def test_covering_examples():
    D = exotic(3)
    whole = Subgroup(D.group, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert covering_probability(whole, D) == 1
    v1_zero = Subgroup(D.group, [(0, 1, 0), (0, 0, 1)])
    assert covering_probability(v1_zero, D) == Fraction(60, 64)
    trivial = Subgroup(D.group, [(0, 0, 0)])
    assert covering_probability(trivial, D) == Fraction(15, 64)


def test_is_delta_covering_examples():
    D = exotic(3)
    whole = Subgroup(D.group, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert all(is_delta_covering(whole, D, d) for d in (0, 0.5, 1))
    assert is_delta_covering(Subgroup(D.group, [(0, 1, 0), (0, 0, 1)]), D, 0.9)
    assert not is_delta_covering(Subgroup(D.group, [(0, 0, 0)]), D, 0.5)
    with pytest.raises(ParameterError):
        is_delta_covering(whole, D, 1.5)


def test_covering_group_mismatch():
    with pytest.raises(DomainError):
        covering_probability(Subgroup(BitVector(2), [(1, 0)]), exotic(3))


def test_greedy_examples():
    D = exotic(3)
    sub = greedy_covering_generators(D, 0)
    assert sub.generators == ((0, 0, 0),)
    sub = greedy_covering_generators(D, 0.9)
    assert sub.generators == ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1))
    assert sub.elements == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
    assert covering_probability(sub, D) == Fraction(15, 16)
    assert greedy_covering_generators(uniform(BitVector(2)), 1).order == 4
    with pytest.raises(ParameterError):
        greedy_covering_generators(D, -0.1)


@settings(max_examples=60)
@given(st.lists(st.integers(0, 20), min_size=8, max_size=8).filter(any),
       st.floats(0, 1))
def test_greedy_always_covers(weights, delta):
    G = BitVector(3)
    total = sum(weights)
    D = from_table(G, {x: Fraction(w, total) for x, w in zip(G.elements(), weights)})
    assert covering_probability(greedy_covering_generators(D, delta), D) >= delta


def test_uniform_over_subgroup():
    sub = closure(MultMod(15), [2])
    D = uniform_over(sub)
    assert D.prob(4) == Fraction(1, 4)
    assert D.prob(7) == 0
    rng = random.Random(0)
    assert all(D.sample(rng) in sub for _ in range(200))


def test_from_table_validation():
    G = CyclicProduct((2,))
    with pytest.raises(ParameterError):
        from_table(G, {(0,): Fraction(1, 2), (1,): Fraction(1, 3)})
    with pytest.raises(ParameterError):
        from_table(G, {(0,): 1.5, (1,): -0.5})
    # float tables tolerate rounding
    from_table(G, {(0,): 0.1 + 0.2, (1,): 0.7})


def test_prob_requires_mass():
    from ghelab.distributions import GroupDistribution
    D = GroupDistribution(BitVector(2), lambda rng: (0, 0))
    with pytest.raises(DomainError):
        D.prob((0, 0))


def test_json_specs():
    assert distribution_from_json({"kind": "exotic", "lambda": 6}).name == "exotic(6)"
    D = distribution_from_json({"kind": "uniform", "group": {"family": "multmod", "n": 7}})
    assert D.prob(3) == Fraction(1, 6)
    D = distribution_from_json({"kind": "table", "pmf": ["1/2", "1/4", "1/4", 0],
                                "group": {"family": "bitvector", "lambda": 2}})
    assert D.prob((1, 0)) == Fraction(1, 4)
    with pytest.raises(ParameterError):
        distribution_from_json({"kind": "uniform"})
    with pytest.raises(ParameterError):
        distribution_from_json({"kind": "table", "pmf": [1],
                                "group": {"family": "bitvector", "lambda": 2}})
