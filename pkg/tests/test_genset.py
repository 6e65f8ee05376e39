import math
import random
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ghelab.distributions import GroupDistribution, exotic, uniform
from ghelab.errors import ParameterError
from ghelab.genset import (SamplerConfig, algorithm1, algorithm2, compute_N, genset_trials,
                           gf2_spanning_probability, pak_bratus_estimate)
from ghelab.groups import BitVector, MultMod, Subgroup, gf2_rank

mpmath.mp.dps = 50
SQRT3_2 = math.sqrt(3) / 2


def N_oracle(k, delta, delta_star):
    """Closed form at 50 digits; sqrt(3)/2 is taken exactly."""
    d = mpmath.sqrt(3) / 2 if delta == SQRT3_2 else mpmath.mpf(delta)
    ds = mpmath.sqrt(3) / 2 if delta_star == SQRT3_2 else mpmath.mpf(delta_star)
    ratio = (mpmath.log(1 - ds, 2) - mpmath.log(k, 2)) / mpmath.log(d, 2)
    return max(1, int(mpmath.ceil(ratio)))


def test_compute_N_examples():
    assert compute_N(1, 0.5, 0.5) == 1
    assert compute_N(8, SQRT3_2, SQRT3_2) == 29
    assert compute_N(4, SQRT3_2, SQRT3_2) == 24


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 8, 12, 16, 64, 1000])
@pytest.mark.parametrize("delta", [0.5, 0.75, 0.9, SQRT3_2, 0.99])
def test_compute_N_matches_high_precision(k, delta):
    assert compute_N(k, delta, delta) == N_oracle(k, delta, delta)


def test_final_sample_bound():
    for k in range(1, 4097):
        N = compute_N(k, SQRT3_2, SQRT3_2)
        assert N == N_oracle(k, SQRT3_2, SQRT3_2)
        assert N <= 7 * (math.ceil(math.log2(k)) + 2), k
        assert SamplerConfig(k, SQRT3_2, SQRT3_2).total_samples <= 7 * k * (2 + math.ceil(math.log2(k))) + 1
    # tight at k = 1
    assert compute_N(1, SQRT3_2, SQRT3_2) == 14


@settings(max_examples=300)
@given(st.integers(1, 500), st.integers(1, 500),
       st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.0, 0.95), st.floats(0.0, 0.95))
def test_compute_N_monotone(k1, k2, d1, d2, s1, s2):
    lo_k, hi_k = sorted((k1, k2))
    assert compute_N(lo_k, d1, s1) <= compute_N(hi_k, d1, s1)
    lo_d, hi_d = sorted((d1, d2))
    assert compute_N(k1, lo_d, s1) <= compute_N(k1, hi_d, s1)
    lo_s, hi_s = sorted((s1, s2))
    assert compute_N(k1, d1, lo_s) <= compute_N(k1, d1, hi_s)
    assert compute_N(k1, d1, s1) >= 1


@pytest.mark.parametrize("args", [(0, 0.5, 0.5), (1, 0, 0.5), (1, 1, 0.5), (1, 0.5, 1),
                                  (1, 0.5, -0.1)])
def test_compute_N_rejects(args):
    with pytest.raises(ParameterError):
        compute_N(*args)


def point_mass(G, x):
    return GroupDistribution(G, lambda rng: x, lambda v: Fraction(int(v == x)), "point")


def test_algorithm1_identity_sampler_aborts():
    G = MultMod(15)
    run = algorithm1(point_mass(G, G.identity), 3, 0.9, 0.9, random.Random(0))
    assert run.generators == [G.identity]
    assert run.aborted
    assert run.order_trace == [1]
    assert run.samples_used == 1 + compute_N(3, 0.9, 0.9)


def test_algorithm1_never_exceeds_budget():
    D = uniform(BitVector(5))
    for t in range(200):
        run = algorithm1(D, 5, 0.8, 0.8, random.Random(t))
        assert len(run.generators) <= compute_N(5, 0.8, 0.8) * 5 + 1
        assert len(set(run.generators)) == len(run.generators)
        assert run.samples_used <= SamplerConfig(5, 0.8, 0.8).total_samples
        assert not run.growth_violations()


@pytest.mark.parametrize("D, k", [(uniform(BitVector(5)), 5), (exotic(4), 4),
                                  (uniform(MultMod(63)), 6)], ids=["bv5", "exotic4", "mm63"])
def test_algorithm2_contains_algorithm1(D, k):
    for t in range(100):
        run = algorithm1(D, k, 0.9, 0.9, random.Random(t))
        out = algorithm2(D, k, 0.9, 0.9, random.Random(t))
        assert len(out) == compute_N(k, 0.9, 0.9) * k + 1
        assert set(run.generators) <= set(out)
        # so algorithm 2 succeeds whenever algorithm 1 does
        assert Subgroup(D.group, run.generators).order <= Subgroup(D.group, out).order


def test_algorithm1_spans_bitvector4():
    D = uniform(BitVector(4))
    spans = sum(Subgroup(D.group, algorithm1(D, 4, 0.9, 0.9, random.Random(t)).generators).order == 16
                for t in range(10_000))
    assert spans >= 9900


def test_genset_rows_and_determinism():
    rows = genset_trials(exotic(4), 4, 0.9, 0.9, 20, seed=5)
    assert [r["trial"] for r in rows] == list(range(20))
    assert set(rows[0]) == {"trial", "samples_used", "subgroup_order", "covering_prob", "success"}
    assert rows == genset_trials(exotic(4), 4, 0.9, 0.9, 20, seed=5)
    # a split run reproduces the same rows
    assert rows == (genset_trials(exotic(4), 4, 0.9, 0.9, 7, seed=5)
                    + genset_trials(exotic(4), 4, 0.9, 0.9, 13, seed=5, first_trial=7))
    assert all(r["success"] == (r["covering_prob"] >= 0.9) for r in rows)
    with pytest.raises(ParameterError):
        genset_trials(exotic(4), 4, 0.9, 0.9, 1, seed=5, algorithm=3)


def brute_spanning(lam, m):
    vecs = list(product((0, 1), repeat=lam))
    hits = sum(gf2_rank(t) == lam for t in product(vecs, repeat=m))
    return Fraction(hits, len(vecs) ** m)


@pytest.mark.parametrize("lam, m", [(1, 1), (2, 1), (2, 2), (2, 4), (3, 3), (3, 4), (3, 5)])
def test_spanning_formula_brute_force(lam, m):
    assert gf2_spanning_probability(lam, m) == brute_spanning(lam, m)


def test_spanning_formula_value():
    p = gf2_spanning_probability(8, 12)
    assert float(p) == pytest.approx(math.prod(1 - 2.0 ** -(12 - i) for i in range(8)))
    assert p > Fraction(3, 4)


def test_pak_bratus_overwhelming_samples():
    G = BitVector(5)
    assert pak_bratus_estimate(G, G.order, 500, seed=0) == 1.0


def test_pak_bratus_small_matches_formula():
    G = BitVector(4)
    est = pak_bratus_estimate(G, 1, 20_000, seed=11)
    assert abs(est - float(gf2_spanning_probability(4, 5))) < 0.015
