"""Acceptance gate: each bound checked one-sided at desk scale.

All randomness derives from one master seed fixed before any run.
"""

import math
import random
import time

import pytest

from ghelab import attacks, games
from ghelab.distributions import exotic, uniform
from ghelab.genset import (algorithm1, compute_N, genset_trials, gf2_spanning_probability,
                           pak_bratus_estimate)
from ghelab.groups import BitVector
from ghelab.oracle import ExactOracle, make_oracle, quantum_order_finding, shot_success_probability
from ghelab.rng import trial_rng
from ghelab.schemes import (ToyElGamal, ciphertext_classes, estar_wrap, fact1_check,
                            goldwasser_micali, toy_elgamal)

SEED = 1
Z = 1.96


def halfwidth(trials):
    return Z * math.sqrt(0.25 / trials)


def elgamal23():
    s = toy_elgamal(23, 5)
    keys = s.keygen(trial_rng(SEED, 0, "keygen"))
    return s, keys, games.smp_from_scheme(s, keys.pk)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


@pytest.mark.criterion(1, "k+4 uniform samples generate BitVector(8)")
def test_c01_pak_bratus(record_property):
    with Timer() as t:
        est = pak_bratus_estimate(BitVector(8), 4, 20_000, SEED)
    exact = float(gf2_spanning_probability(8, 12))
    assert exact == pytest.approx(math.prod(1 - 2.0 ** -(12 - i) for i in range(8)))
    record_property("empirical", round(est, 5))
    record_property("exact", round(exact, 5))
    record_property("seconds", round(t.seconds, 1))
    assert est >= 0.75
    assert abs(est - exact) <= 0.01
    assert t.seconds <= 30


@pytest.mark.criterion(2, "algorithm 2 yields delta-covering subgroups of exotic(6)")
def test_c02_delta_covering(record_property):
    with Timer() as t:
        rows = genset_trials(exotic(6), 6, 0.9, 0.9, 2000, SEED, algorithm=2)
    rate = sum(r["success"] for r in rows) / len(rows)
    record_property("success", rate)
    record_property("seconds", round(t.seconds, 1))
    assert rate >= 0.9 - halfwidth(2000)
    assert t.seconds <= 120


@pytest.mark.criterion(3, "every completed algorithm 1 round at least doubles the order")
def test_c03_order_growth(record_property):
    D = uniform(BitVector(6))
    violations = rounds = 0
    for trial in range(10_000):
        run = algorithm1(D, 6, 0.9, 0.9, trial_rng(SEED, trial, "growth"))
        rounds += run.rounds_extended
        violations += len(run.growth_violations())
        # the trace also satisfies |H_l| >= 2^l directly
        assert all(o >= 2**l for l, o in enumerate(run.order_trace))
    record_property("rounds", rounds)
    record_property("violations", violations)
    assert violations == 0


@pytest.mark.criterion(4, "order comparison with full-H generators decides membership")
@pytest.mark.parametrize("scheme", [toy_elgamal(7, 3), goldwasser_micali(7, 11)], ids=repr)
def test_c04_known_generators(scheme, record_property):
    keys = scheme.keygen(trial_rng(SEED, 0, "keygen"))
    inst = games.smp_from_scheme(scheme, keys.pk)
    c1 = ciphertext_classes(scheme, keys)[scheme.identity_message(keys.pk)]
    gens = sorted(c1)
    rng = random.Random(SEED)
    errors = sum(attacks.attack_with_generators(inst, gens, z, ExactOracle(), rng) != (z not in c1)
                 for z in inst.group.elements())
    record_property(f"errors[{scheme!r}]", errors)
    assert errors == 0


@pytest.mark.criterion(5, "uniform attack succeeds with probability >= 3/4 (1-eps)^2")
@pytest.mark.parametrize("eps", [0.0, 0.1])
def test_c05_uniform_attack(eps, record_property):
    _, _, inst = elgamal23()
    with Timer() as t:
        rep = games.smp_experiment(inst, attacks.attack_uniform(make_oracle(eps)), 5000, SEED)
    bound = attacks.uniform_attack_bound(eps)
    record_property(f"success[eps={eps}]", rep.success_rate)
    assert rep.success_rate >= bound - rep.halfwidth
    assert t.seconds <= 120


class CountingSampler:
    def __init__(self, dist):
        self.dist = dist
        self.calls = 0

    def sample(self, rng):
        self.calls += 1
        return self.dist.sample(rng)


@pytest.mark.criterion(6, "arbitrary-sampling attack at eps*=1/4 with N*k+1 samples")
@pytest.mark.parametrize("name, eps", [("elgamal23", 0.0), ("elgamal23", 0.1), ("exotic6", 0.0)])
def test_c06_arbitrary_attack(name, eps, record_property):
    inst = elgamal23()[2] if name == "elgamal23" else games.exotic_instance(6)
    counter = CountingSampler(inst.h_sampler)
    inst.h_sampler = counter
    attack = attacks.attack_arbitrary(make_oracle(eps), 0.25)
    per_game = []

    def counted(instance, z, rng):
        counter.calls = 0
        bit = attack(instance, z, rng)
        per_game.append(counter.calls)
        return bit

    rep = games.smp_experiment(inst, counted, 5000, SEED)
    k = inst.k
    N = compute_N(k, math.sqrt(0.75), math.sqrt(0.75))
    record_property(f"success[{name},eps={eps}]", rep.success_rate)
    record_property(f"samples[{name}]", f"{N}*{k}+1")
    assert set(per_game) == {N * k + 1}
    assert N <= 7 * (math.ceil(math.log2(k)) + 2)
    assert rep.success_rate >= attacks.uniform_attack_bound(eps) - rep.halfwidth


@pytest.mark.criterion(7, "reduction preserves the SMP advantage")
@pytest.mark.parametrize("which", ["omniscient", "uniform"])
def test_c07_reduction(which, record_property):
    s, keys, inst = elgamal23()
    adversary = games.omniscient if which == "omniscient" else attacks.attack_uniform(ExactOracle())
    direct = games.smp_experiment(inst, adversary, 10_000, SEED)
    reduced = games.indcpa_experiment(s, keys, games.reduce_smp_to_indcpa(adversary), 10_000, SEED)
    gap = abs(reduced.advantage - direct.advantage)
    record_property(f"gap[{which}]", round(gap, 5))
    assert gap <= direct.halfwidth + reduced.halfwidth


def _estar_setup():
    base = toy_elgamal(23, 5)
    keys = base.keygen(trial_rng(SEED, 0, "keygen"))
    return base, keys, estar_wrap(base, 2, 3, keys.pk), attacks.estar_distinguisher(2, 3, base)


@pytest.mark.criterion(8, "E* distinguisher: 1/4 on E*, negligible on the base scheme")
def test_c08_estar_wrapped(record_property):
    base, keys, wrapped, dist = _estar_setup()
    rep = games.indcpa_experiment(wrapped, keys, dist, 10_000, SEED)
    record_property("adv[E*]", round(rep.advantage, 5))
    assert abs(rep.advantage - 0.25) <= 0.02


@pytest.mark.criterion(8, "E* distinguisher: 1/4 on E*, negligible on the base scheme")
def test_c08_estar_base(record_property):
    base, keys, _, dist = _estar_setup()
    rep = games.indcpa_experiment(base, keys, dist, 10_000, SEED)
    record_property("adv[base]", round(rep.advantage, 5))
    # the expected value is 1/(2|Rnd|) = 1/44 for this base scheme
    record_property("adv[base] expected", round(1 / 44, 5))
    assert rep.advantage <= 0.02


class KeylessElGamal(ToyElGamal):
    def dec(self, sk, c):
        return (c[1],)


@pytest.mark.criterion(9, "valid ciphertexts are cosets of the normal subgroup C_1")
def test_c09_fact1(record_property):
    for scheme in (toy_elgamal(7, 3), goldwasser_micali(7, 11)):
        keys = scheme.keygen(trial_rng(SEED, 0, "keygen"))
        report = fact1_check(scheme, keys, trial_rng(SEED, 0, "fact1"))
        assert report.passed, report.failures()
    G = toy_elgamal(7, 3).ciphertext_group(None)
    assert G.order == 36
    bad = KeylessElGamal(7, 3)
    report = fact1_check(bad, bad.keys_from_secret(2))
    failures = report.failures()
    record_property("negative_control", sorted(failures))
    assert "coset_structure" in failures and failures["coset_structure"]["message"]


@pytest.mark.criterion(10, "phase estimation recovers the order of 2 mod 15")
def test_c10_quantum(record_property):
    with Timer() as t:
        hits, shots_ok, shots = 0, 0, 0
        for rep in range(100):
            est, records = quantum_order_finding(2, 15, 8, 20, trial_rng(SEED, rep, "qorder"))
            hits += est == 4
            shots_ok += sum(r.decoded_order == 4 for r in records)
            shots += len(records)
    record_property("recovered", f"{hits}/100")
    record_property("shot_rate", shots_ok / shots)
    assert hits >= 99
    assert shot_success_probability(2, 15, 8) == pytest.approx(0.5, abs=1e-9)
    assert abs(shots_ok / shots - 0.5) <= 3 * math.sqrt(0.25 / shots)
    assert t.seconds <= 60
