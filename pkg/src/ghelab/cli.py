"""Seeded command-line driver for the ghelab experiments.

Every command writes one report (JSON by default, CSV with --format csv)
that embeds the resolved config and the bound under test. Exit codes:
0 ok, 2 the bound was measurably violated, 1 usage or config error.

    python -m ghelab pak-bratus --lambda 8 --extra 4 --trials 20000 --seed 42
    python -m ghelab qorder --a 2 --n 15 --precision 8 --shots 100 --seed 7
    python -m ghelab impossibility-demo --scheme '{"scheme":"elgamal","p":23,"g":5}' \\
        --eps-star 0.25 --trials 5000 --seed 1
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import attacks, games
from .distributions import (covering_probability, distribution_from_json,
                            greedy_covering_generators)
from .errors import (ClosureOverflowError, DomainError, GameError, InstanceError,
                     MalformedElementError, ParameterError)
from .genset import (SamplerConfig, algorithm1, genset_trials, gf2_spanning_probability,
                     pak_bratus_hits)
from .groups import BitVector, MultMod, Subgroup, group_from_json
from .oracle import QuantumCyclicOracle, make_oracle, quantum_order_finding
from .rng import trial_rng
from .schemes import estar_wrap, fact1_check, scheme_from_json

EXIT_OK, EXIT_USAGE, EXIT_BOUND = 0, 1, 2
ELGAMAL_23 = {"scheme": "elgamal", "p": 23, "g": 5}


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    seed: int = 0
    trials: int = 1000
    format: str = "json"
    out: Optional[str] = None
    threads: int = 1
    params: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("threads")  # results do not depend on it
        return d


@dataclass
class Report:
    results: dict
    bound: Optional[dict] = None
    satisfied: bool = True
    rows: Optional[list] = None


# Helpers --------------------------------------------------------------------

def _chunks(trials: int, threads: int):
    threads = max(1, min(threads, trials))
    step, extra = divmod(trials, threads)
    start = 0
    for i in range(threads):
        n = step + (i < extra)
        yield start, n
        start += n


def _parallel(fn, trials: int, threads: int) -> list:
    """fn(first_trial, count) over contiguous trial ranges, results in range order."""
    spans = list(_chunks(trials, threads))
    if len(spans) == 1:
        return [fn(*spans[0])]
    with ThreadPoolExecutor(len(spans)) as pool:
        return list(pool.map(lambda s: fn(*s), spans))


def _merge(reports):
    out = reports[0]
    for r in reports[1:]:
        out = out.merge(r)
    return out


def _halfwidth(trials: int) -> float:
    return games.Z95 * math.sqrt(0.25 / trials)


def _scheme_and_keys(cfg: ExperimentConfig):
    scheme = scheme_from_json(cfg.params["scheme"])
    return scheme, scheme.keygen(trial_rng(cfg.seed, 0, "keygen"))


def _instance(cfg: ExperimentConfig):
    spec = cfg.params.get("instance")
    if spec is not None:
        if spec.get("kind") != "exotic":
            raise ParameterError(f"unknown instance kind {spec.get('kind')!r}")
        return games.exotic_instance(int(spec.get("lambda", 6))), None
    scheme, keys = _scheme_and_keys(cfg)
    return games.smp_from_scheme(scheme, keys.pk), (scheme, keys)


def _smp_attack(name: str, cfg: ExperimentConfig):
    """Attack adversary plus its (bound statement, value)."""
    p = cfg.params
    eps = float(p["eps"])
    oracle = make_oracle(eps)
    if name == "uniform":
        return (attacks.attack_uniform(oracle),
                ("success >= 3/4 (1 - eps)^2", attacks.uniform_attack_bound(eps)))
    if name == "arbitrary":
        es = float(p["eps_star"])
        return (attacks.attack_arbitrary(oracle, es),
                ("success >= (1 - eps*)(1 - eps)^2", attacks.arbitrary_attack_bound(es, eps)))
    if name == "generators":
        return (_FullGenerators(oracle), ("success >= (1 - eps)^2", (1 - eps) ** 2))
    if name == "omniscient":
        return games.omniscient, ("success = 1", 1.0)
    if name == "coin":
        return games.coin_flipper, ("success = 1/2", 0.5)
    raise ParameterError(f"unknown attack {name!r}")


class _FullGenerators:
    """Known-generators attack using a generating set of all of H."""

    def __init__(self, oracle):
        self.oracle = oracle

    def __call__(self, instance, z, rng):
        gens = instance.h_generators or sorted(instance.h_support)
        return attacks.attack_with_generators(instance, gens, z, self.oracle, rng)


def _one_sided(rate: float, bound: float, hw: float) -> bool:
    return rate >= bound - hw


# Commands -------------------------------------------------------------------

def cmd_pak_bratus(cfg):
    p = cfg.params
    G = group_from_json(p["group"]) if p.get("group") else BitVector(int(p["lambda"]))
    extra = int(p["extra"])
    if extra < 0:
        raise ParameterError("extra must be non-negative")
    hits = sum(_parallel(lambda s, n: pak_bratus_hits(G, extra, n, cfg.seed, s),
                         cfg.trials, cfg.threads))
    rate = hits / cfg.trials
    hw = _halfwidth(cfg.trials)
    results = {"group": G.to_json(), "k": G.k, "samples_per_trial": G.k + extra,
               "hits": hits, "empirical": rate, "halfwidth": hw}
    if isinstance(G, BitVector):
        results["exact"] = float(gf2_spanning_probability(G.lam, G.k + extra))
    bound = {"statement": "Pr[k + 4 uniform samples generate G] > 3/4", "value": 0.75}
    return Report(results, bound, _one_sided(rate, 0.75, hw))


def cmd_covering(cfg):
    p = cfg.params
    D = distribution_from_json(p["distribution"])
    delta = float(p["delta"])
    sub = greedy_covering_generators(D, delta)
    mass = covering_probability(sub, D)
    results = {"distribution": D.name, "generators": [list(g) for g in sub.generators],
               "b": len(sub.generators), "subgroup_order": sub.order,
               "group_order": D.group.order, "covering_probability": float(mass),
               "covering_probability_exact": str(mass)}
    bound = {"statement": "Pr_D[H*] >= delta", "value": delta}
    return Report(results, bound, mass >= delta)


def cmd_genset(cfg):
    p = cfg.params
    D = distribution_from_json(p["distribution"])
    delta, dstar = float(p["delta"]), float(p["delta_star"])
    k = int(p["k"]) if p.get("k") is not None else D.group.k
    sc = SamplerConfig(k, delta, dstar)
    algorithm = int(p["algorithm"])
    if algorithm not in (1, 2):
        raise ParameterError(f"algorithm must be 1 or 2, got {algorithm}")
    rows = sum(_parallel(lambda s, n: genset_trials(D, k, delta, dstar, n, cfg.seed,
                                                    algorithm, s),
                         cfg.trials, cfg.threads), [])
    rate = sum(r["success"] for r in rows) / cfg.trials
    hw = _halfwidth(cfg.trials)
    results = {"k": k, "N": sc.N, "max_samples": sc.total_samples,
               "success_fraction": rate, "halfwidth": hw}
    if algorithm == 1:
        violations = 0
        for t in range(cfg.trials):
            run = algorithm1(D, k, delta, dstar, trial_rng(cfg.seed, t, "genset-growth"))
            violations += bool(run.growth_violations())
        results["order_growth_violations"] = violations
    bound = {"statement": "Pr[<S> is delta-covering] >= delta*", "value": dstar}
    ok = _one_sided(rate, dstar, hw) and not results.get("order_growth_violations")
    return Report(results, bound, ok, rows)


def cmd_attack_smp(cfg):
    instance, _ = _instance(cfg)
    adversary, (statement, value) = _smp_attack(cfg.params["attack"], cfg)
    rep = _merge(_parallel(lambda s, n: games.smp_experiment(instance, adversary, n, cfg.seed, s),
                           cfg.trials, cfg.threads))
    results = {"instance": instance.name, "k": instance.k, **rep.to_dict()}
    if hasattr(adversary, "sample_count"):
        results["samples_per_game"] = adversary.sample_count(instance)
    if hasattr(adversary, "N"):
        results["N"] = adversary.N(instance)
        results["N_bound"] = 7 * (math.ceil(math.log2(max(instance.k, 1))) + 2)
    bound = {"statement": statement, "value": value}
    return Report(results, bound, _one_sided(rep.success_rate, value, rep.halfwidth))


def _indcpa_adversary(name: str, cfg, scheme, keys):
    p = cfg.params
    if name == "random":
        return games.RandomGuesser()
    if name == "sk":
        return games.SecretKeyAdversary(keys.sk)
    if name.startswith("reduced-"):
        adv, _ = _smp_attack(name[len("reduced-"):], cfg)
        return games.reduce_smp_to_indcpa(adv)
    if name == "estar":
        return attacks.estar_distinguisher(p["m_star"], _r(p["r_star"]), scheme.base)
    raise ParameterError(f"unknown adversary {name!r}")


def _r(r):
    return tuple(r) if isinstance(r, list) else r


def _indcpa(cfg, scheme, keys, adversary):
    return _merge(_parallel(lambda s, n: games.indcpa_experiment(scheme, keys, adversary, n,
                                                                 cfg.seed, s),
                            cfg.trials, cfg.threads))


def cmd_indcpa(cfg):
    scheme, keys = _scheme_and_keys(cfg)
    adversary = _indcpa_adversary(cfg.params["adversary"], cfg, scheme, keys)
    rep = _indcpa(cfg, scheme, keys, adversary)
    return Report({"scheme": repr(scheme), **rep.to_dict()},
                  {"statement": "none; advantage is reported", "value": None}, True)


def cmd_reduce_demo(cfg):
    scheme, keys = _scheme_and_keys(cfg)
    instance = games.smp_from_scheme(scheme, keys.pk)
    adversary, _ = _smp_attack(cfg.params["attack"], cfg)
    direct = _merge(_parallel(lambda s, n: games.smp_experiment(instance, adversary, n,
                                                                cfg.seed, s),
                              cfg.trials, cfg.threads))
    reduced = _indcpa(cfg, scheme, keys, games.reduce_smp_to_indcpa(adversary))
    gap = abs(reduced.advantage - direct.advantage)
    tol = direct.halfwidth + reduced.halfwidth
    results = {"scheme": repr(scheme), "smp": direct.to_dict(), "indcpa": reduced.to_dict(),
               "advantage_gap": gap}
    bound = {"statement": "|Adv_indcpa(reduced) - Adv_smp| <= sum of halfwidths", "value": tol}
    return Report(results, bound, gap <= tol)


def cmd_estar_demo(cfg):
    p = cfg.params
    base = scheme_from_json(p["scheme"])
    keys = base.keygen(trial_rng(cfg.seed, 0, "keygen"))
    r_star = _r(p["r_star"])
    wrapped = estar_wrap(base, p["m_star"], r_star, keys.pk)
    dist = attacks.estar_distinguisher(p["m_star"], r_star, base)
    on_wrapped = _indcpa(cfg, wrapped, keys, dist)
    on_base = _indcpa(cfg, base, keys, dist)
    results = {"scheme": repr(wrapped), "estar": on_wrapped.to_dict(), "base": on_base.to_dict(),
               "base_exact_advantage": 1 / (2 * len(base.randomness(keys.pk)))}
    bound = {"statement": "Adv(E*) = 1/4 +- 0.02 and Adv(base) <= 0.02",
             "value": {"estar": 0.25, "tolerance": 0.02, "base_max": 0.02}}
    ok = abs(on_wrapped.advantage - 0.25) <= 0.02 and on_base.advantage <= 0.02
    return Report(results, bound, ok)


def cmd_fact1(cfg):
    scheme, keys = _scheme_and_keys(cfg)
    report = fact1_check(scheme, keys, trial_rng(cfg.seed, 0, "fact1"))
    results = {"scheme": repr(scheme), "passed": report.passed, "checks": report.checks}
    bound = {"statement": "C_1 is a proper normal subgroup and the C_m are its cosets",
             "value": None}
    return Report(results, bound, report.passed)


def cmd_qorder(cfg):
    p = cfg.params
    a, n = int(p["a"]), int(p["n"])
    t = int(p["precision"])
    estimate, records = quantum_order_finding(a, n, t, int(p["shots"]),
                                              trial_rng(cfg.seed, 0, "qorder"))
    true = MultMod(n).element_order(a % n)
    rows = [{"shot": i, "y": r.measured_phase_numerator, "decoded_r": r.decoded_order}
            for i, r in enumerate(records)]
    hits = sum(r.decoded_order == true for r in records)
    results = {"a": a, "n": n, "precision": t, "order": estimate, "classical_order": true,
               "shot_success_rate": hits / len(records)}
    bound = {"statement": "phase estimation outputs the order of a", "value": true}
    return Report(results, bound, estimate == true, rows)


def _probe_gens(cfg, scheme, keys):
    spec = cfg.params["gens"]
    pk = keys.pk
    if spec == "c1":
        one = scheme.identity_message(pk)
        return sorted({scheme.enc(pk, one, r) for r in scheme.randomness(pk)})
    if spec == "c":
        P = scheme.plaintext_group(pk)
        return sorted({scheme.enc(pk, m, r) for m in P.elements() for r in scheme.randomness(pk)})
    if isinstance(spec, dict) and "random" in spec:
        G = scheme.ciphertext_group(pk)
        rng = trial_rng(cfg.seed, 0, "probe-gens")
        return [G.sample(rng) for _ in range(int(spec["random"]))]
    if isinstance(spec, list):
        return spec
    raise ParameterError(f"gens must be 'c1', 'c', {{'random': n}} or a list, got {spec!r}")


def cmd_condition_probe(cfg):
    scheme, keys = _scheme_and_keys(cfg)
    p = cfg.params
    P = scheme.plaintext_group(keys.pk)
    m = P.element(p["m"]) if p.get("m") is not None else P.identity
    m_prime = (P.element(p["m_prime"]) if p.get("m_prime") is not None
               else scheme.random_message(keys.pk, trial_rng(cfg.seed, 0, "probe-m"), exclude=m))
    gens = _probe_gens(cfg, scheme, keys)
    rep = attacks.sufficient_condition_probe(scheme, keys, m, m_prime, gens, cfg.trials, cfg.seed)
    results = {"scheme": repr(scheme), "m": list(m), "m_prime": list(m_prime),
               "generators": [list(g) for g in Subgroup(scheme.ciphertext_group(keys.pk), gens).generators],
               **rep.to_dict()}
    bound = {"statement": "none; p_in and p_out are reported", "value": None}
    return Report(results, bound, True)


def cmd_impossibility_demo(cfg):
    scheme, keys = _scheme_and_keys(cfg)
    p = cfg.params
    eps, es = float(p["eps"]), float(p["eps_star"])
    adversary = games.reduce_smp_to_indcpa(attacks.attack_arbitrary(make_oracle(eps), es))
    rep = _indcpa(cfg, scheme, keys, adversary)
    value = attacks.arbitrary_attack_bound(es, eps) - 0.5
    results = {"scheme": repr(scheme), **rep.to_dict()}
    bound = {"statement": "IND-CPA advantage >= (1 - eps*)(1 - eps)^2 - 1/2", "value": value}
    return Report(results, bound, rep.advantage >= value - rep.halfwidth)


# name -> (handler, default trials, default params)
COMMANDS = {
    "pak-bratus": (cmd_pak_bratus, 20000, {"lambda": 8, "extra": 4, "group": None}),
    "covering": (cmd_covering, 1, {"distribution": {"kind": "exotic", "lambda": 3},
                                   "delta": 0.9}),
    "genset": (cmd_genset, 2000, {"distribution": {"kind": "exotic", "lambda": 6},
                                  "delta": 0.9, "delta_star": 0.9, "k": None, "algorithm": 2}),
    "attack-smp": (cmd_attack_smp, 5000, {"scheme": ELGAMAL_23, "instance": None,
                                          "attack": "uniform", "eps": 0.0, "eps_star": 0.25}),
    "indcpa": (cmd_indcpa, 10000, {"scheme": ELGAMAL_23, "adversary": "reduced-uniform",
                                   "eps": 0.0, "eps_star": 0.25, "m_star": 2, "r_star": 3}),
    "reduce-demo": (cmd_reduce_demo, 10000, {"scheme": ELGAMAL_23, "attack": "uniform",
                                             "eps": 0.0, "eps_star": 0.25}),
    "estar-demo": (cmd_estar_demo, 10000, {"scheme": ELGAMAL_23, "m_star": 2, "r_star": 3}),
    "fact1": (cmd_fact1, 1, {"scheme": {"scheme": "elgamal", "p": 7, "g": 3}}),
    "qorder": (cmd_qorder, 1, {"a": 2, "n": 15, "precision": 8, "shots": 20}),
    "condition-probe": (cmd_condition_probe, 10000, {"scheme": ELGAMAL_23, "m": None,
                                                     "m_prime": None, "gens": "c1"}),
    "impossibility-demo": (cmd_impossibility_demo, 5000, {"scheme": ELGAMAL_23, "eps": 0.0,
                                                          "eps_star": 0.25}),
}

JSON_PARAMS = {"scheme", "instance", "distribution", "group", "gens"}


# Argument parsing -----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        # bare words like c1 are allowed for --gens
        if text.replace("-", "").isalnum():
            return text
        raise argparse.ArgumentTypeError(f"malformed JSON: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file; flags override its values")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--threads", type=int)

    parser = _Parser(prog="ghelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, _, params) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS)
        for key in params:
            flag = "--" + key.replace("_", "-")
            if key in JSON_PARAMS:
                sp.add_argument(flag, dest=key, type=_json_arg)
            elif key in ("attack", "adversary"):
                sp.add_argument(flag, dest=key)
            elif key in ("m", "m_prime", "m_star", "r_star"):
                sp.add_argument(flag, dest=key, type=_json_arg)
            elif key in ("eps", "eps_star", "delta", "delta_star"):
                sp.add_argument(flag, dest=key, type=float)
            else:
                sp.add_argument(flag, dest=key, type=int)
    return parser


def resolve_config(argv) -> ExperimentConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    _, default_trials, defaults = COMMANDS[command]
    merged = {"trials": default_trials, **defaults}
    if "config" in ns:
        path = ns.pop("config")
        try:
            with open(path) as f:
                file_cfg = json.load(f)
        except OSError as e:
            raise UsageError(f"config: cannot read {path}: {e.strerror}")
        except json.JSONDecodeError as e:
            raise UsageError(f"config: malformed JSON in {path}: {e}")
        if not isinstance(file_cfg, dict):
            raise UsageError("config: top level must be an object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items() if k != "command"}
        known = set(defaults) | {"seed", "trials", "format", "out", "threads"}
        unknown = sorted(set(file_cfg) - known)
        if unknown:
            raise UsageError(f"config: unknown field {unknown[0]!r} for {command}")
        merged.update(file_cfg)
    merged.update(ns)
    common = {k: merged.pop(k) for k in ("seed", "trials", "format", "out", "threads") if k in merged}
    cfg = ExperimentConfig(command, params=merged, **common)
    if cfg.trials < 1:
        raise UsageError("trials must be positive")
    if cfg.threads < 1:
        raise UsageError("threads must be positive")
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {cfg.format!r}")
    return cfg


# Output ---------------------------------------------------------------------

def sig6(obj):
    """Round every float to 6 significant digits, recursively."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): sig6(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sig6(v) for v in obj]
    return obj


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list):
            yield key, json.dumps(v)
        else:
            yield key, v


def render(cfg: ExperimentConfig, report: Report) -> str:
    doc = {"command": cfg.command, "config": cfg.resolved(), "bound": report.bound,
           "bound_satisfied": report.satisfied, "results": report.results}
    if cfg.format == "json":
        if report.rows is not None:
            doc["rows"] = report.rows
        return json.dumps(sig6(doc), indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.rows:
        w.writerow(list(report.rows[0]))
        for row in sig6(report.rows):
            w.writerow(["" if v is None else v for v in row.values()])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(sig6(doc)):
            w.writerow([k, v])
    return buf.getvalue()


def run(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        handler = COMMANDS[cfg.command][0]
        report = handler(cfg)
    except UsageError as e:
        print(f"ghelab: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as e:
        print(f"ghelab: config error: missing field {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, MalformedElementError, DomainError, InstanceError, GameError,
            ClosureOverflowError, TypeError, ValueError) as e:
        print(f"ghelab: config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = render(cfg, report)
    if cfg.out:
        with open(cfg.out, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.satisfied else EXIT_BOUND


def main(argv=None):
    sys.exit(run(argv))
