"""Rerun every bound check through the CLI and write one report per run.

    python scripts/reproduce_bounds.py --out-dir results --seed 1

Each report lands in <out-dir>/<name>.json; a summary line per run goes to
stdout. The exit status is the worst CLI exit code seen.
"""

import argparse
import json
from pathlib import Path

from ghelab.cli import run

ELGAMAL = '{"scheme":"elgamal","p":23,"g":5}'
EXOTIC = '{"kind":"exotic","lambda":6}'

RUNS = {
    "pak_bratus": ["pak-bratus", "--lambda", "8", "--extra", "4", "--trials", "20000"],
    "delta_covering": ["genset", "--distribution", EXOTIC, "--delta", "0.9",
                       "--delta-star", "0.9", "--trials", "2000"],
    "order_growth": ["genset", "--distribution",
                     '{"kind":"uniform","group":{"family":"bitvector","lambda":6}}',
                     "--algorithm", "1", "--trials", "10000"],
    "uniform_eps0": ["attack-smp", "--scheme", ELGAMAL, "--attack", "uniform", "--trials", "5000"],
    "uniform_eps01": ["attack-smp", "--scheme", ELGAMAL, "--attack", "uniform", "--eps", "0.1",
                      "--trials", "5000"],
    "arbitrary_elgamal": ["attack-smp", "--scheme", ELGAMAL, "--attack", "arbitrary",
                          "--eps-star", "0.25", "--trials", "5000"],
    "arbitrary_exotic": ["attack-smp", "--instance", EXOTIC, "--attack", "arbitrary",
                         "--eps-star", "0.25", "--trials", "5000"],
    "reduction_omniscient": ["reduce-demo", "--scheme", ELGAMAL, "--attack", "omniscient"],
    "reduction_uniform": ["reduce-demo", "--scheme", ELGAMAL, "--attack", "uniform"],
    "estar": ["estar-demo", "--scheme", ELGAMAL, "--m-star", "2", "--r-star", "3"],
    "fact1_elgamal": ["fact1", "--scheme", '{"scheme":"elgamal","p":7,"g":3}'],
    "fact1_gm": ["fact1", "--scheme", '{"scheme":"gm","p":7,"q":11}'],
    "qorder": ["qorder", "--a", "2", "--n", "15", "--precision", "8", "--shots", "20"],
    "impossibility": ["impossibility-demo", "--scheme", ELGAMAL, "--eps-star", "0.25",
                      "--trials", "5000"],
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="subset of run names")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    worst = 0
    for name, argv in RUNS.items():
        if args.only and name not in args.only:
            continue
        path = out / f"{name}.json"
        code = run(argv + ["--seed", str(args.seed), "--out", str(path)])
        worst = max(worst, code)
        if code == 1:
            print(f"{name:22s} ERROR")
            continue
        doc = json.loads(path.read_text())
        print(f"{name:22s} exit={code} bound_satisfied={doc['bound_satisfied']}")
    raise SystemExit(worst)


if __name__ == "__main__":
    main()
