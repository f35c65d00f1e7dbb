"""Scan eps1/omega across the first zero of J_1 for the frozen edge plan.

Uses the CLI's scan command, so the result lands in <out>/scan.csv.

    python scripts/scan_bessel_zero.py --out runs/scan --num 41
"""
import argparse
import json
import sys
from pathlib import Path

from shaken_trimer.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/scan")
    ap.add_argument("--start", type=float, default=3.6)
    ap.add_argument("--stop", type=float, default=4.05)
    ap.add_argument("--num", type=int, default=46)
    ap.add_argument("--t-end", type=float, default=100.0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = {
        "model": {"v": 1, "U0": 75, "U1": 40, "U2": 5, "eps0": -70, "eps1": 0, "omega": 35, "N": 4},
        "initial_state": [3, 1, 0],
        "t_end": args.t_end,
        "scan": {"pathway": "left->center",
                 "eps1_over_omega": {"start": args.start, "stop": args.stop, "num": args.num}},
    }
    (out / "scan_config.json").write_text(json.dumps(cfg, indent=2) + "\n")
    argv = ["scan", "--config", str(out / "scan_config.json"), "--out", str(out)]
    if args.workers:
        argv += ["--workers", str(args.workers)]
    rc = cli_main(argv)
    print((out / "scan.csv").read_text())
    return rc


if __name__ == "__main__":
    sys.exit(main())
