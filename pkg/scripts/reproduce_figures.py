"""Run every baked-in panel and write one directory of CSV/JSON per panel.

    python scripts/reproduce_figures.py --out runs/figures
"""
import argparse
import sys
from pathlib import Path

from shaken_trimer.cli import main as cli_main
from shaken_trimer.figures import FIGURES


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/figures")
    ap.add_argument("--t-end", type=float, default=None)
    args = ap.parse_args()

    verdicts = {}
    for fig_id in FIGURES:
        argv = ["reproduce", fig_id, "--out", str(Path(args.out) / fig_id)]
        if args.t_end is not None:
            argv += ["--t-end", str(args.t_end)]
        print(f"== panel {fig_id}")
        verdicts[fig_id] = cli_main(argv)
    print()
    for fig_id, rc in verdicts.items():
        print(f"{fig_id:>3}  {'PASS' if rc == 0 else 'FAIL'}")
    return 0 if all(rc == 0 for rc in verdicts.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
