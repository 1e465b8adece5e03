"""Run every example config through the command line runner."""

import argparse
from pathlib import Path

from cmsubdiv.cli import main as cli

HERE = Path(__file__).resolve().parent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output", default="results")
    args = ap.parse_args(argv)
    status = 0
    for cfg in sorted((HERE / "configs").glob("*.json")):
        code = cli(["run", "--config", str(cfg), "--output", str(Path(args.output) / cfg.stem)])
        print(f"{cfg.name}: exit {code}")
        status = max(status, code)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
