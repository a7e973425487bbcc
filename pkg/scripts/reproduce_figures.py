#!/usr/bin/env python3
"""Run the weak- and strong-coupling comparison pipelines end to end.

Produces weak_compare.csv / strong_compare.csv (plus metadata sidecars)
in the output directory and, unless --no-plots is given, renders the two
overlay figures with the standalone plot script.  With default settings
this takes a few minutes; pass --trajectories to trade accuracy for
speed.
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
PLOT = ROOT / "figures" / "plot_compare.py"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="output", help="output directory")
    parser.add_argument("--trajectories", type=int, default=5000)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--no-plots", action="store_true")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    for name in ("weak", "strong"):
        base = json.loads((ROOT / "configs" / f"{name}.json").read_text())
        base["run"]["trajectories"] = args.trajectories
        base["output"]["path"] = str(outdir / f"{name}_compare.csv")
        cfg = outdir / f"{name}.json"
        cfg.write_text(json.dumps(base, indent=2))
        print(f"running {name}-coupling comparison ({args.trajectories} trajectories)...")
        subprocess.run(
            [sys.executable, "-m", "pdpmc.cli", "compare", "--config", str(cfg),
             "--workers", str(args.workers)],
            check=True,
        )
        if not args.no_plots:
            image = outdir / f"{name}_compare.svg"
            subprocess.run(
                [sys.executable, str(PLOT), base["output"]["path"], "-o", str(image)],
                check=True,
            )
            print(f"wrote {image}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
