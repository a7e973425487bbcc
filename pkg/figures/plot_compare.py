#!/usr/bin/env python3
"""Render a four-method comparison CSV as an overlay plot.

Reads the compare CSV produced by ``simulate compare`` (columns t,
rho11_mc, stderr_mc, rho11_tcl2, rho11_tcl2t, rho11_exact), draws the
Monte Carlo curve with a +-2 stderr band under the three reference
curves, and writes one SVG or PNG per input file.  The input is never
modified; a schema mismatch exits with status 1 naming the column.

Usage: plot_compare.py <csv> -o <image>
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = ["t", "rho11_mc", "stderr_mc", "rho11_tcl2", "rho11_tcl2t", "rho11_exact"]


class SchemaError(ValueError):
    pass


@dataclass
class FigureSpec:
    csv_path: str
    image_path: str
    x_label: str = "t"
    y_label: str = r"$\rho_{11}$"
    legend: dict = field(default_factory=lambda: {
        "rho11_mc": "MC",
        "rho11_tcl2": "new TCL2",
        "rho11_tcl2t": "new TCL2(t)",
        "rho11_exact": "Schrödinger",
    })


def read_table(path: str) -> dict[str, list[float]]:
    """Parse the CSV, enforcing the exact compare schema."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in REQUIRED_COLUMNS:
            if name not in header:
                raise SchemaError(f"missing column: {name}")
        for name in header:
            if name not in REQUIRED_COLUMNS:
                raise SchemaError(f"unexpected column: {name}")
        table: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name in header:
                table[name].append(float(row[name]))
    if not table["t"]:
        raise SchemaError("missing column: t (no data rows)")
    return table


def render_overlay(spec: FigureSpec) -> None:
    table = read_table(spec.csv_path)
    t = table["t"]
    mc = table["rho11_mc"]
    err = table["stderr_mc"]
    lo = [m - 2.0 * e for m, e in zip(mc, err)]
    hi = [m + 2.0 * e for m, e in zip(mc, err)]

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.fill_between(t, lo, hi, color="tab:red", alpha=0.25, linewidth=0,
                    label=r"MC $\pm 2\,$stderr")
    ax.plot(t, mc, color="tab:red", lw=1.2, label=spec.legend["rho11_mc"])
    ax.plot(t, table["rho11_tcl2"], color="tab:blue", lw=1.2, ls="--",
            label=spec.legend["rho11_tcl2"])
    ax.plot(t, table["rho11_tcl2t"], color="tab:green", lw=1.2, ls="-.",
            label=spec.legend["rho11_tcl2t"])
    ax.plot(t, table["rho11_exact"], color="black", lw=0.9, alpha=0.8,
            label=spec.legend["rho11_exact"])
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(spec.image_path)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="compare CSV to plot")
    parser.add_argument("-o", "--output", required=True, help="output image (SVG or PNG)")
    args = parser.parse_args(argv)
    try:
        render_overlay(FigureSpec(csv_path=args.csv, image_path=args.output))
    except SchemaError as exc:
        print(f"schema mismatch in {args.csv}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
