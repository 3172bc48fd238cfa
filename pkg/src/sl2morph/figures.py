"""Report rendering: delimited per-case output and summary figures.

Figures are written headlessly next to the CSV so a verification run leaves
an inspectable record: a source-vs-image order scatter (everything on the
diagonal means exact order preservation) and a per-suite case/failure bar
chart.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List

from .verify import VerifyReport


def write_report_csv(reports: List[VerifyReport], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "case", "seed", "ok", "detail"])
        for report in reports:
            for rec in report.records:
                detail = {
                    k: v for k, v in rec.items() if k not in ("case", "seed", "ok")
                }
                writer.writerow(
                    [
                        report.suite,
                        rec["case"],
                        rec["seed"],
                        int(bool(rec["ok"])),
                        ";".join(f"{k}={v}" for k, v in detail.items()),
                    ]
                )
    return path


def render_figures(reports: List[VerifyReport], outdir) -> List[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    orders = next((r for r in reports if r.suite == "orders" and r.records), None)
    if orders is not None:
        src = [rec["source_order"] for rec in orders.records]
        img = [rec["image_order"] for rec in orders.records]
        fig, ax = plt.subplots(figsize=(5, 5))
        lim = max(src + img) * 1.05
        ax.plot([0, lim], [0, lim], lw=0.8, color="0.6", zorder=1)
        ax.scatter(src, img, s=18, alpha=0.7, zorder=2)
        ax.set_xlabel("source element order")
        ax.set_ylabel("image element order")
        ax.set_title("order preservation through the morphism")
        fig.tight_layout()
        path = outdir / "orders_scatter.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    if reports:
        names = [r.suite for r in reports]
        cases = [r.cases for r in reports]
        fails = [len(r.failures) for r in reports]
        fig, ax = plt.subplots(figsize=(6, 3.5))
        xs = range(len(names))
        ax.bar(xs, cases, width=0.6, label="cases", color="0.75")
        ax.bar(xs, fails, width=0.6, label="failures", color="crimson")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(names)
        ax.set_ylabel("count")
        ax.set_title("verification suites")
        ax.legend(frameon=False)
        fig.tight_layout()
        path = outdir / "suite_summary.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    return written
