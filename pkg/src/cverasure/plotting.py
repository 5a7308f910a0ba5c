"""Static two-panel SVG of a ``cverasure filter`` sweep."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class PlotError(ValueError):
    pass


def read_filter_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    if not rows:
        raise PlotError(f"{path}: no data rows")
    return rows


def group_series(rows):
    """Split rows into ``{squeeze_db: [(pe, F, P_s), ...]}`` and ``{pe: F_direct}``."""
    engines = {r["engine"] for r in rows}
    # prefer the deterministic engine when both are present
    engine = "analytic" if "analytic" in engines else sorted(engines)[0]
    series = defaultdict(list)
    direct = {}
    for r in rows:
        if r["engine"] != engine:
            continue
        pe = float(r["pe"])
        series[float(r["squeeze_db"])].append((pe, float(r["fidelity_out1"]), float(r["success_prob"])))
        direct[pe] = float(r["direct_fidelity"])
    return dict(series), direct


def plot_csv(csv_path, out_svg) -> None:
    series, direct = group_series(read_filter_csv(csv_path))

    with plt.rc_context({"svg.hashsalt": "cverasure", "svg.fonttype": "none"}):
        fig, (ax_f, ax_p) = plt.subplots(1, 2, figsize=(9, 3.6))
        for db in sorted(series):
            pts = sorted(series[db])
            pe = [p[0] for p in pts]
            ax_f.plot(pe, [p[1] for p in pts], label=f"{db:g} dB")
            ax_p.plot(pe, [p[2] for p in pts], label=f"{db:g} dB")
        pes = sorted(direct)
        ax_f.plot(pes, [direct[p] for p in pes], "k--", label="direct")
        ax_f.set_xlabel("erasure probability")
        ax_f.set_ylabel("fidelity (mode 1)")
        ax_p.set_xlabel("erasure probability")
        ax_p.set_ylabel("success probability")
        ax_f.legend(frameon=False, fontsize=8)
        ax_p.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        Path(out_svg).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_svg, format="svg", metadata={"Date": None})
        plt.close(fig)
