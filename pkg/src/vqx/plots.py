"""SVG figures from sweep tables: dissociation curves, accuracy, convergence."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .cases import get_case  # noqa: E402
from .oracle import ACCURACY_FLOOR  # noqa: E402
from .sweep import RunRecord, accuracy_rows  # noqa: E402

# fixed salt and no date so reruns give identical files
_SVG_RC = {"svg.hashsalt": "vqx", "svg.fonttype": "path"}
_SVG_META = {"Date": None, "Creator": "vqx"}


class PlotDataError(ValueError):
    """Too little data for the requested figure."""


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def _case_title(cid: int) -> str:
    try:
        return get_case(cid).title
    except ValueError:
        return f"case {cid}"


def plot_curves(records: list[RunRecord], out_dir) -> list[Path]:
    """Energy and accuracy versus bond length, one pair of SVGs per case.

    Lines join the per-point sample means; whiskers span min to max.
    """
    rows = accuracy_rows(records)
    out = Path(out_dir)
    written = []
    with plt.rc_context(_SVG_RC):
        for cid in sorted({r["case"] for r in rows}):
            sub = [r for r in rows if r["case"] == cid and r["n_ok"] > 0]
            if len({r["r"] for r in sub}) < 2:
                raise PlotDataError(f"case {cid}: need at least 2 bond lengths for a curve")
            for kind, ylabel in (("energy", "Energy (Hartree)"), ("accuracy", r"$\log_{10}|E - E_{FCI}|$")):
                fig, ax = plt.subplots(figsize=(6, 4.5))
                for j in sorted({r["state"] for r in sub}):
                    pts = sorted((r for r in sub if r["state"] == j), key=lambda r: r["r"])
                    x = np.array([p["r"] for p in pts])
                    mean = np.array([p[f"{kind}_mean"] for p in pts])
                    lo = mean - np.array([p[f"{kind}_min"] for p in pts])
                    hi = np.array([p[f"{kind}_max"] for p in pts]) - mean
                    ax.errorbar(x, mean, yerr=[lo, hi], marker="o", ms=3, capsize=2, label=pts[0]["label"])
                    if kind == "energy":
                        ax.plot(x, [p["e_fci"] for p in pts], ls=":", color="gray", lw=0.8)
                if kind == "accuracy":
                    ax.set_ylim(bottom=ACCURACY_FLOOR - 0.5)
                ax.set_xlabel("Bond length (Å)")
                ax.set_ylabel(ylabel)
                ax.set_title(_case_title(cid))
                ax.legend(fontsize=8)
                fig.tight_layout()
                written.append(_save(fig, out / f"{kind}_case{cid}.svg"))
    return written


def plot_convergence(trace_rows: list[dict], levels: dict[int, float], path, labels: dict[int, str] | None = None,
                     sample: int = 0) -> Path:
    """``|E_j - E_FCI,j|`` against update count for one sample of one point.

    Stages run one after another, so the x-axis counts updates cumulatively
    and spans exactly the updates used.

    Args:
        trace_rows: rows of a ``convergence_*.csv`` file.
        levels: exact energy per state index.
        path: output SVG.
        labels: legend names per state index.
        sample: which sample's trace to draw.
    """
    rows = [r for r in trace_rows if int(r["sample"]) == sample]
    if not rows:
        raise PlotDataError(f"no trace rows for sample {sample}")
    labels = labels or {}
    offsets, total = {}, 0
    for st in sorted({int(r["stage"]) for r in rows}):
        offsets[st] = total
        total += max(int(r["update"]) for r in rows if int(r["stage"]) == st)
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for j, ref in sorted(levels.items()):
            col = f"energy_state_{j}"
            pts = [(offsets[int(r["stage"])] + int(r["update"]), abs(r[col] - ref))
                   for r in rows if col in r and not math.isnan(r[col])]
            if not pts:
                continue
            x, y = zip(*pts)
            ax.semilogy(x, np.maximum(y, 10.0**ACCURACY_FLOOR), label=labels.get(j, f"state {j}"))
        ax.set_xlim(0, total)
        ax.set_xlabel("Updates")
        ax.set_ylabel(r"$|E - E_{FCI}|$ (Hartree)")
        ax.legend(fontsize=8)
        fig.tight_layout()
        return _save(fig, Path(path))


def plot_results(results_dir) -> list[Path]:
    """Render every figure that the tables in ``results_dir`` support."""
    from .sweep import read_convergence, read_energies

    d = Path(results_dir)
    src = d / "energies.csv"
    if not src.exists():
        raise FileNotFoundError(f"{src} not found; run a sweep first")
    records = read_energies(src)
    written = []
    if len({x.r for x in records}) >= 2:
        written += plot_curves(records, d)
    for conv in sorted(d.glob("convergence_*.csv")):
        cid = int(conv.stem.split("_")[1])
        r = float(conv.stem.split("_")[2].replace("p", "."))
        point = [x for x in records if x.case == cid and math.isclose(x.r, r, abs_tol=5e-4)]
        levels = {x.state: x.e_fci for x in point}
        labels = {x.state: x.label for x in point}
        rows = read_convergence(conv)
        if rows:
            written.append(plot_convergence(rows, levels, conv.with_suffix(".svg"), labels,
                                            sample=int(min(r_["sample"] for r_ in rows))))
    if not written:
        raise PlotDataError("nothing to plot: need >= 2 bond lengths or a convergence trace")
    return written
