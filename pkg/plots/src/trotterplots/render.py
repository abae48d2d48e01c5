"""Draw the known figure kinds from loaded tables.

Output is pinned for reproducibility: Agg backend, a fixed SVG hash
salt, no Date metadata, text emitted as text rather than outline paths,
and only fonts that ship with matplotlib.  Rendering the same spec over
the same CSV bytes twice writes identical files.

Extrapolation lines are least-squares fits on log-transformed data and
attach to size axes only (register width n, Hilbert dimension d); the
time axis of the error-versus-t figure gets no fit because that curve
crosses a growth transition and a single power law would misrepresent
it.  Sizes below FigureSpec.fit_min_n are excluded from every fit.
Each fit's slope and intercept is printed to stdout and written into
the caption block under the panels, slope first, three decimals in the
caption.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.ticker import NullLocator, ScalarFormatter

from trotterplots.figspec import FigureSpec, load_rows
from trotterplots.fitting import log2_fit, powerlaw_fit

RC = {
    "svg.hashsalt": "trotterplots",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.titlesize": 10.0,
    "axes.labelsize": 9.0,
    "legend.fontsize": 7.5,
    "xtick.labelsize": 8.0,
    "ytick.labelsize": 8.0,
    "lines.markersize": 4.5,
    "lines.linewidth": 1.2,
    "figure.dpi": 100.0,
    "savefig.dpi": 200.0,
}

# Stable order and look for the bound-comparison series.
CRITERIA = ("empirical", "empirical_worst", "triangle", "tp", "counting",
            "interference", "worst")
STYLE = {
    "empirical": {"color": "#1f77b4", "marker": "o"},
    "empirical_worst": {"color": "#17becf", "marker": "P"},
    "triangle": {"color": "#d62728", "marker": "s"},
    "tp": {"color": "#bcbd22", "marker": "X"},
    "counting": {"color": "#2ca02c", "marker": "^"},
    "interference": {"color": "#9467bd", "marker": "D"},
    "worst": {"color": "#8c564b", "marker": "v"},
}
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#bcbd22")
_MARKERS = ("o", "s", "^", "D", "v", "P", "X", "*")

PANEL_W = 4.4
PANEL_H = 3.3
CAPTION_LINE_H = 0.125


def _cycle_style(i: int) -> dict:
    return {"color": _PALETTE[i % len(_PALETTE)],
            "marker": _MARKERS[i % len(_MARKERS)]}


def _mean_std_series(rows, xcol, ycol):
    """Per-x mean and sample std of ycol, x ascending.

    Repeated x values are the per-instance repetitions of one setting;
    a single value gets std 0 so lone points draw without a bar.
    """
    grouped: dict[float, list[float]] = {}
    for row in rows:
        grouped.setdefault(row[xcol], []).append(row[ycol])
    grouped = dict(sorted(grouped.items()))
    xs = np.array(list(grouped), dtype=float)
    ys = np.array([np.mean(grouped[x]) for x in grouped], dtype=float)
    err = np.array([np.std(grouped[x], ddof=1) if len(grouped[x]) > 1
                    else 0.0 for x in grouped], dtype=float)
    return xs, ys, err


def _powerlaw_entry(entry, spec, fits, label):
    """Attach a power-law fit line to a series entry when admissible."""
    if not spec.fits:
        return
    xs, ys = entry["xs"], entry["ys"]
    sel = (xs >= spec.fit_min_n) & (ys > 0)
    if int(sel.sum()) < 2:
        return
    slope, intercept = powerlaw_fit(xs[sel], ys[sel])
    grid = np.geomspace(xs[sel].min(), xs.max(), 64)
    entry["fit_line"] = (grid, np.exp(intercept) * grid ** slope)
    fits.append((label, "powerlaw", slope, intercept))


def _criteria_series(rows, spec, fits, prefix):
    """Bound-comparison series for one panel: one entry per criterion."""
    present = [c for c in CRITERIA
               if any(r["criterion"] == c for r in rows)]
    present += sorted({r["criterion"] for r in rows} - set(CRITERIA))
    entries = []
    for criterion in present:
        crows = [r for r in rows if r["criterion"] == criterion]
        xs, ys, err = _mean_std_series(crows, "n", "r_min")
        entry = {"label": criterion,
                 "style": STYLE.get(criterion,
                                    {"color": "#7f7f7f", "marker": "."}),
                 "xs": xs, "ys": ys, "yerr": err}
        _powerlaw_entry(entry, spec, fits, prefix + criterion)
        entries.append(entry)
    return entries


def _build_fig1(rows, spec):
    ps = sorted({int(r["p"]) for r in rows})
    panels, fits = [], []
    for p in ps:
        sub = [r for r in rows if int(r["p"]) == p]
        entries = _criteria_series(sub, spec, fits, f"p={p} ")
        panels.append({"title": f"order p={p}", "series": entries,
                       "xscale": "log", "yscale": "log",
                       "xlabel": "n", "ylabel": "minimum r",
                       "xticks": sorted({r["n"] for r in sub})})
    return panels, (1, len(ps)), fits


def _build_fig2(rows, spec):
    alphas = sorted({r["alpha"] for r in rows})
    ps = sorted({int(r["p"]) for r in rows})
    panels, fits = [], []
    for alpha in alphas:
        for p in ps:
            sub = [r for r in rows
                   if r["alpha"] == alpha and int(r["p"]) == p]
            prefix = f"alpha={alpha:g} p={p} "
            entries = _criteria_series(sub, spec, fits, prefix) if sub else []
            panels.append({"title": f"alpha={alpha:g}, p={p}",
                           "series": entries,
                           "xscale": "log", "yscale": "log",
                           "xlabel": "n", "ylabel": "minimum r",
                           "xticks": sorted({r["n"] for r in sub})})
    return panels, (len(alphas), len(ps)), fits


def _build_pf46(rows, spec):
    combos = sorted({(int(r["p"]), r["criterion"]) for r in rows})
    entries, fits = [], []
    for i, (p, criterion) in enumerate(combos):
        sub = [r for r in rows
               if int(r["p"]) == p and r["criterion"] == criterion]
        xs, ys, err = _mean_std_series(sub, "n", "r_min")
        entry = {"label": f"p={p} {criterion}", "style": _cycle_style(i),
                 "xs": xs, "ys": ys, "yerr": err}
        _powerlaw_entry(entry, spec, fits, f"p={p} {criterion}")
        entries.append(entry)
    panel = {"title": "higher-order cost", "series": entries,
             "xscale": "log", "yscale": "log",
             "xlabel": "n", "ylabel": "minimum r",
             "xticks": sorted({r["n"] for r in rows})}
    return [panel], (1, 1), fits


def _build_error_vs_t(rows, spec):
    combos = sorted({(r["n"], r["p"], r["r"]) for r in rows})
    entries = []
    for i, combo in enumerate(combos):
        sub = sorted((r for r in rows
                      if (r["n"], r["p"], r["r"]) == combo),
                     key=lambda r: r["t"])
        n, p, seg = combo
        entries.append({
            "label": f"n={n:g} p={p:g} r={seg:g}",
            "style": _cycle_style(i),
            "xs": np.array([r["t"] for r in sub]),
            "ys": np.array([r["mean_sqrt_s"] for r in sub]),
            "yerr": np.array([r["std_sqrt_s"] for r in sub]),
        })
    panel = {"title": "error growth with evolution time",
             "series": entries, "xscale": "log", "yscale": "log",
             "xlabel": "t", "ylabel": "mean error"}
    return [panel], (1, 1), []


def _build_haar_d(rows, spec):
    scenarios = sorted({r["scenario"] for r in rows})
    entries, fits = [], []
    for i, scenario in enumerate(scenarios):
        sub = sorted((r for r in rows if r["scenario"] == scenario),
                     key=lambda r: r["d"])
        entry = {"label": scenario, "style": _cycle_style(i),
                 "xs": np.array([r["d"] for r in sub]),
                 "ys": np.array([r["d_value"] for r in sub]),
                 "yerr": np.array([r["std_err"] for r in sub])}
        _powerlaw_entry(entry, spec, fits, scenario)
        entries.append(entry)
    ds = sorted({r["d"] for r in rows})
    panel = {"title": "mean-root slack", "series": entries,
             "xscale": "log", "yscale": "log",
             "xlabel": "d", "ylabel": "D"}
    if len(ds) <= 10:
        panel["xticks"] = ds
    return [panel], (1, 1), fits


def _build_sd_scaling(rows, spec):
    ps = sorted({int(r["p"]) for r in rows})
    entries, fits = [], []
    for i, p in enumerate(ps):
        sub = [r for r in rows if int(r["p"]) == p]
        xs, ys, _ = _mean_std_series(sub, "n", "sd_sqrt_s")
        entry = {"label": f"p={p}", "style": _cycle_style(i),
                 "xs": xs, "ys": ys, "yerr": None}
        if spec.fits:
            sel = (xs >= spec.fit_min_n) & (ys > 0)
            if int(sel.sum()) >= 2:
                slope, intercept = log2_fit(xs[sel], ys[sel])
                grid = np.linspace(xs[sel].min(), xs.max(), 64)
                entry["fit_line"] = (grid, 2.0 ** (slope * grid + intercept))
                fits.append((f"p={p}", "log2", slope, intercept))
        entries.append(entry)
    panel = {"title": "input-to-input spread of the error",
             "series": entries, "xscale": "linear", "yscale": "log2",
             "xlabel": "n", "ylabel": "spread of sqrt(S)",
             "xticks": sorted({r["n"] for r in rows})}
    return [panel], (1, 1), fits


_BUILDERS = {
    "fig1": _build_fig1,
    "fig2": _build_fig2,
    "pf46": _build_pf46,
    "error_vs_t": _build_error_vs_t,
    "haar_d": _build_haar_d,
    "sd_scaling": _build_sd_scaling,
}


def _caption_line(fit) -> str:
    label, form, slope, intercept = fit
    word = "log2 slope" if form == "log2" else "slope"
    return f"{label}: {word} {slope:.3f}, intercept {intercept:.3f}"


def _draw_panel(ax, panel, spec):
    for entry in panel["series"]:
        yerr = entry.get("yerr")
        if yerr is not None and not np.any(yerr):
            yerr = None
        ax.errorbar(entry["xs"], entry["ys"], yerr=yerr, linestyle="none",
                    marker=entry["style"]["marker"],
                    color=entry["style"]["color"], capsize=2.0,
                    markeredgewidth=0.8, label=entry["label"])
        if entry.get("fit_line") is not None:
            fx, fy = entry["fit_line"]
            ax.plot(fx, fy, linestyle="--", linewidth=1.0,
                    color=entry["style"]["color"])
    if panel["xscale"] == "log":
        ax.set_xscale("log")
    if panel["yscale"] == "log":
        ax.set_yscale("log")
    elif panel["yscale"] == "log2":
        ax.set_yscale("log", base=2)
    if panel.get("xticks"):
        ax.set_xticks(panel["xticks"])
        ax.xaxis.set_major_formatter(ScalarFormatter())
        ax.xaxis.set_minor_locator(NullLocator())
    ax.set_xlabel(panel["xlabel"])
    ax.set_ylabel(panel["ylabel"])
    ax.set_title(panel["title"])
    ax.grid(True, which="both", linewidth=0.3, alpha=0.4)
    if panel["series"]:
        ax.legend(loc=spec.legend_loc)


def _emit_figure(spec, panels, grid, fits):
    nrows, ncols = grid
    lines = [_caption_line(f) for f in fits]
    cap_h = CAPTION_LINE_H * len(lines) + (0.22 if lines else 0.0)
    width = PANEL_W * ncols + 0.9
    height = PANEL_H * nrows + cap_h + 0.78
    fig = plt.figure(figsize=(width, height))
    axes = fig.subplots(nrows, ncols, squeeze=False)
    fig.subplots_adjust(left=0.75 / width, right=1.0 - 0.18 / width,
                        bottom=(cap_h + 0.52) / height,
                        top=1.0 - (0.55 if spec.title else 0.38) / height,
                        wspace=0.3, hspace=0.5)
    flat = list(axes.flat)
    for ax, panel in zip(flat, panels):
        _draw_panel(ax, panel, spec)
    for ax in flat[len(panels):]:
        ax.set_axis_off()
    if spec.title:
        fig.suptitle(spec.title)
    if lines:
        fig.text(0.015, 0.012, "\n".join(lines), va="bottom", ha="left",
                 fontsize=7.0, family="DejaVu Sans Mono", linespacing=1.5)
    if spec.out_path.lower().endswith(".svg"):
        fig.savefig(spec.out_path, metadata={"Date": None})
    else:
        fig.savefig(spec.out_path)
    plt.close(fig)


def render(spec: FigureSpec) -> str:
    """Render the spec to its output path and return that path.

    Raises before any file is written when the input fails schema
    validation or holds no data rows.
    """
    rows = load_rows(spec)
    builder = _BUILDERS[spec.kind]
    with matplotlib.rc_context(RC):
        panels, grid, fits = builder(rows, spec)
        _emit_figure(spec, panels, grid, fits)
    for label, form, slope, intercept in fits:
        word = "log2_slope" if form == "log2" else "slope"
        print(f"fit {label}: {word}={slope:.6f} intercept={intercept:.6f}")
    return spec.out_path
