"""Figure rendering for experiment reports.

Every CLI run that produces delimited output also renders a PNG next to
it. All functions return a matplotlib Figure; callers save and close.
Uses the Agg backend so headless runs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy import stats as sps

from .pointset import PointSet

__all__ = [
    "plot_pointset",
    "plot_tail_bounds",
    "plot_clt",
    "plot_gap_scaling",
    "plot_norm_battery",
]

FIG_DPI = 130


def plot_pointset(ps: PointSet):
    """Scatter of a 1-D or 2-D point configuration."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=FIG_DPI)
    pts = ps.points
    if ps.dim == 1:
        ax.scatter(pts[:, 0], np.zeros(len(pts)), s=12, marker="|")
        ax.set_yticks([])
        ax.set_xlabel("x")
    elif ps.dim == 2:
        ax.scatter(pts[:, 0], pts[:, 1], s=10)
        ax.set_aspect("equal")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    else:
        ax.text(0.5, 0.5, f"{ps.dim}-dimensional set: no projection plotted",
                ha="center", va="center", transform=ax.transAxes)
    ax.set_title(f"{ps.label or 'point set'} (n={len(ps)}, a>={ps.min_dist:g})")
    fig.tight_layout()
    return fig


def plot_tail_bounds(report):
    """Empirical (or exact) tail probabilities against the theoretical bounds."""
    rows = []
    for key, emp in report.empirical.items():
        if not (isinstance(emp, dict) and "epsilon" in emp):
            continue
        theo = report.theoretical.get(key, {})
        rows.append((emp["epsilon"], emp, theo))
    rows.sort(key=lambda r: r[0])
    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=FIG_DPI)
    eps = [r[0] for r in rows]
    if rows and "p_hat" in rows[0][1]:
        p = [r[1]["p_hat"] for r in rows]
        lo = [r[1]["ci_low"] for r in rows]
        hi = [r[1]["ci_high"] for r in rows]
        floor = 0.5 / max(1, report.config.get("n_samples") or 1)
        yerr = [
            [max(pi - li, 0.0) for pi, li in zip(p, lo)],
            [max(hi_i - pi, 0.0) for pi, hi_i in zip(p, hi)],
        ]
        ax.errorbar(eps, [max(pi, floor) for pi in p], yerr=yerr, fmt="o",
                    ms=4, capsize=3, label="empirical tail (99% CI)")
    else:
        p = [r[1]["p_exact"] for r in rows]
        ax.plot(eps, p, "o", ms=4, label="exact tail")
    for name, style in (("simple", "--"), ("sharp", "-")):
        if rows and name in rows[0][2]:
            ax.plot(eps, [r[2][name] for r in rows], style, lw=1.2,
                    label=f"{name} bound")
    ax.set_xlabel(r"deviation $\varepsilon$")
    ax.set_ylabel("probability")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title(f"tail vs bound ({report.config.get('which', '')}, n={report.config.get('n_sites')})")
    fig.tight_layout()
    return fig


def plot_clt(report):
    """Histogram of the standardized samples with the normal density overlaid."""
    z = report.arrays.get("standardized")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 3.8), dpi=FIG_DPI)
    ax1.hist(z, bins=60, density=True, alpha=0.65, label="samples")
    grid = np.linspace(-4.2, 4.2, 300)
    ax1.plot(grid, sps.norm.pdf(grid), "k-", lw=1.2, label="standard normal")
    ax1.set_xlabel("standardized value")
    ax1.set_ylabel("density")
    ax1.legend(fontsize=8)
    zs = np.sort(z)
    emp = np.arange(1, len(zs) + 1) / len(zs)
    ax2.plot(zs, emp - sps.norm.cdf(zs), lw=0.9)
    ax2.axhline(0.0, color="k", lw=0.6)
    ks = report.empirical["ks"]["value"]
    ax2.set_xlabel("standardized value")
    ax2.set_ylabel("empirical CDF - normal CDF")
    ax2.set_title(f"KS distance {ks:.4f}")
    fig.suptitle(
        f"normal limit check: n={report.config.get('n_sites')}, "
        f"{report.config.get('n_samples')} samples, model {report.config.get('model')}",
        fontsize=10,
    )
    fig.tight_layout()
    return fig


def plot_gap_scaling(report):
    """Log-log plot of the exact expansion gap against the bound scale."""
    scales = np.asarray(report.arrays["slope_scales"], dtype=float)
    gaps = np.asarray(report.arrays["slope_gaps"], dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=FIG_DPI)
    ax.loglog(scales, gaps, "o-", ms=4, label="exact gap")
    ref = gaps[-1] * (scales / scales[-1]) ** 3
    ax.loglog(scales, ref, "k--", lw=1.0, label="cubic reference")
    targets = [
        (report.empirical[k]["scale"], report.theoretical[k]["bound"])
        for k in report.empirical
        if k.startswith("gap@")
    ]
    if targets:
        ts, bs = zip(*sorted(targets))
        ax.loglog(ts, bs, "r^", ms=5, label="bound at targets")
    slope = report.empirical["cubic_order"]["slope"]
    ax.set_xlabel("bound scale")
    ax.set_ylabel("|log-Laplace gap|")
    ax.set_title(f"expansion gap scaling (slope {slope:.3f})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def plot_norm_battery(rows: list[dict]):
    """Scatter of discrete-norm values against their Sobolev dominators."""
    fig, ax = plt.subplots(figsize=(5.6, 5.2), dpi=FIG_DPI)
    for check, marker in (("gamma<=sobolev", "o"), ("seminorm<=4delta*sobolev_d", "s")):
        xs = [r["rhs"] for r in rows if r.get("check") == check and not r.get("vacuous")]
        ys = [r["lhs"] for r in rows if r.get("check") == check and not r.get("vacuous")]
        if xs:
            ax.scatter(xs, ys, s=16, marker=marker, label=check, alpha=0.8)
    lims = ax.get_xlim()
    hi = max(lims[1], 1.0)
    lo = min(min(ax.get_ylim()[0], lims[0]), hi / 1e6)
    lo = max(lo, 1e-12)
    grid = np.geomspace(lo, hi, 50)
    ax.plot(grid, grid, "k--", lw=1.0, label="equality")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("dominating norm value")
    ax.set_ylabel("discrete norm value")
    ax.set_title("norm domination battery")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig
