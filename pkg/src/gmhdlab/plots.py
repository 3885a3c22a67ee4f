"""Figure renderers for run records, trajectory bundles, closed-form curves,
sweeps, and the reduced companions. All renderers write a PNG to the given
path and return the path."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .closedform import ClosedFormContext, jac_along, ux_along
from .dynamics import RunRecord, Verdict


def render_series(rec: RunRecord, path) -> str:
    """Four-panel summary of one grid run."""
    t = rec.column("t")
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))

    ax = axes[0, 0]
    ax.plot(t, rec.column("sup_omega"), label="sup |u_x|", color="tab:red")
    ax.plot(t, rec.column("max_omega"), label="max u_x", color="tab:orange", lw=0.8)
    ax.plot(t, rec.column("min_omega"), label="min u_x", color="tab:blue", lw=0.8)
    if rec.verdict is Verdict.BLOWUP and rec.t_blowup_estimate is not None:
        ax.axvline(rec.t_blowup_estimate, color="k", ls="--", lw=0.8,
                   label=f"estimate {rec.t_blowup_estimate:.4g}")
        ax.set_yscale("symlog")
    ax.set_xlabel("t")
    ax.set_title(f"slope extremes (verdict: {rec.verdict.value})")
    ax.legend(fontsize=8)

    ax = axes[0, 1]
    ax.plot(t, rec.column("energy"), color="tab:green")
    ax.set_xlabel("t")
    ax.set_title("energy")
    twin = ax.twinx()
    twin.plot(t, rec.column("energy_drift"), color="tab:gray", lw=0.7)
    twin.set_ylabel("relative drift", fontsize=8)

    ax = axes[1, 0]
    ax.plot(t, rec.column("nonlocal_term"), color="tab:purple")
    ax.set_xlabel("t")
    ax.set_title("nonlocal forcing")

    ax = axes[1, 1]
    ax.plot(t, rec.column("sup_b_slope"), color="tab:brown")
    ax.set_xlabel("t")
    ax.set_title("sup |b_x|")

    fig.suptitle(
        f"lam={rec.params.lam:g}, kappa={rec.params.kappa:g}, "
        f"bc={rec.params.bc.value}, n={rec.n}"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_trajectories(ts, path) -> str:
    """Trajectory fan with the log-Jacobian and slope traces."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for j, alpha in enumerate(ts.alphas):
        axes[0].plot(ts.times, ts.gamma[:, j], lw=0.8)
        axes[1].plot(ts.times, ts.logjac[:, j], lw=0.8)
        axes[2].plot(ts.times, ts.slope_trace[:, j], lw=0.8, label=f"{alpha:.3g}")
    axes[0].set_title("positions")
    axes[1].set_title("log Jacobian")
    axes[2].set_title("slope along paths")
    for ax in axes:
        ax.set_xlabel("t")
    if ts.alphas.size <= 12:
        axes[2].legend(fontsize=7, title="label")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_closedform(ctx: ClosedFormContext, path, fractions=(0.25, 0.5, 0.75, 0.9)) -> str:
    """Jacobian and slope profiles at several fractions of the critical
    rescaled time."""
    alphas = np.linspace(0.0, 1.0, 201)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for fr in fractions:
        tau = fr * ctx.tau_star
        if not math.isfinite(tau):
            tau = fr
        jac = [jac_along(float(a), tau, ctx) for a in alphas]
        ux = [ux_along(float(a), tau, ctx) for a in alphas]
        axes[0].plot(alphas, jac, lw=0.9, label=f"tau={tau:.3g}")
        axes[1].plot(alphas, ux, lw=0.9, label=f"tau={tau:.3g}")
    axes[0].set_yscale("log")
    axes[0].set_title("Jacobian along labels")
    axes[1].set_title("slope along labels")
    for ax in axes:
        ax.set_xlabel("label")
        ax.legend(fontsize=7)
    fig.suptitle(f"lam={ctx.lam:g}, tau*={ctx.tau_star:.4g}")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_sweep(rows, path) -> str:
    """Scatter of sweep verdicts over the (lam, kappa) plane."""
    colors = {
        "blowup": "tab:red",
        "horizon-reached": "tab:green",
        "dt-floor": "tab:orange",
        "fault": "k",
    }
    fig, ax = plt.subplots(figsize=(6, 5))
    seen = set()
    for row in rows:
        label = row.verdict if row.verdict not in seen else None
        seen.add(row.verdict)
        ax.scatter(row.lam, row.kappa, c=colors.get(row.verdict, "tab:gray"),
                   s=60, label=label)
        if row.t_blowup_estimate is not None:
            ax.annotate(f"{row.t_blowup_estimate:.3g}", (row.lam, row.kappa),
                        textcoords="offset points", xytext=(5, 5), fontsize=7)
    ax.set_xlabel("lam")
    ax.set_ylabel("kappa")
    ax.set_title("sweep verdicts (annotations: blowup estimates)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_comparison(res, path) -> str:
    """Wall slopes of the magnetic run and its magnetic-free companion,
    plus the ordering gap."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    axes[0].plot(res.times, res.z_mhd, label="with b", color="tab:blue")
    axes[0].plot(res.times, res.z_plain, label="companion", color="tab:red", ls="--")
    axes[0].set_xlabel("t")
    axes[0].set_title("wall slope")
    axes[0].legend(fontsize=8)
    axes[1].plot(res.times, res.sigma, color="tab:purple")
    axes[1].axhline(0.0, color="k", lw=0.6)
    axes[1].set_xlabel("t")
    axes[1].set_title("ordering gap (companion minus magnetic)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)


def render_suppression(res, path) -> str:
    """Reduced two-variable system with its growth envelope."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    axes[0].plot(res.times, res.z, label="slope z", color="tab:blue")
    axes[0].plot(res.times, res.w, label="b-slope w", color="tab:green")
    axes[0].set_xlabel("t")
    axes[0].legend(fontsize=8)
    axes[0].set_title(f"reduced system (verdict: {res.verdict})")
    axes[1].plot(res.times, res.W, label="Lyapunov weight", color="tab:red")
    axes[1].plot(res.times, res.envelope, label="envelope", color="k", ls="--", lw=0.8)
    axes[1].set_xlabel("t")
    axes[1].set_yscale("log")
    axes[1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return str(path)
