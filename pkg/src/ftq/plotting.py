"""Figure rendering for sweep and capacity-comparison reports.

matplotlib is imported lazily with the Agg backend so that non-plotting
CLI paths stay import-light and renders work headless.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_sweep_figure(result, path) -> None:
    """Ic and the prop1 bound versus the noise parameter, saved to `path`."""
    plt = _pyplot()
    params = [pt.param for pt in result.points]
    ic = [pt.ic_bits for pt in result.points]
    bound = [pt.prop1_bound for pt in result.points]
    vacuous = [pt.vacuous for pt in result.points]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(params, ic, "o-", color="tab:blue")
    ax1.axhline(0.0, color="gray", lw=0.8)
    if result.threshold is not None:
        ax1.axvline(result.threshold, color="tab:red", ls="--", lw=1.0,
                    label=f"threshold ~ {result.threshold:.4g}")
        ax1.legend()
    ax1.set_xlabel(f"{result.family_id} parameter")
    ax1.set_ylabel(r"$I_c$ (bits)")
    ax1.set_title(f"coherent information, g={result.g}")
    ax1.grid(alpha=0.3)

    solid = [b for b, v in zip(bound, vacuous) if not v]
    solid_p = [p for p, v in zip(params, vacuous) if not v]
    vac = [b for b, v in zip(bound, vacuous) if v]
    vac_p = [p for p, v in zip(params, vacuous) if v]
    if solid:
        ax2.plot(solid_p, solid, "o-", color="tab:green", label="bound")
    if vac:
        ax2.plot(vac_p, vac, "x", color="tab:gray", label="vacuous")
    ax2.axhline(result.d, color="gray", lw=0.8, label=f"d = {result.d}")
    ax2.set_xlabel(f"{result.family_id} parameter")
    ax2.set_ylabel("physical-qubit lower bound")
    ax2.set_title(f"overhead bound, d={result.d}")
    ax2.grid(alpha=0.3)
    ax2.legend()

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_capacity_figure(comparison, path, label="") -> None:
    """k / Ic(N^(x)k) versus k, with the running minimum highlighted."""
    plt = _pyplot()
    ks = [row[0] for row in comparison.rows]
    ratios = [row[2] for row in comparison.rows]

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, ratios, "o-", color="tab:blue")
    ax.axhline(comparison.min_ratio, color="tab:red", ls="--", lw=1.0,
               label=f"min at k={comparison.min_k}: {comparison.min_ratio:.5g}")
    ax.set_xlabel("copies k")
    ax.set_ylabel(r"$k\,/\,I_c(N^{\otimes k})$")
    ax.set_xticks(ks)
    title = "space-overhead comparison"
    if label:
        title += f" ({label})"
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
