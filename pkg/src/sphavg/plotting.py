"""Figure rendering for convergence reports."""

from __future__ import annotations


def plot_convergence(report, path, title: str | None = None) -> None:
    """Render the error column against n on a log scale and save to path
    (format chosen by the file extension)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for mode, marker in (("exact", "o"), ("float", ".")):
        xs = [row.n for row in report.rows if row.mode == mode]
        ys = [float(row.error) for row in report.rows if row.mode == mode]
        if xs:
            ax.semilogy(xs, ys, marker=marker, linestyle="-", markersize=4,
                        label=f"{mode} rows")
    ax.set_xlabel("sphere radius n")
    ax.set_ylabel("windowed L1 error")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
