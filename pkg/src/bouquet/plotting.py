"""SVG figures for traced rays."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def rays_svg(polylines: dict, path: str, a: complex, title: str = "") -> None:
    """Draw each labelled list of ray samples as a polyline in the plane."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, samples in polylines.items():
        if not samples:
            continue
        xs = [s.z.real for s in samples]
        ys = [s.z.imag for s in samples]
        ax.plot(xs, ys, marker=".", linewidth=1.0, label=label)
        ax.annotate(label, (xs[-1], ys[-1]), fontsize=7, xytext=(3, 3), textcoords="offset points")
    for k in range(-3, 4):
        ax.axhline((2 * k + 1) * math.pi, color="0.85", linewidth=0.6, zorder=0)
    ax.plot([complex(a).real], [complex(a).imag], "kx", label="a")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title or f"dynamic rays of exp(z) + ({complex(a)})")
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
