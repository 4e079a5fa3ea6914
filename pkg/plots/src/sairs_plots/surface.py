"""Asymptotic-state heatmaps over a two-parameter sweep."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "sairs-plots"

import matplotlib.pyplot as plt  # noqa: E402

from .csvio import STATE_COLUMNS, CsvFormatError, load_sweep  # noqa: E402

PANEL_TITLES = {
    "S_inf": "susceptible",
    "A_inf": "asymptomatic infected",
    "I_inf": "symptomatic infected",
    "R_inf": "recovered",
}


@dataclass(frozen=True)
class SurfaceSpec:
    """One surface figure: input sweep CSV and output image path."""

    input_path: str
    output_path: str
    title: str = "asymptotic state"


def render_surface(spec: SurfaceSpec) -> None:
    """Render the 2x2 heatmap panel figure for a sweep CSV.

    The panels show the long-run S, A, I, R over the swept plane; where the
    sweep crosses the reproduction threshold, the infected panels switch
    from the flat zero plateau to the endemic surface, which makes the
    R0 = 1 line visible as an onset ridge.
    """
    grid = load_sweep(spec.input_path)
    extent = (
        float(grid.values2[0]),
        float(grid.values2[-1]),
        float(grid.values1[0]),
        float(grid.values1[-1]),
    )
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 7.5), constrained_layout=True)
    for ax, name in zip(axes.ravel(), STATE_COLUMNS):
        image = ax.imshow(
            grid.grids[name],
            origin="lower",
            aspect="auto",
            extent=extent,
            cmap="viridis",
        )
        ax.set_title(PANEL_TITLES[name])
        ax.set_xlabel(grid.param2)
        ax.set_ylabel(grid.param1)
        fig.colorbar(image, ax=ax, shrink=0.9)
    fig.suptitle(spec.title)
    fig.savefig(spec.output_path, metadata=_stable_metadata(spec.output_path))
    plt.close(fig)


def _stable_metadata(output_path: str):
    # Keep artifacts byte-stable: no creation dates in the output.
    if output_path.endswith(".svg"):
        return {"Date": None}
    if output_path.endswith(".pdf"):
        return {"CreationDate": None}
    return None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sairs-plot-surface",
        description="Render a sairs-lab sweep CSV as asymptotic-state heatmaps.",
    )
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument("--output", required=True, help="image path (.svg/.pdf/.png)")
    parser.add_argument("--title", default="asymptotic state")
    args = parser.parse_args(argv)
    try:
        render_surface(SurfaceSpec(args.input, args.output, args.title))
    except (CsvFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
