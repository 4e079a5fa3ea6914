"""Trajectory-family time series: one curve per parameter value."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "sairs-plots"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .csvio import CsvFormatError, label_from_filename, load_trajectory  # noqa: E402

PANELS = (("S", "susceptible"), ("A", "asymptomatic infected"),
          ("I", "symptomatic infected"), ("R", "recovered"))


@dataclass(frozen=True)
class FamilySpec:
    """One family figure: trajectory CSVs (one per value) and an output path."""

    input_paths: Tuple[str, ...]
    output_path: str
    labels: Optional[Tuple[str, ...]] = None
    title: str = "trajectory family"
    extra: dict = field(default_factory=dict)


def render_family(spec: FamilySpec) -> List[str]:
    """Render 2x2 panels of S, A, I, R against time, one curve per input.

    Inputs with differing time grids are resampled onto the first input's
    grid by linear interpolation; a warning is emitted for each.
    Returns the warnings (also printed to stderr).
    """
    if not spec.input_paths:
        raise CsvFormatError("at least one trajectory CSV is required")
    labels = spec.labels or tuple(label_from_filename(p) for p in spec.input_paths)
    if len(labels) != len(spec.input_paths):
        raise CsvFormatError("one label per input is required")

    warnings: List[str] = []
    series = []
    base_t = None
    for path in spec.input_paths:
        data = load_trajectory(path)
        if base_t is None:
            base_t = data["t"]
        elif len(data["t"]) != len(base_t) or np.any(data["t"] != base_t):
            message = f"{path}: time grid differs, resampling by linear interpolation"
            warnings.append(message)
            print(f"warning: {message}", file=sys.stderr)
            data = {
                key: (base_t if key == "t" else np.interp(base_t, data["t"], data[key]))
                for key in data
            }
        series.append(data)

    fig, axes = plt.subplots(2, 2, figsize=(9.0, 7.0), constrained_layout=True)
    for ax, (column, title) in zip(axes.ravel(), PANELS):
        for label, data in zip(labels, series):
            ax.plot(data["t"], data[column], label=label, linewidth=1.2)
        ax.set_title(title)
        ax.set_xlabel("t (days)")
        ax.set_ylabel("fraction")
    axes[0, 0].legend(loc="best", fontsize="small")
    fig.suptitle(spec.title)
    fig.savefig(spec.output_path, metadata=_stable_metadata(spec.output_path))
    plt.close(fig)
    return warnings


def _stable_metadata(output_path: str):
    if output_path.endswith(".svg"):
        return {"Date": None}
    if output_path.endswith(".pdf"):
        return {"CreationDate": None}
    return None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sairs-plot-family",
        description="Overlay sairs-lab trajectory CSVs as S, A, I, R time series.",
    )
    parser.add_argument("--input", required=True, nargs="+", help="trajectory CSV paths")
    parser.add_argument("--output", required=True, help="image path (.svg/.pdf/.png)")
    parser.add_argument("--title", default="trajectory family")
    args = parser.parse_args(argv)
    try:
        render_family(FamilySpec(tuple(args.input), args.output, title=args.title))
    except (CsvFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
