"""Rendering of sairs-lab CSV artifacts into publication-style figures.

Two script entry points consume exactly the CSV contracts of the sairs-lab
CLI: `sairs-plot-surface` turns a two-parameter sweep into a 2x2 panel of
asymptotic-state heatmaps (the threshold line R0 = 1 shows up as the onset
ridge of the infected panels), and `sairs-plot-family` overlays a
one-parameter trajectory family as S, A, I, R time series.

Rendering is read-only and deterministic: fixed figure geometry, no
timestamps embedded, vector (SVG) output by default.
"""

__version__ = "0.1.0"

from .csvio import SweepGrid, load_sweep, load_trajectory
from .family import FamilySpec, render_family
from .surface import SurfaceSpec, render_surface

__all__ = [
    "SweepGrid",
    "load_sweep",
    "load_trajectory",
    "SurfaceSpec",
    "render_surface",
    "FamilySpec",
    "render_family",
]
