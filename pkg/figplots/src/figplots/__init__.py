"""Figure renderer for scully-lamb run artifacts (CSV + manifest.json)."""

__version__ = "0.1.0"

from .io import FigplotsError, load_manifest, load_table
from .panels import FIGURE_CLASSES, render, semiclassical_overlay
