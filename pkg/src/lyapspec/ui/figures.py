import io
import logging
import math
from typing import Sequence, Tuple

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from ..app.characteristic import CharSample
from ..app.spectrum import SpectrumSample
from ..infrastructure.artifacts import atomic_write_text

logger = logging.getLogger("lyapspec.ui.figures")

# G falls off to -inf at both ends; keep the interesting band visible
G_FLOOR = -20.0


def spectrum_figure(
        samples: Sequence[SpectrumSample],
        marked: Sequence[Tuple[float, float]] = (),
        title: str = ""
) -> Figure:
    """L against α, with inflections marked at their (α, L) coordinates."""
    figure = Figure(figsize=(5, 4), dpi=100)
    ax = figure.add_subplot(111)
    ax.plot([s.alpha for s in samples], [s.L for s in samples], linestyle="-", color="tab:blue")
    if marked:
        ax.plot([a for a, _ in marked], [l for _, l in marked], "o", color="tab:red", label="inflections")
        ax.legend(loc="best")
    ax.set_title(title or "Lyapunov spectrum")
    ax.set_xlabel("α")
    ax.set_ylabel("L(α)")
    ax.grid(True)
    figure.tight_layout()
    return figure


def characteristic_figure(
        samples: Sequence[CharSample],
        marked_t: Sequence[float] = (),
        title: str = ""
) -> Figure:
    """G against t, with a zero line and the inflection parameters marked."""
    figure = Figure(figsize=(5, 4), dpi=100)
    ax = figure.add_subplot(111)
    ts = [s.t for s in samples]
    gs = [s.G if math.isfinite(s.G) else math.nan for s in samples]
    ax.plot(ts, gs, linestyle="-", color="tab:green")
    ax.axhline(0.0, color="gray", linewidth=0.8)
    if marked_t:
        ax.plot(list(marked_t), [0.0] * len(marked_t), "o", color="tab:red", label="inflections")
        ax.legend(loc="best")

    finite = [g for g in gs if math.isfinite(g)]
    if finite:
        top = max(finite)
        bottom = min(max(min(finite), G_FLOOR), top - 1.0)
        ax.set_ylim(bottom, top + 0.1 * (abs(top) + 1.0))
    ax.set_title(title or "Characteristic function G(t)")
    ax.set_xlabel("t")
    ax.set_ylabel("G(t)")
    ax.grid(True)
    figure.tight_layout()
    return figure


def save_svg(figure: Figure, path: str):
    """Renders to SVG without a timestamp and with a fixed id salt, so output is reproducible."""
    FigureCanvasSVG(figure)
    buffer = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": "lyapspec", "svg.fonttype": "none"}):
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    atomic_write_text(path, buffer.getvalue())
    logger.info(f"Figure written to {path}")
