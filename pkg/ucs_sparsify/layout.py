"""
Fruchterman-Reingold node placement and SVG rendering.

Forces:
- Attractive: f_a(d) = d^2 / k  (edges only)
- Repulsive:  f_r(d) = k^2 / d  (all pairs)

with k = sqrt(area / |V|). Each sweep moves a vertex by at most the current
temperature, then cools the temperature by a constant factor. Vertices stay inside
the square frame [-w/2, w/2]^2, w = sqrt(area).
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .errors import ParameterDomainError
from .graph.model import Graph

logger = logging.getLogger(__name__)

_MIN_DISTANCE = 1e-9


@dataclass(frozen=True)
class LayoutConfig:
    iterations: int = 500
    area: float = 1.0
    initial_temperature: Optional[float] = None  # defaults to 0.1 * sqrt(area)
    cooling: float = 0.99
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ParameterDomainError(f"iterations must be >= 1, got {self.iterations}.")
        if not self.area > 0:
            raise ParameterDomainError(f"area must be positive, got {self.area}.")
        if not 0 < self.cooling < 1:
            raise ParameterDomainError(f"cooling must lie in (0, 1), got {self.cooling}.")
        if self.initial_temperature is not None and not self.initial_temperature > 0:
            raise ParameterDomainError(
                f"initial_temperature must be positive, got {self.initial_temperature}."
            )

    @property
    def frame(self) -> float:
        return math.sqrt(self.area)

    @property
    def temperature(self) -> float:
        return 0.1 * self.frame if self.initial_temperature is None else self.initial_temperature


class NodeCoordinates(NamedTuple):
    positions: np.ndarray  # |V| x 2
    frame: float

    def to_json(self, g: Graph) -> dict[str, list[float]]:
        """{original vertex id: [x, y]}"""
        return {str(g.original_id(v)): [float(x), float(y)] for v, (x, y) in enumerate(self.positions)}


def _sweep(pos: np.ndarray, tails: np.ndarray, heads: np.ndarray, k: float) -> np.ndarray:
    delta = pos[:, None, :] - pos[None, :, :]
    dist = np.maximum(np.linalg.norm(delta, axis=2), _MIN_DISTANCE)
    np.fill_diagonal(dist, np.inf)
    # Repulsion: (delta / d) * k^2 / d, summed over all other vertices.
    disp = (delta * (k * k / dist**2)[:, :, None]).sum(axis=1)

    if len(tails):
        edge_delta = pos[tails] - pos[heads]
        edge_dist = np.maximum(np.linalg.norm(edge_delta, axis=1), _MIN_DISTANCE)
        # Attraction: (delta / d) * d^2 / k = delta * d / k.
        pull = edge_delta * (edge_dist / k)[:, None]
        np.subtract.at(disp, tails, pull)
        np.add.at(disp, heads, pull)
    return disp


def layout_with_history(g: Graph, cfg: LayoutConfig = LayoutConfig()) -> tuple[NodeCoordinates, tuple[float, ...]]:
    """Runs the sweeps and also returns the total displacement applied in each one."""
    size = g.vertex_count
    half = cfg.frame / 2
    rng = np.random.default_rng(cfg.seed)
    pos = rng.uniform(-half, half, size=(size, 2))
    if size == 0:
        return NodeCoordinates(positions=pos, frame=cfg.frame), ()

    k = math.sqrt(cfg.area / size)
    tails, heads = g.endpoints()
    temperature = cfg.temperature
    history = []

    for _ in range(cfg.iterations):
        disp = _sweep(pos, tails, heads, k)
        length = np.linalg.norm(disp, axis=1)
        step = np.minimum(length, temperature)
        moving = length > 0
        move = np.zeros_like(disp)
        move[moving] = disp[moving] * (step[moving] / length[moving])[:, None]
        pos = np.clip(pos + move, -half, half)
        history.append(float(step.sum()))
        temperature *= cfg.cooling

    logger.debug(f"Layout of {size} vertices: final temperature {temperature:.3g}")
    return NodeCoordinates(positions=pos, frame=cfg.frame), tuple(history)


def fruchterman_reingold(g: Graph, cfg: LayoutConfig = LayoutConfig()) -> NodeCoordinates:
    return layout_with_history(g, cfg)[0]


# --- SVG rendering ---

SVG_SIZE = 800
SVG_MARGIN = 20
_STYLE = (
    ".edge{stroke:#b0b0b0;stroke-width:1;stroke-opacity:0.6}"
    ".highlight{stroke:#1f3b73;stroke-width:1.6;stroke-opacity:1}"
    ".node{fill:#303030}"
)


def _canvas(coords: NodeCoordinates) -> np.ndarray:
    scale = (SVG_SIZE - 2 * SVG_MARGIN) / coords.frame
    canvas = (coords.positions + coords.frame / 2) * scale + SVG_MARGIN
    canvas[:, 1] = SVG_SIZE - canvas[:, 1]
    return canvas


def _line(a: np.ndarray, b: np.ndarray, css: str) -> str:
    return f'<line class="{css}" x1="{a[0]:.3f}" y1="{a[1]:.3f}" x2="{b[0]:.3f}" y2="{b[1]:.3f}"/>'


def render_svg(g: Graph, coords: NodeCoordinates, highlight: Optional[Iterable[int]] = None) -> bytes:
    """
    Draws every edge in gray, then the highlighted edges on top, then the vertices.

    Output is a standalone SVG 1.1 document whose bytes depend only on the inputs.
    """
    marked = set(highlight or ())
    canvas = _canvas(coords)
    radius = 2.5 if g.vertex_count > 100 else 4.0

    svg = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" '
        f'height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f"<style>{_STYLE}</style>",
        '<g id="edges">',
    ]
    for index, edge in enumerate(g.edges):
        if index not in marked:
            svg.append(_line(canvas[edge.u], canvas[edge.v], "edge"))
    svg.append("</g>")
    svg.append('<g id="highlight">')
    for index, edge in enumerate(g.edges):
        if index in marked:
            svg.append(_line(canvas[edge.u], canvas[edge.v], "highlight"))
    svg.append("</g>")
    svg.append('<g id="nodes">')
    for v, (x, y) in enumerate(canvas):
        svg.append(f'<circle class="node" cx="{x:.3f}" cy="{y:.3f}" r="{radius}"><title>{g.original_id(v)}</title></circle>')
    svg.append("</g>")
    svg.append("</svg>")
    return ("\n".join(svg) + "\n").encode("utf-8")
