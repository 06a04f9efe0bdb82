import asyncio
import json
import logging
import math
import sys
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional, Sequence, TypeVar

import aiofiles
from returns.result import Failure, Result, Success, safe
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    TextColumn,
    TimeElapsedColumn,
)

from . import __version__
from .errors import UcsError
from .graph.cleaner import CleanedGraph
from .graph.edge_list_parser import EdgeListFormat
from .graph.loader import load_graph, load_subset
from .graph.model import Graph, connected_components, format_edge_list, incidence_system
from .layout import LayoutConfig, fruchterman_reingold, render_svg
from .processing import StepCallback, run_with_progress
from .spectra import OrthonormalEdgeBasis, edge_orthonormal_basis
from .ucs.selection import SelectionParams, SparsifierResult, TieRule, sparsify_basis
from .ucs.spanning import spanning_structure
from .verify import (
    SandwichReport,
    bound_grid,
    bound_rows_to_csv,
    bound_rows_to_json,
    bound_table,
    pencil_extremes,
    verify_sandwich,
)

logger = logging.getLogger(__name__)

R = TypeVar("R")

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2


class Command(str, Enum):
    SPARSIFY = "sparsify"
    TREE = "tree"
    BOUNDS = "bounds"
    VERIFY = "verify"
    LAYOUT = "layout"


class RunManifest(NamedTuple):
    command: Command
    input: Optional[Path]
    format: Optional[EdgeListFormat]
    ell: Optional[int] = None
    tie_rule: Optional[TieRule] = None
    seed: Optional[int] = None
    outputs: dict[str, Optional[Path]] = {}
    tool_version: str = __version__
    timestamp: str = ""

    @classmethod
    def create(cls, command: Command, **fields) -> "RunManifest":
        return cls(command=command, timestamp=datetime.now(timezone.utc).isoformat(), **fields)

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command.value,
            "input": str(self.input) if self.input else None,
            "format": self.format.value if self.format else None,
            "ell": self.ell,
            "tie_rule": self.tie_rule.value if self.tie_rule else None,
            "seed": self.seed,
            "outputs": {name: str(path) if path else None for name, path in self.outputs.items()},
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
        }


# --- Serialization ---


def _finite(value: Any) -> Any:
    """Replaces NaN and infinities by None, recursively."""
    match value:
        case float() if not math.isfinite(value):
            return None
        case dict():
            return {k: _finite(v) for k, v in value.items()}
        case list() | tuple():
            return [_finite(v) for v in value]
    return value


def dump_json(data: dict[str, Any] | list) -> str:
    return json.dumps(_finite(data), indent=2, allow_nan=False) + "\n"


def _edge_pairs(g: Graph, indices: Sequence[int]) -> list[list[int]]:
    return [list(g.original_edge(i)) for i in indices]


def sparsifier_report(g: Graph, result: SparsifierResult, sandwich: SandwichReport, manifest: RunManifest) -> dict[str, Any]:
    return {
        "selected_edges": _edge_pairs(g, result.selected_edges),
        "lambda_min": result.lambda_min_achieved,
        "kappa_inv_bound": result.kappa_inv_bound,
        "n": result.n,
        "m": result.m,
        "ell": result.ell,
        "T": result.T,
        "tie_rule": result.tie_rule.value,
        "sandwich": sandwich.to_json(),
        "per_iteration": [
            {
                "t": record.t,
                "lambda": record.lam,
                "lambda_hat": record.lam_hat,
                "chosen": list(g.original_edge(record.chosen)),
                "candidates_examined": record.candidates_examined,
                "trace_at_lambda": record.trace_at_lambda,
                "chosen_trace": record.chosen_trace,
            }
            for record in result.per_iteration
        ],
        "manifest": manifest.to_json(),
    }


# --- Output ---


async def _write(path: Path, content: str | bytes) -> None:
    mode = "wb" if isinstance(content, bytes) else "w"
    async with aiofiles.open(path, mode) as f:
        await f.write(content)
    logger.info(f"Wrote '{path}'")


async def write_outputs(outputs: dict[Optional[Path], str | bytes]) -> None:
    """Writes every output concurrently; a None path prints the content to stdout."""
    async with asyncio.TaskGroup() as tg:
        for path, content in outputs.items():
            if path is None:
                sys.stdout.write(content if isinstance(content, str) else content.decode("utf-8"))
                sys.stdout.flush()
            else:
                tg.create_task(_write(path, content))


# --- Shared steps ---


async def _load(path: Path, fmt: EdgeListFormat) -> Optional[Graph]:
    match await load_graph(path, fmt):
        case Success(CleanedGraph(graph=graph)):
            return graph
        case Failure(failure):
            logger.error(failure.describe())
    return None


async def _load_subset(path: Path, graph: Graph) -> Optional[tuple[int, ...]]:
    match await load_subset(path, graph):
        case Success(indices):
            logger.info(f"Subset '{path.name}': {len(indices)} edges")
            return indices
        case Failure(failure):
            logger.error(failure.describe())
    return None


def _basis(g: Graph) -> OrthonormalEdgeBasis:
    return edge_orthonormal_basis(incidence_system(g), connected_components(g))


async def _compute(fn: Callable[..., R], *args) -> Result[R, UcsError]:
    return await asyncio.to_thread(safe((UcsError,))(fn), *args)


def _failure_exit(error: UcsError) -> int:
    logger.error(f"{type(error).__name__}: {error}")
    return error.exit_code


def _layout_svg(g: Graph, seed: int, iterations: int, highlight: Sequence[int]) -> bytes:
    coords = fruchterman_reingold(g, LayoutConfig(iterations=iterations, seed=seed))
    return render_svg(g, coords, highlight)


# --- Commands ---


async def run_sparsify(
    input_path: Path,
    fmt: EdgeListFormat,
    ell: int,
    tie_rule: TieRule = TieRule.FIRST_FIT,
    T: Optional[float] = None,
    out: Optional[Path] = None,
    svg: Optional[Path] = None,
    edges_out: Optional[Path] = None,
    seed: int = 0,
    iterations: int = 500,
    threads: int = 1,
    show_progress: bool = True,
) -> int:
    """
    Selects ell edges of the input graph, audits the sandwich inequality on them and
    writes the JSON report plus the optional SVG and sparsifier edge list.
    """
    g = await _load(input_path, fmt)
    if g is None:
        return EXIT_INPUT_ERROR

    def prepare() -> tuple[OrthonormalEdgeBasis, SelectionParams]:
        basis = _basis(g)
        return basis, SelectionParams.for_instance(basis.n, basis.m, ell, tie_rule, T)

    match await _compute(prepare):
        case Success((basis, params)):
            pass
        case Failure(error):
            return _failure_exit(error)

    def work(step: StepCallback) -> SparsifierResult:
        return sparsify_basis(basis, ell, params, threads=threads, on_iteration=step)

    progress_cols = (
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TextColumn("[bold green]T={task.fields[T]:.4g}"),
        TimeElapsedColumn(),
    )
    try:
        result = await run_with_progress(
            work, total=ell, description="Selecting edges...", enabled=show_progress,
            progress_cols=progress_cols, T=params.T,
        )
    except UcsError as e:
        return _failure_exit(e)

    sandwich = verify_sandwich(basis, result.selected_edges, result.kappa_inv_bound)
    if not sandwich.passed:
        logger.error(
            f"Sandwich check failed: eigenvalues in [{sandwich.lower:.6g}, {sandwich.upper:.6g}], "
            f"claimed 1/kappa = {sandwich.kappa_inv_claimed:.6g}"
        )
    logger.info(f"Selected {len(result.selected_edges)} edges; lambda_min = {result.lambda_min_achieved:.10g}")

    manifest = RunManifest.create(
        Command.SPARSIFY, input=input_path, format=fmt, ell=ell, tie_rule=params.tie_rule, seed=seed,
        outputs={"out": out, "svg": svg, "edges_out": edges_out},
    )
    outputs: dict[Optional[Path], str | bytes] = {out: dump_json(sparsifier_report(g, result, sandwich, manifest))}
    if edges_out:
        outputs[edges_out] = format_edge_list(result.subgraph(g), weighted=fmt is EdgeListFormat.WEIGHTED)
    if svg:
        outputs[svg] = await asyncio.to_thread(_layout_svg, g, seed, iterations, result.selected_edges)
    await write_outputs(outputs)
    return EXIT_OK if sandwich.passed else EXIT_VERIFICATION_FAILED


async def run_tree(
    input_path: Path,
    fmt: EdgeListFormat,
    out: Optional[Path] = None,
    json_out: Optional[Path] = None,
    threads: int = 1,
) -> int:
    """Writes the edge list of a spanning forest built from an (n + 1)-edge selection."""
    g = await _load(input_path, fmt)
    if g is None:
        return EXIT_INPUT_ERROR

    match await _compute(spanning_structure, g, threads):
        case Success(kept):
            pass
        case Failure(error):
            return _failure_exit(error)

    forest = g.edge_subgraph(kept)
    outputs: dict[Optional[Path], str | bytes] = {
        out: format_edge_list(forest, weighted=fmt is EdgeListFormat.WEIGHTED)
    }
    if json_out:
        manifest = RunManifest.create(
            Command.TREE, input=input_path, format=fmt, outputs={"out": out, "json_out": json_out}
        )
        outputs[json_out] = dump_json({
            "selected_edges": _edge_pairs(g, kept),
            "edge_count": len(kept),
            "components": connected_components(g).count,
            "manifest": manifest.to_json(),
        })
    await write_outputs(outputs)
    return EXIT_OK


async def run_bounds(
    ns: Sequence[int],
    ms: Sequence[int],
    ells: Sequence[int],
    csv_out: Optional[Path] = None,
    json_out: Optional[Path] = None,
    show_progress: bool = True,
) -> int:
    """Tabulates BoundReport rows over the grid; CSV goes to stdout unless a path is given."""
    triples = bound_grid(ns, ms, ells)
    rows = await run_with_progress(
        lambda step: bound_table(triples, on_row=step),
        total=len(triples), description="Bounds...", enabled=show_progress and len(triples) > 1,
    )
    skipped = sum(1 for row in rows if isinstance(row, Failure))
    if skipped:
        logger.warning(f"{skipped} of {len(rows)} triples violate n < ell < m and were skipped.")

    outputs: dict[Optional[Path], str | bytes] = {}
    if json_out:
        manifest = RunManifest.create(
            Command.BOUNDS, input=None, format=None, outputs={"csv_out": csv_out, "json_out": json_out}
        )
        outputs[json_out] = dump_json({"rows": bound_rows_to_json(rows), "manifest": manifest.to_json()})
    if csv_out or not json_out:
        outputs[csv_out] = bound_rows_to_csv(rows)
    await write_outputs(outputs)
    return EXIT_OK


async def run_verify(
    input_path: Path,
    fmt: EdgeListFormat,
    subset_path: Path,
    kappa_inv: float,
    out: Optional[Path] = None,
    tol: float = 1e-8,
    pencil: bool = False,
) -> int:
    """Audits (1/kappa) L_G <= L_H <= L_G for a given edge subset."""
    g = await _load(input_path, fmt)
    if g is None:
        return EXIT_INPUT_ERROR
    selected = await _load_subset(subset_path, g)
    if selected is None:
        return EXIT_INPUT_ERROR

    match await _compute(_basis, g):
        case Success(basis):
            pass
        case Failure(error):
            return _failure_exit(error)

    report = verify_sandwich(basis, selected, kappa_inv, tol)
    manifest = RunManifest.create(Command.VERIFY, input=input_path, format=fmt, outputs={"out": out})
    data = {**report.to_json(), "subset": str(subset_path), "edge_count": len(selected)}
    if pencil:
        lower, upper = await asyncio.to_thread(pencil_extremes, incidence_system(g), basis, selected)
        data["pencil"] = {"lower": lower, "upper": upper}
        logger.info(f"Pencil cross-check: [{lower:.10g}, {upper:.10g}]")
    data["manifest"] = manifest.to_json()

    level = logging.INFO if report.passed else logging.ERROR
    logger.log(
        level,
        f"Sandwich {'passed' if report.passed else 'FAILED'}: "
        f"[{report.lower:.10g}, {report.upper:.10g}] against 1/kappa = {kappa_inv:.6g}",
    )
    await write_outputs({out: dump_json(data)})
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


async def run_layout(
    input_path: Path,
    fmt: EdgeListFormat,
    subset_path: Optional[Path] = None,
    seed: int = 0,
    iterations: int = 500,
    coords_out: Optional[Path] = None,
    svg: Optional[Path] = None,
) -> int:
    """
    Places the vertices by force-directed layout and draws every edge of the graph.

    Without a subset the layout runs on the whole graph; with one it runs on the subset
    and the subset's edges are highlighted.
    """
    g = await _load(input_path, fmt)
    if g is None:
        return EXIT_INPUT_ERROR
    highlight: tuple[int, ...] = ()
    if subset_path:
        selected = await _load_subset(subset_path, g)
        if selected is None:
            return EXIT_INPUT_ERROR
        highlight = selected

    try:
        cfg = LayoutConfig(iterations=iterations, seed=seed)
    except UcsError as e:
        return _failure_exit(e)

    layout_graph = g.edge_subgraph(highlight) if subset_path else g
    coords = await asyncio.to_thread(fruchterman_reingold, layout_graph, cfg)
    manifest = RunManifest.create(
        Command.LAYOUT, input=input_path, format=fmt, seed=seed,
        outputs={"coords_out": coords_out, "svg": svg},
    )
    outputs: dict[Optional[Path], str | bytes] = {}
    if coords_out or not svg:
        outputs[coords_out] = dump_json({"coordinates": coords.to_json(g), "manifest": manifest.to_json()})
    if svg:
        outputs[svg] = render_svg(g, coords, highlight)
    await write_outputs(outputs)
    return EXIT_OK
