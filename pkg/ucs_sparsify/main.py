import logging
from pathlib import Path

import async_typer
import typer
from typing_extensions import Annotated, Optional

from . import logging_config, runner
from .errors import ParameterDomainError
from .graph.edge_list_parser import EdgeListFormat
from .logging_config import LogLevel
from .ucs.selection import TieRule

logger = logging.getLogger(__name__)

app = async_typer.AsyncTyper(
    name="ucs-sparsify",
    help="Greedy unweighted column selection for spectral graph sparsification.",
    add_completion=False,
)


def parse_range(value: str) -> list[int]:
    """'a' -> [a]; 'a:b' -> [a, ..., b]."""
    try:
        match [int(part) for part in value.split(":")]:
            case [single]:
                return [single]
            case [lo, hi] if lo <= hi:
                return list(range(lo, hi + 1))
    except ValueError:
        pass
    raise ParameterDomainError(f"Expected an integer or a non-empty range 'a:b', got '{value}'.")


Verbosity = Annotated[
    bool,
    async_typer.Option(
        "--verbose",
        "-v",
        help="Enable verbose (DEBUG) logging, including one line per greedy iteration.",
        show_default=False,
    ),
]
Quiet = Annotated[
    bool,
    async_typer.Option("--quiet", "-q", help="Only log warnings and errors.", show_default=False),
]
LogFile = Annotated[
    Optional[Path],
    async_typer.Option(help="Also write a plain-text copy of the log to this file.", show_default=False),
]

InputPath = Annotated[
    Path,
    async_typer.Option("--input", "-i", help="Edge-list file of the graph.", show_default=False),
]
Format = Annotated[
    EdgeListFormat,
    async_typer.Option("--format", "-f", help="'snap' for 'u v' lines, 'weighted' for 'u v w' lines."),
]
Threads = Annotated[
    int,
    async_typer.Option(
        envvar="UCS_THREADS", min=1, help="Worker threads for the candidate scan."
    ),
]
NoProgress = Annotated[
    bool,
    async_typer.Option("--no-progress", help="Hide the progress bar.", show_default=False),
]
Seed = Annotated[int, async_typer.Option(help="Seed for the initial layout placement.")]
Iterations = Annotated[int, async_typer.Option(min=1, help="Force-directed layout sweeps.")]


@app.callback()
def main(verbose: Verbosity = False, quiet: Quiet = False, log_file: LogFile = None):
    """
    Select a few edges of a graph whose Laplacian approximates the original.
    """
    level = LogLevel.DEBUG if verbose else LogLevel.WARNING if quiet else LogLevel.INFO
    logging_config.setup_logging(level, log_file)


@app.async_command()
async def sparsify(
    input_path: InputPath,
    ell: Annotated[int, async_typer.Option("--ell", help="Number of edges to select (n < ell < m).", show_default=False)],
    fmt: Format = EdgeListFormat.SNAP,
    tie: Annotated[
        TieRule,
        async_typer.Option("--tie", help="'first': lowest passing edge index; 'best': smallest trace."),
    ] = TieRule.FIRST_FIT,
    T: Annotated[
        Optional[float],
        async_typer.Option(
            "--T",
            help="Override the barrier budget. The lambda_min guarantee only holds for the default.",
            show_default=False,
        ),
    ] = None,
    out: Annotated[
        Optional[Path],
        async_typer.Option(help="JSON report path (stdout if omitted).", show_default=False),
    ] = None,
    svg: Annotated[
        Optional[Path],
        async_typer.Option(help="Draw the graph with the selected edges highlighted.", show_default=False),
    ] = None,
    edges_out: Annotated[
        Optional[Path],
        async_typer.Option(help="Edge list of the sparsifier with its original weights.", show_default=False),
    ] = None,
    seed: Seed = 0,
    iterations: Iterations = 500,
    threads: Threads = 1,
    no_progress: NoProgress = False,
):
    """
    Selects ell edges and audits the spectral sandwich on them.

    Exit code 0 on success, 1 on an input or domain error, 2 if verification fails.
    """
    code = await runner.run_sparsify(
        input_path, fmt, ell, tie_rule=tie, T=T, out=out, svg=svg, edges_out=edges_out,
        seed=seed, iterations=iterations, threads=threads, show_progress=not no_progress,
    )
    raise typer.Exit(code)


@app.async_command()
async def tree(
    input_path: InputPath,
    fmt: Format = EdgeListFormat.SNAP,
    out: Annotated[
        Optional[Path],
        async_typer.Option(help="Edge-list output path (stdout if omitted).", show_default=False),
    ] = None,
    json_out: Annotated[
        Optional[Path],
        async_typer.Option("--json", help="Also write a JSON report usable as --subset.", show_default=False),
    ] = None,
    threads: Threads = 1,
):
    """
    Extracts a spanning forest (|V| - r edges) from an (n + 1)-edge greedy selection.
    """
    code = await runner.run_tree(input_path, fmt, out=out, json_out=json_out, threads=threads)
    raise typer.Exit(code)


@app.async_command()
async def bounds(
    n: Annotated[str, async_typer.Option("--n", help="Rank n = |V| - r, as 'a' or 'a:b'.")],
    m: Annotated[str, async_typer.Option("--m", help="Edge count, as 'a' or 'a:b'.")],
    ell: Annotated[str, async_typer.Option("--ell", help="Budget, as 'a' or 'a:b'.")],
    csv_out: Annotated[
        Optional[Path],
        async_typer.Option("--csv", help="CSV output path (stdout if neither --csv nor --json).", show_default=False),
    ] = None,
    json_out: Annotated[
        Optional[Path], async_typer.Option("--json", help="JSON output path.", show_default=False)
    ] = None,
    no_progress: NoProgress = False,
):
    """
    Tabulates the guaranteed 1/kappa against the dual-set and Ramanujan comparisons.

    Triples outside n < ell < m are reported as skipped rows.
    """
    try:
        ns, ms, ells = parse_range(n), parse_range(m), parse_range(ell)
    except ParameterDomainError as e:
        logger.error(str(e))
        raise typer.Exit(runner.EXIT_INPUT_ERROR)
    code = await runner.run_bounds(
        ns, ms, ells, csv_out=csv_out, json_out=json_out, show_progress=not no_progress,
    )
    raise typer.Exit(code)


@app.async_command()
async def verify(
    input_path: InputPath,
    subset: Annotated[
        Path,
        async_typer.Option(help="JSON list of [u, v] edges, or a sparsify/tree report.", show_default=False),
    ],
    kappa_inv: Annotated[float, async_typer.Option(help="Claimed 1/kappa.", show_default=False)],
    fmt: Format = EdgeListFormat.SNAP,
    out: Annotated[
        Optional[Path],
        async_typer.Option(help="JSON report path (stdout if omitted).", show_default=False),
    ] = None,
    tol: Annotated[float, async_typer.Option(help="Absolute tolerance on eigenvalue comparisons.")] = 1e-8,
    pencil: Annotated[
        bool,
        async_typer.Option("--pencil", help="Cross-check with the Laplacian pencil.", show_default=False),
    ] = False,
):
    """
    Checks (1/kappa) L_G <= L_H <= L_G for an edge subset. Exit code 2 if it fails.
    """
    code = await runner.run_verify(input_path, fmt, subset, kappa_inv, out=out, tol=tol, pencil=pencil)
    raise typer.Exit(code)


@app.async_command()
async def layout(
    input_path: InputPath,
    fmt: Format = EdgeListFormat.SNAP,
    subset: Annotated[
        Optional[Path],
        async_typer.Option(
            help="Lay out only these edges (all edges are still drawn).", show_default=False
        ),
    ] = None,
    seed: Seed = 0,
    iterations: Iterations = 500,
    coords_out: Annotated[
        Optional[Path],
        async_typer.Option(help="Coordinates JSON path (stdout if neither output is given).", show_default=False),
    ] = None,
    svg: Annotated[Optional[Path], async_typer.Option(help="SVG output path.", show_default=False)] = None,
):
    """
    Computes a force-directed layout and renders it.
    """
    code = await runner.run_layout(
        input_path, fmt, subset_path=subset, seed=seed, iterations=iterations, coords_out=coords_out, svg=svg,
    )
    raise typer.Exit(code)


if __name__ == "__main__":
    app()
