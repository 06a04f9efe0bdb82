"""Independent checks of sparsifier quality and bound tables."""

import csv
import io
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg
from returns.result import Failure, Result, Success

from .errors import CombinatorialGuardError, ParameterDomainError
from .graph.model import IncidenceSystem
from .spectra import OrthonormalEdgeBasis, generalized_extremes
from .ucs.bounds import BoundReport, bound_report

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
ORACLE_LIMIT = 10**6
ORACLE_TIE_TOL = 1e-12
_BATCH = 2048


class SandwichReport(NamedTuple):
    lower: float
    upper: float
    kappa_inv_claimed: float
    passed: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "kappa_inv_claimed": self.kappa_inv_claimed,
            "pass": self.passed,
        }


class OracleResult(NamedTuple):
    lambda_min: float
    subset: tuple[int, ...]
    subsets_examined: int


class SkippedTriple(NamedTuple):
    n: int
    m: int
    ell: int
    note: str


def verify_sandwich(
    basis: OrthonormalEdgeBasis, selected: Iterable[int], kappa_inv: float, tol: float = DEFAULT_TOL
) -> SandwichReport:
    """Checks (1/kappa) L_G <= L_H <= L_G through the extreme eigenvalues of A_F."""
    lower, upper = generalized_extremes(basis, selected)
    passed = upper <= 1 + tol and lower >= kappa_inv - tol
    return SandwichReport(lower=lower, upper=upper, kappa_inv_claimed=kappa_inv, passed=passed)


def pencil_extremes(system: IncidenceSystem, basis: OrthonormalEdgeBasis, selected: Iterable[int]) -> tuple[float, float]:
    """
    Extreme generalized eigenvalues of the pencil (L_H, L_G) on the range of L_G, computed
    from the Laplacians themselves rather than from the columns of U_G.
    """
    selected = list(selected)
    if basis.n == 0:
        return 0.0, 0.0
    B_F = system.B[selected].astype(float)
    L_H = B_F.T @ (system.W[selected][:, None] * B_F)
    P = basis.Vt
    values = scipy.linalg.eigh(P @ L_H @ P.T, P @ system.L @ P.T, eigvals_only=True)
    return float(values[0]), float(values[-1])


def _combination_batches(m: int, ell: int) -> Iterator[np.ndarray]:
    combos = itertools.combinations(range(m), ell)
    while batch := list(itertools.islice(combos, _BATCH)):
        yield np.array(batch, dtype=np.intp)


def _best_in_batch(U_t: np.ndarray, batch: np.ndarray) -> tuple[float, int]:
    columns = U_t[batch]  # (b, ell, n)
    grams = np.swapaxes(columns, 1, 2) @ columns
    smallest = np.linalg.eigvalsh(grams)[:, 0]
    top = float(smallest.max())
    return top, int(np.flatnonzero(smallest >= top - ORACLE_TIE_TOL)[0])


def _scan_batches(
    U_t: np.ndarray, batches: Iterator[np.ndarray], threads: int
) -> Iterator[tuple[np.ndarray, tuple[float, int]]]:
    """Yields (batch, best in batch) in batch order with at most 2 * threads batches in flight."""
    if threads <= 1:
        for batch in batches:
            yield batch, _best_in_batch(U_t, batch)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for window in itertools.batched(batches, 2 * threads):
            yield from zip(window, pool.map(lambda b: _best_in_batch(U_t, b), window))


def brute_force_best(
    basis: OrthonormalEdgeBasis, ell: int, limit: int = ORACLE_LIMIT, threads: int = 1
) -> OracleResult:
    """
    Exhaustively maximizes lambda_min(sum_{i in S} u_i u_i^T) over |S| = ell.

    Subsets are visited in lexicographic order; a later subset replaces the incumbent
    only if it is better by more than 1e-12, so ties go to the lexicographically smallest.
    """
    m = basis.m
    if not 1 <= ell <= m:
        raise ParameterDomainError(f"Oracle budget must satisfy 1 <= ell <= m, got ell={ell}, m={m}.")
    total = math.comb(m, ell)
    if total > limit:
        raise CombinatorialGuardError(f"C({m}, {ell}) = {total} subsets exceeds the limit of {limit}.")
    if basis.n == 0:
        return OracleResult(lambda_min=0.0, subset=tuple(range(ell)), subsets_examined=total)

    U_t = basis.U.T.copy()
    best_value, best_subset = -math.inf, ()
    for batch, (value, position) in _scan_batches(U_t, _combination_batches(m, ell), threads):
        if value > best_value + ORACLE_TIE_TOL:
            best_value, best_subset = value, tuple(int(i) for i in batch[position])
    logger.debug(f"Oracle examined {total} subsets; best lambda_min = {best_value:.12g}")
    return OracleResult(lambda_min=best_value, subset=best_subset, subsets_examined=total)


def greedy_ratio(greedy_lambda_min: float, oracle: OracleResult) -> float:
    """Greedy over optimal lambda_min; informational only."""
    return greedy_lambda_min / oracle.lambda_min if oracle.lambda_min > 0 else math.nan


def bound_table(
    triples: Iterable[tuple[int, int, int]], on_row: Optional[Callable[[int], None]] = None
) -> list[Result[BoundReport, SkippedTriple]]:
    """One BoundReport per valid (n, m, ell); invalid triples become skipped rows with a note."""
    rows: list[Result[BoundReport, SkippedTriple]] = []
    for n, m, ell in triples:
        try:
            rows.append(Success(bound_report(n, m, ell)))
        except ParameterDomainError as e:
            logger.debug(f"Skipping ({n}, {m}, {ell}): {e}")
            rows.append(Failure(SkippedTriple(n=n, m=m, ell=ell, note=str(e))))
        if on_row:
            on_row(len(rows))
    return rows


def bound_grid(ns: Sequence[int], ms: Sequence[int], ells: Sequence[int]) -> list[tuple[int, int, int]]:
    return [(n, m, ell) for n in ns for m in ms for ell in ells]


BOUND_COLUMNS = (
    "n", "m", "ell", "T_hat_star", "F_at_star", "T",
    "kappa_inv_ucs", "kappa_inv_ddsss", "ramanujan_factor",
    "kappa_inv_approx", "kappa_inv_printed", "note",
)


def _row_dict(row: Result[BoundReport, SkippedTriple]) -> dict[str, Any]:
    match row:
        case Success(report):
            return {**report._asdict(), "note": ""}
        case Failure(skipped):
            return {**{column: None for column in BOUND_COLUMNS}, **skipped._asdict()}
    raise TypeError(f"Unexpected row {row!r}")


def bound_rows_to_csv(rows: Sequence[Result[BoundReport, SkippedTriple]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BOUND_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in _row_dict(row).items()})
    return buffer.getvalue()


def bound_rows_to_json(rows: Sequence[Result[BoundReport, SkippedTriple]]) -> list[dict[str, Any]]:
    return [_row_dict(row) for row in rows]
