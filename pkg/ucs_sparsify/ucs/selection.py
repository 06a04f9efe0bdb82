"""
Greedy unweighted column selection.

Starting from A_0 = 0 and an empty selection, iteration t

1. solves tr (A_t - lambda I)^{-1} = T for lambda < lambda_min(A_t),
2. solves f(lambda_hat) = 0 for lambda_hat in (lambda, lambda_min(A_t)), where
   f(x) = (x - lambda)[m - t + sum_j (1 - l_j)/(l_j - lambda)]
          - sum_j w_j (1 - l_j) / sum_j w_j,   w_j = 1 / ((l_j - lambda)(l_j - x)),
3. picks an unselected edge i with tr (A_t - lambda_hat I + u_i u_i^T)^{-1} <= T,
4. sets A_{t+1} = A_t + u_i u_i^T.

After ell iterations lambda_min(A_ell) > kappa_lower_bound(n, m, ell) when T comes
from ``choose_T``. Such an i always exists, so an empty scan means the tolerances
are misconfigured.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from ..errors import (
    BoundViolationError,
    DegenerateUpdateError,
    DomainError,
    InfeasibleSelectionError,
    ParameterDomainError,
    SolverError,
)
from ..graph.model import Graph, connected_components, incidence_system
from ..spectra import (
    EigenSpectrum,
    OrthonormalEdgeBasis,
    edge_orthonormal_basis,
    shifted_inverse_trace,
    sym_eigh,
    sym_eigvals,
)
from .bounds import choose_T, kappa_lower_bound

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
DEGENERATE_DENOMINATOR = 1e-14
BEST_FIT_TIE_TOL = 1e-12


class TieRule(str, Enum):
    FIRST_FIT = "first"
    BEST_FIT = "best"


@dataclass(frozen=True)
class SelectionParams:
    ell: int
    T: float
    tie_rule: TieRule = TieRule.FIRST_FIT
    root_tol: float = 1e-12
    trace_slack: Optional[float] = None  # defaults to 1e-9 * T

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ParameterDomainError(f"Budget ell must be positive, got {self.ell}.")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ParameterDomainError(f"Barrier budget T must be positive and finite, got {self.T}.")
        if not self.root_tol > 0:
            raise ParameterDomainError(f"root_tol must be positive, got {self.root_tol}.")
        if self.trace_slack is not None and not self.trace_slack >= 0:
            raise ParameterDomainError(f"trace_slack must be non-negative, got {self.trace_slack}.")
        object.__setattr__(self, "tie_rule", TieRule(self.tie_rule))

    @property
    def slack(self) -> float:
        return 1e-9 * self.T if self.trace_slack is None else self.trace_slack

    @classmethod
    def for_instance(
        cls,
        n: int,
        m: int,
        ell: int,
        tie_rule: TieRule = TieRule.FIRST_FIT,
        T: Optional[float] = None,
        root_tol: float = 1e-12,
        trace_slack: Optional[float] = None,
    ) -> "SelectionParams":
        """Parameters for a graph with rank n and m edges; T defaults to the optimal budget."""
        if not n < ell < m:
            raise ParameterDomainError(
                f"Budget requires n < ell < m, got n={n}, ell={ell}, m={m}."
            )
        return cls(
            ell=ell,
            T=choose_T(n, m, ell).T if T is None else T,
            tie_rule=tie_rule,
            root_tol=root_tol,
            trace_slack=trace_slack,
        )


class IterationRecord(NamedTuple):
    t: int
    lam: float
    lam_hat: float
    chosen: int
    candidates_examined: int
    trace_at_lambda: float
    chosen_trace: float


class CandidateChoice(NamedTuple):
    index: int
    trace: float
    examined: int


class SparsifierResult(NamedTuple):
    selected_edges: tuple[int, ...]
    lambda_min_achieved: float
    kappa_inv_bound: float
    per_iteration: tuple[IterationRecord, ...]
    wall_time: float
    n: int
    m: int
    ell: int
    T: float
    tie_rule: TieRule

    def subgraph(self, g: Graph) -> Graph:
        """The sparsifier H: the selected edges with their original weights."""
        return g.edge_subgraph(self.selected_edges)


@dataclass
class SelectionState:
    """Mutable per-run state; owned by a single ``sparsify`` call."""
    n: int
    A: np.ndarray
    t: int = 0
    selected: list[int] = field(default_factory=list)
    spectrum: Optional[EigenSpectrum] = None
    eigenvectors: Optional[np.ndarray] = None
    lam: float = float("nan")
    lam_hat: float = float("nan")

    @classmethod
    def initial(cls, n: int) -> "SelectionState":
        return cls(n=n, A=np.zeros((n, n)))

    def prepare(self, T: float, m: int, tol: float) -> None:
        """Refreshes the spectrum of A_t and the two shifts for the coming scan."""
        self.spectrum, self.eigenvectors = sym_eigh(self.A)
        self.lam = solve_lambda(self.spectrum, T, tol)
        self.lam_hat = solve_lambda_hat(self.spectrum, self.lam, m, self.t, tol)

    def _shifted_power(self, power: int) -> np.ndarray:
        Q = self.eigenvectors
        return (Q / (self.spectrum.values - self.lam_hat) ** power) @ Q.T

    @property
    def M_inv(self) -> np.ndarray:
        """(A_t - lambda_hat I)^{-1}"""
        return self._shifted_power(1)

    @property
    def M_inv2(self) -> np.ndarray:
        """(A_t - lambda_hat I)^{-2}"""
        return self._shifted_power(2)

    def accept(self, index: int, u: np.ndarray) -> None:
        self.A = self.A + np.outer(u, u)
        self.selected.append(index)
        self.t += 1


def _brent(fn: Callable[[float], float], lo: float, hi: float, xtol: float, what: str) -> float:
    try:
        root, info = brentq(fn, lo, hi, xtol=xtol, rtol=4 * _EPS, maxiter=500, full_output=True, disp=False)
    except ValueError as e:
        raise SolverError(f"{what}: {e}") from e
    if not info.converged:
        raise SolverError(f"{what}: no convergence after {info.iterations} iterations ({info.flag}).")
    return root


def _at_resolution_limit(fn: Callable[[float], float], root: float) -> bool:
    """True if the sign of fn flips between the floats adjacent to root."""
    below, above = np.nextafter(root, -np.inf), np.nextafter(root, np.inf)
    return fn(below) <= 0 <= fn(above)


def solve_lambda(spectrum: EigenSpectrum, T: float, tol: float = 1e-12) -> float:
    """
    The unique lambda < lambda_min with tr (A - lambda I)^{-1} = T.

    The root lies in [lambda_min - n/T, lambda_min): every term is at most T/n at the
    left end and the trace diverges at the right end.
    """
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}.")
    values = spectrum.values
    lam_n = spectrum.smallest

    def residual(x: float) -> float:
        return float(np.sum(1.0 / (values - x))) - T

    lo = lam_n - spectrum.size / T
    if residual(lo) >= 0:
        root = lo
    else:
        hi = lam_n - 4 * _EPS * (1 + abs(lam_n))
        root = _brent(residual, lo, hi, xtol=max(tol / T, 1e-300), what="lambda solve")

    r = residual(root)
    if abs(r) > tol * T and not _at_resolution_limit(residual, root):
        raise SolverError(f"lambda solve: residual {r:.3g} exceeds {tol * T:.3g}.")
    return root


def solve_lambda_hat(spectrum: EigenSpectrum, lam: float, m: int, t: int, tol: float = 1e-12) -> float:
    """
    A root lambda_hat in (lam, lambda_min) of the barrier step function f.

    f(lam) < 0 and f > 0 just below lambda_min, so the bracket always holds in exact
    arithmetic; a missing sign change signals an upstream numerical failure.
    """
    values = spectrum.values
    lam_n = spectrum.smallest
    if not lam < lam_n:
        raise DomainError(f"lambda {lam!r} is not below the smallest eigenvalue {lam_n!r}.")

    gaps = values - lam
    slack = 1.0 - values
    level = (m - t) + float(np.sum(slack / gaps))

    def ratio(x: float) -> float:
        w = 1.0 / (gaps * (values - x))
        w = w / w.max()
        return float(np.dot(w, slack) / w.sum())

    def f(x: float) -> float:
        return (x - lam) * level - ratio(x)

    lo = lam
    hi = lam_n - 4 * _EPS * (1 + abs(lam_n))
    if not (hi > lo and f(lo) < 0 < f(hi)):
        raise SolverError(
            f"lambda_hat solve: no sign change on ({lo!r}, {hi!r}) at t={t}."
        )
    root = _brent(f, lo, hi, xtol=max(tol / max(level, 1.0), 1e-300), what="lambda_hat solve")

    value = f(root)
    scale = 1.0 + abs((root - lam) * level) + abs(ratio(root))
    if abs(value) > tol * scale and not _at_resolution_limit(f, root):
        raise SolverError(f"lambda_hat solve: residual {value:.3g} exceeds {tol * scale:.3g}.")
    return root


def candidate_trace(M_inv: np.ndarray, M_inv2: np.ndarray, base_trace: float, u: np.ndarray) -> float:
    """
    tr (M + u u^T)^{-1} from M^{-1}, M^{-2} and tr M^{-1} by Sherman-Morrison:

        tr M^{-1} - u^T M^{-2} u / (1 + u^T M^{-1} u)
    """
    u = np.asarray(u, dtype=float)
    denominator = 1.0 + float(u @ M_inv @ u)
    if abs(denominator) < DEGENERATE_DENOMINATOR:
        raise DegenerateUpdateError(f"Rank-one update denominator {denominator:.3g} vanished.")
    return base_trace - float(u @ M_inv2 @ u) / denominator


def _candidate_traces(
    state: SelectionState, basis: OrthonormalEdgeBasis, candidates: np.ndarray, base: float
) -> np.ndarray:
    # Same quantity as candidate_trace, evaluated in the eigenbasis of A_t.
    shifted = state.spectrum.values - state.lam_hat
    Y2 = (state.eigenvectors.T @ basis.U[:, candidates]) ** 2
    q1 = (Y2 / shifted[:, None]).sum(axis=0)
    q2 = (Y2 / (shifted**2)[:, None]).sum(axis=0)
    denominator = 1.0 + q1
    if np.any(np.abs(denominator) < DEGENERATE_DENOMINATOR):
        raise DegenerateUpdateError("Rank-one update denominator vanished during the candidate scan.")
    return base - q2 / denominator


def scan_candidates(
    state: SelectionState, basis: OrthonormalEdgeBasis, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Returns the unselected edge indices (ascending) and their updated traces."""
    candidates = np.setdiff1d(np.arange(basis.m), np.asarray(state.selected, dtype=np.intp))
    base = float(np.sum(1.0 / (state.spectrum.values - state.lam_hat)))
    if threads <= 1 or len(candidates) < 2 * threads:
        return candidates, _candidate_traces(state, basis, candidates, base)

    chunks = np.array_split(candidates, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda chunk: _candidate_traces(state, basis, chunk, base), chunks))
    return candidates, np.concatenate(parts)


def choose_candidate(
    state: SelectionState, basis: OrthonormalEdgeBasis, params: SelectionParams, threads: int = 1
) -> CandidateChoice:
    """
    Applies the trace test to every unselected edge.

    first_fit returns the lowest passing index; best_fit the smallest trace, lowest index
    among traces within a relative 1e-12 of the minimum.
    """
    candidates, traces = scan_candidates(state, basis, threads)
    threshold = shifted_inverse_trace(state.spectrum, state.lam) + params.slack
    passing = np.flatnonzero(traces <= threshold)
    if passing.size == 0:
        best = float(traces.min()) if traces.size else float("nan")
        raise InfeasibleSelectionError(
            f"No edge passes the trace test at t={state.t}: best trace {best!r} > {threshold!r}."
        )

    if params.tie_rule is TieRule.FIRST_FIT:
        position = int(passing[0])
        return CandidateChoice(int(candidates[position]), float(traces[position]), position + 1)

    best = float(traces.min())
    position = int(np.flatnonzero(traces <= best + BEST_FIT_TIE_TOL * abs(best))[0])
    return CandidateChoice(int(candidates[position]), float(traces[position]), len(candidates))


def select_index(
    state: SelectionState, basis: OrthonormalEdgeBasis, params: SelectionParams, threads: int = 1
) -> int:
    return choose_candidate(state, basis, params, threads).index


def sparsify_basis(
    basis: OrthonormalEdgeBasis,
    ell: int,
    params: Optional[SelectionParams] = None,
    threads: int = 1,
    on_iteration: Optional[Callable[[int], None]] = None,
) -> SparsifierResult:
    """Runs ell greedy iterations on the columns of ``basis``."""
    started = time.perf_counter()
    n, m = basis.n, basis.m
    recommended = SelectionParams.for_instance(n, m, ell)
    if params is None:
        params = recommended
    elif params.ell != ell:
        raise ParameterDomainError(f"Parameter budget {params.ell} differs from ell={ell}.")
    bound = kappa_lower_bound(n, m, ell)
    logger.info(f"Selecting {ell} of {m} edges (n={n}, T={params.T:.6g}, 1/kappa={bound:.6g})")

    state = SelectionState.initial(n)
    records = []
    for t in range(ell):
        state.prepare(params.T, m, params.root_tol)
        choice = choose_candidate(state, basis, params, threads)
        record = IterationRecord(
            t=t,
            lam=state.lam,
            lam_hat=state.lam_hat,
            chosen=choice.index,
            candidates_examined=choice.examined,
            trace_at_lambda=shifted_inverse_trace(state.spectrum, state.lam),
            chosen_trace=choice.trace,
        )
        records.append(record)
        logger.debug(
            f"t={t}: lambda={record.lam:.12g} lambda_hat={record.lam_hat:.12g} "
            f"chose edge {choice.index} after {choice.examined} candidate(s)"
        )
        state.accept(choice.index, basis.column(choice.index))
        if on_iteration:
            on_iteration(t + 1)

    lambda_min = sym_eigvals(state.A).smallest
    result = SparsifierResult(
        selected_edges=tuple(state.selected),
        lambda_min_achieved=lambda_min,
        kappa_inv_bound=bound,
        per_iteration=tuple(records),
        wall_time=time.perf_counter() - started,
        n=n,
        m=m,
        ell=ell,
        T=params.T,
        tie_rule=params.tie_rule,
    )

    if not lambda_min > bound:
        message = f"lambda_min(A_ell) = {lambda_min!r} does not exceed 1/kappa = {bound!r}"
        if math.isclose(params.T, recommended.T, rel_tol=1e-12):
            raise BoundViolationError(message)
        logger.warning(f"{message} (custom T={params.T:.6g}; the bound assumes T={recommended.T:.6g})")
    logger.info(f"lambda_min(A_ell) = {lambda_min:.10g} in {result.wall_time:.2f}s")
    return result


def sparsify(
    g: Graph,
    ell: int,
    params: Optional[SelectionParams] = None,
    threads: int = 1,
    on_iteration: Optional[Callable[[int], None]] = None,
    rank_tol: Optional[float] = None,
) -> SparsifierResult:
    """
    Selects ell edges of ``g`` whose Laplacian L_H satisfies (1/kappa) L_G <= L_H <= L_G.

    Raises:
        ParameterDomainError: unless n < ell < m with n = |V| - r.
        SolverError, InfeasibleSelectionError: on numerical breakdown.
    """
    basis = edge_orthonormal_basis(incidence_system(g), connected_components(g), rank_tol)
    return sparsify_basis(basis, ell, params, threads, on_iteration)
