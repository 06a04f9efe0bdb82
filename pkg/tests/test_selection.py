import math

import numpy as np
import pytest

from conftest import basis_of, random_connected_graph
from ucs_sparsify.errors import (
    DegenerateUpdateError,
    DomainError,
    InfeasibleSelectionError,
    ParameterDomainError,
)
from ucs_sparsify.spectra import EigenSpectrum, OrthonormalEdgeBasis, shifted_inverse_trace
from ucs_sparsify.ucs.bounds import choose_T, kappa_lower_bound
from ucs_sparsify.ucs.selection import (
    SelectionParams,
    SelectionState,
    TieRule,
    candidate_trace,
    choose_candidate,
    scan_candidates,
    select_index,
    solve_lambda,
    solve_lambda_hat,
    sparsify,
    sparsify_basis,
)
from ucs_sparsify.verify import brute_force_best, verify_sandwich


def eigen_spectrum(*values: float) -> EigenSpectrum:
    return EigenSpectrum(values=np.array(sorted(values, reverse=True), dtype=float))


@pytest.mark.parametrize(
    "spectrum, T, expected",
    [
        (eigen_spectrum(0, 0, 0, 0), 8.0, -0.5),
        (eigen_spectrum(2), 4.0, 1.75),
        (eigen_spectrum(1, 2), 3.0, (7 - math.sqrt(13)) / 6),
    ],
)
def test_solve_lambda(spectrum, T, expected):
    lam = solve_lambda(spectrum, T)
    assert lam == pytest.approx(expected, rel=1e-10)
    assert lam < spectrum.smallest
    assert shifted_inverse_trace(spectrum, lam) == pytest.approx(T, rel=1e-10)


def test_solve_lambda_rejects_non_positive_T():
    with pytest.raises(DomainError):
        solve_lambda(eigen_spectrum(1.0), 0.0)


@pytest.mark.parametrize(
    "spectrum, lam, m, t, expected",
    [
        (eigen_spectrum(0, 0, 0, 0), -0.5, 10, 0, -0.5 + 1 / 18),
        (eigen_spectrum(0.5), 0.25, 3, 0, 0.35),
    ],
)
def test_solve_lambda_hat(spectrum, lam, m, t, expected):
    lam_hat = solve_lambda_hat(spectrum, lam, m, t)
    assert lam_hat == pytest.approx(expected, rel=1e-10)
    assert lam < lam_hat < spectrum.smallest


def test_solve_lambda_hat_requires_lambda_below_spectrum():
    with pytest.raises(DomainError):
        solve_lambda_hat(eigen_spectrum(0.5, 1.0), 0.5, 4, 0)


def test_candidate_trace_known_values():
    M = np.diag([0.4, 0.15])
    M_inv = np.linalg.inv(M)
    base = float(np.trace(M_inv))
    M_inv2 = M_inv @ M_inv
    assert candidate_trace(M_inv, M_inv2, base, np.zeros(2)) == pytest.approx(base)
    assert candidate_trace(M_inv, M_inv2, base, [1.0, 0.0]) == pytest.approx(7.380952, abs=1e-6)
    assert candidate_trace(M_inv, M_inv2, base, [0.0, 1.0]) == pytest.approx(3.369565, abs=1e-6)


def test_candidate_trace_matches_direct_inverse():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        Q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
        A = (Q * rng.uniform(0.1, 1.0, size=8)) @ Q.T
        M = A - 0.05 * np.eye(8)
        M_inv = np.linalg.inv(M)
        u = rng.normal(size=8) * 0.3
        direct = float(np.trace(np.linalg.inv(M + np.outer(u, u))))
        assert candidate_trace(M_inv, M_inv @ M_inv, float(np.trace(M_inv)), u) == pytest.approx(direct, rel=1e-8)


def test_candidate_trace_degenerate_update():
    with pytest.raises(DegenerateUpdateError):
        candidate_trace(np.array([[-1.0]]), np.array([[1.0]]), -1.0, np.array([1.0]))


def test_params_validation():
    with pytest.raises(ParameterDomainError):
        SelectionParams(ell=0, T=1.0)
    with pytest.raises(ParameterDomainError):
        SelectionParams(ell=3, T=-1.0)
    with pytest.raises(ParameterDomainError):
        SelectionParams.for_instance(n=3, m=6, ell=3)
    params = SelectionParams.for_instance(n=3, m=6, ell=5, tie_rule="best")
    assert params.tie_rule is TieRule.BEST_FIT
    assert params.T == pytest.approx(choose_T(3, 6, 5).T)
    assert params.slack == pytest.approx(1e-9 * params.T)


def test_triangle_first_fit_picks_lowest_index(triangle):
    basis = basis_of(triangle)
    state = SelectionState.initial(basis.n)
    state.prepare(4.0, basis.m, 1e-12)
    assert state.lam < state.lam_hat < state.spectrum.smallest
    assert select_index(state, basis, SelectionParams(ell=2, T=4.0)) == 0


def test_k4_best_fit_picks_lowest_index(k4):
    basis = basis_of(k4)
    params = SelectionParams.for_instance(basis.n, basis.m, 5, TieRule.BEST_FIT)
    state = SelectionState.initial(basis.n)
    state.prepare(params.T, basis.m, params.root_tol)
    choice = choose_candidate(state, basis, params)
    assert choice.index == 0
    assert choice.examined == 6


def test_zero_column_never_passes(triangle):
    basis = basis_of(triangle)
    padded = basis._replace(U=np.hstack([basis.U, np.zeros((basis.n, 1))]))
    state = SelectionState.initial(basis.n)
    state.prepare(4.0, padded.m, 1e-12)
    candidates, traces = scan_candidates(state, padded)
    assert list(candidates) == [0, 1, 2, 3]
    assert traces[3] > shifted_inverse_trace(state.spectrum, state.lam)


def test_infeasible_scan_raises():
    basis = OrthonormalEdgeBasis(U=np.zeros((1, 1)), sigma=np.ones(1), Vt=np.zeros((1, 2)))
    state = SelectionState.initial(1)
    state.prepare(1.0, 1, 1e-12)
    with pytest.raises(InfeasibleSelectionError):
        choose_candidate(state, basis, SelectionParams(ell=1, T=1.0))


def test_k4_sparsifier(k4):
    result = sparsify(k4, 5)
    assert len(set(result.selected_edges)) == 5
    assert result.lambda_min_achieved == pytest.approx(0.5, abs=1e-10)
    assert result.kappa_inv_bound == pytest.approx(kappa_lower_bound(3, 6, 5))
    assert result.lambda_min_achieved > result.kappa_inv_bound
    assert result.subgraph(k4).edge_count == 5


def test_k4_minus_edge_is_no_better_than_exhaustive(k4_minus_edge):
    basis = basis_of(k4_minus_edge)
    result = sparsify_basis(basis, 4)
    oracle = brute_force_best(basis, 4)
    assert oracle.lambda_min == pytest.approx(0.5)
    assert result.kappa_inv_bound < result.lambda_min_achieved <= oracle.lambda_min + 1e-10


@pytest.mark.parametrize("ell", [2, 6, 7])
def test_budget_outside_domain(k4, ell):
    with pytest.raises(ParameterDomainError):
        sparsify(k4, ell)


def test_iteration_records(random_graph):
    g = random_graph(seed=21, vertices=10, edges=25)
    result = sparsify(g, 14)
    records = result.per_iteration
    assert [r.t for r in records] == list(range(14))
    assert [r.chosen for r in records] == list(result.selected_edges)
    for r in records:
        assert r.lam < r.lam_hat
        assert r.trace_at_lambda == pytest.approx(result.T, rel=1e-8)
        assert r.chosen_trace <= result.T * (1 + 1e-9)
    for before, after in zip(records, records[1:]):
        assert before.lam_hat <= after.lam + 1e-10


def test_runs_are_deterministic(random_graph):
    g = random_graph(seed=5, vertices=9, edges=20, weighted=True)
    first, second = sparsify(g, 12), sparsify(g, 12)
    assert first.selected_edges == second.selected_edges
    assert first.per_iteration == second.per_iteration


def test_threaded_scan_matches_sequential(random_graph):
    g = random_graph(seed=13, vertices=11, edges=40)
    assert sparsify(g, 15, threads=4).selected_edges == sparsify(g, 15).selected_edges


def test_best_fit_satisfies_bound(random_graph):
    g = random_graph(seed=17, vertices=8, edges=20, weighted=True)
    basis = basis_of(g)
    params = SelectionParams.for_instance(basis.n, basis.m, 10, TieRule.BEST_FIT)
    result = sparsify_basis(basis, 10, params)
    assert result.lambda_min_achieved > result.kappa_inv_bound


def test_custom_T_runs_without_guarantee(k4):
    params = SelectionParams(ell=5, T=2 * choose_T(3, 6, 5).T)
    result = sparsify(k4, 5, params)
    assert result.T == params.T
    assert len(result.selected_edges) == 5


def test_params_budget_must_match(k4):
    with pytest.raises(ParameterDomainError):
        sparsify(k4, 5, SelectionParams(ell=4, T=10.0))


def test_iteration_callback(k4):
    seen = []
    sparsify(k4, 4, on_iteration=seen.append)
    assert seen == [1, 2, 3, 4]


def _sweep_instances(count: int):
    rng = np.random.default_rng(2024)
    for _ in range(count):
        vertices = int(rng.integers(3, 12))
        max_edges = min(30, vertices * (vertices - 1) // 2)
        if max_edges < vertices + 1:
            continue
        edges = int(rng.integers(vertices + 1, max_edges + 1))
        yield random_connected_graph(rng, vertices, edges, weighted=bool(rng.integers(2)))


def _check_all_budgets(g):
    basis = basis_of(g)
    for ell in range(basis.n + 1, basis.m):
        for tie_rule in TieRule:
            params = SelectionParams.for_instance(basis.n, basis.m, ell, tie_rule)
            result = sparsify_basis(basis, ell, params)
            bound = kappa_lower_bound(basis.n, basis.m, ell)
            assert result.lambda_min_achieved > bound

            report = verify_sandwich(basis, result.selected_edges, bound)
            assert report.passed
            assert report.upper <= 1 + 1e-8
            assert report.lower >= bound - 1e-8

            records = result.per_iteration
            for r in records:
                assert r.lam < r.lam_hat
                assert abs(r.trace_at_lambda - result.T) <= 1e-8 * result.T
            for before, after in zip(records, records[1:]):
                assert before.lam_hat <= after.lam + 1e-10


def test_feasibility_on_random_graphs():
    for g in _sweep_instances(15):
        _check_all_budgets(g)


@pytest.mark.slow
def test_feasibility_sweep():
    for g in _sweep_instances(200):
        _check_all_budgets(g)
