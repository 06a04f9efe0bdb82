"""
Dense symmetric eigenvalue and SVD kernels.

The orthonormal edge basis U_G comes from the thin SVD

    W^{1/2} B = U_G^T diag(sigma) V_G,

whose columns u_1..u_m (one per edge) satisfy sum_i u_i u_i^T = I_n with n = |V| - r.
Every downstream quantity (outer products, traces, eigenvalues) is invariant to the
sign of the singular vectors, so no sign convention is imposed.
"""

import logging
from typing import Iterable, NamedTuple, Optional

import numpy as np
import scipy.linalg

from .errors import DomainError, NonFiniteMatrixError, RankMismatchError
from .graph.model import ComponentLabeling, IncidenceSystem

logger = logging.getLogger(__name__)


class OrthonormalEdgeBasis(NamedTuple):
    U: np.ndarray       # n x m, column i belongs to edge i
    sigma: np.ndarray   # n positive singular values, descending
    Vt: np.ndarray      # n x |V|

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def m(self) -> int:
        return self.U.shape[1]

    def column(self, index: int) -> np.ndarray:
        return self.U[:, index]

    def leverages(self) -> np.ndarray:
        """Squared column norms ||u_i||^2 (weighted effective resistances)."""
        return np.einsum("ij,ij->j", self.U, self.U)

    def accumulate(self, selected: Iterable[int]) -> np.ndarray:
        """A_F = sum over i in F of u_i u_i^T."""
        columns = self.U[:, list(selected)]
        return columns @ columns.T


class EigenSpectrum(NamedTuple):
    values: np.ndarray  # descending

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def smallest(self) -> float:
        return float(self.values[-1])

    @property
    def largest(self) -> float:
        return float(self.values[0])


def default_rank_tol(m: int, vertex_count: int) -> float:
    return 1e-10 * max(m, vertex_count, 1)


def edge_orthonormal_basis(
    sys: IncidenceSystem, labeling: ComponentLabeling, rank_tol: Optional[float] = None
) -> OrthonormalEdgeBasis:
    """
    Computes U_G, Sigma_G and V_G from the thin SVD of W^{1/2} B.

    Exactly n = |V| - r singular values are kept. If the number of singular values
    above ``rank_tol * sigma_max`` differs from n the weights are too ill-conditioned
    for a dense basis and RankMismatchError is raised.
    """
    m, size = sys.edge_count, sys.vertex_count
    n = size - labeling.count
    tol = default_rank_tol(m, size) if rank_tol is None else rank_tol

    if m == 0 or n == 0:
        if m and n == 0:
            raise RankMismatchError(f"{m} edges on {size} vertices cannot have rank 0.")
        return OrthonormalEdgeBasis(U=np.zeros((0, m)), sigma=np.zeros(0), Vt=np.zeros((0, size)))

    left, sigma, Vt = scipy.linalg.svd(
        sys.weighted_incidence(), full_matrices=False, lapack_driver="gesdd"
    )
    rank = int(np.sum(sigma > tol * sigma[0]))
    if rank != n:
        raise RankMismatchError(
            f"Numerical rank {rank} of W^1/2 B differs from |V| - r = {n} "
            f"(tolerance {tol:.3g} relative to sigma_max = {sigma[0]:.6g})."
        )
    logger.debug(f"Edge basis: n={n}, m={m}, sigma range [{sigma[n - 1]:.6g}, {sigma[0]:.6g}]")
    return OrthonormalEdgeBasis(
        U=np.ascontiguousarray(left[:, :n].T), sigma=sigma[:n].copy(), Vt=Vt[:n].copy()
    )


def _symmetrized(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {A.shape}.")
    if not np.all(np.isfinite(A)):
        raise NonFiniteMatrixError("Matrix has non-finite entries.")
    return (A + A.T) / 2


def sym_eigvals(A: np.ndarray) -> EigenSpectrum:
    """Eigenvalues of (A + A^T)/2 in descending order."""
    S = _symmetrized(A)
    if S.size == 0:
        return EigenSpectrum(values=np.zeros(0))
    values = scipy.linalg.eigh(S, eigvals_only=True, check_finite=False)
    return EigenSpectrum(values=values[::-1].copy())


def sym_eigh(A: np.ndarray) -> tuple[EigenSpectrum, np.ndarray]:
    """Descending eigenvalues together with the matching orthonormal eigenvectors (columns)."""
    S = _symmetrized(A)
    if S.size == 0:
        return EigenSpectrum(values=np.zeros(0)), np.zeros((0, 0))
    values, vectors = scipy.linalg.eigh(S, check_finite=False)
    return EigenSpectrum(values=values[::-1].copy()), vectors[:, ::-1].copy()


def shifted_inverse_trace(spectrum: EigenSpectrum, shift: float) -> float:
    """tr (A - shift I)^{-1} = sum_j 1 / (lambda_j - shift), defined for shift < lambda_min."""
    if spectrum.size == 0:
        return 0.0
    if not shift < spectrum.smallest:
        raise DomainError(f"Shift {shift!r} is not below the smallest eigenvalue {spectrum.smallest!r}.")
    return float(np.sum(1.0 / (spectrum.values - shift)))


def generalized_extremes(basis: OrthonormalEdgeBasis, selected: Iterable[int]) -> tuple[float, float]:
    """
    (lambda_min, lambda_max) of A_F = sum_{i in F} u_i u_i^T.

    These are the extreme values of x^T L_H x / x^T L_G x over x outside the null space
    of L_G, where H keeps the edges F with their original weights.
    """
    selected = list(selected)
    if basis.n == 0 or not selected:
        return 0.0, 0.0
    spectrum = sym_eigvals(basis.accumulate(selected))
    return spectrum.smallest, spectrum.largest
