"""Measurement matrices, Born probabilities, and the scaled Fisher information.

For outcome operators Pi_j and basis operators B_k, the matrix C holds
C_{jk} = Tr(Pi_j B_k) over the traceless operators; C-tilde prepends the
column Tr(Pi_j)/sqrt(dim) for the identity component.  At a state with
outcome probabilities p the scaled Fisher matrix of the multinomial model is
F = C^T diag(p)^{-1} C, and Tr(F^{-1}) is the optimal (Cramer-Rao) scaled
mean squared Hilbert-Schmidt error of unbiased estimation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotInformationallyCompleteError,
    PomValidationError,
    ZeroProbabilityError,
)
from .operators import DensityMatrix, HermitianBasis, _as_matrix
from .pom import Pom

P_FLOOR = 1e-12
RANK_RTOL = 1e-10
EIG_RTOL = 1e-12


@dataclass(frozen=True)
class TomographyMatrices:
    """Measurement matrices C and C-tilde with their singular spectra.

    c_matrix is M x (dim**2 - 1) over the traceless basis operators; c_tilde
    is M x dim**2 with the identity column first; p_bar holds the outcome
    probabilities at the maximally mixed state.
    """

    dim: int
    c_matrix: np.ndarray
    c_tilde: np.ndarray
    p_bar: np.ndarray
    singular_values_c: np.ndarray  # descending
    singular_values_c_tilde: np.ndarray  # descending

    @property
    def n_outcomes(self) -> int:
        return self.c_matrix.shape[0]

    @property
    def kappa_c(self) -> float:
        low = self.singular_values_c[-1]
        return float(self.singular_values_c[0] / low) if low > 0 else float("inf")

    @property
    def kappa_c_tilde(self) -> float:
        low = self.singular_values_c_tilde[-1]
        return float(self.singular_values_c_tilde[0] / low) if low > 0 else float("inf")

    @property
    def is_informationally_complete(self) -> bool:
        s = self.singular_values_c
        return bool(s[0] > 0 and s[-1] > RANK_RTOL * s[0])


@dataclass(frozen=True)
class FisherMatrix:
    """Scaled Fisher matrix F = C^T diag(p)^{-1} C at a fixed state."""

    matrix: np.ndarray
    at_state: DensityMatrix | None = None
    pom_label: str = ""

    def __post_init__(self):
        mat = self.matrix
        if np.abs(mat - mat.T).max() > 1e-10:
            raise PomValidationError("Fisher matrix is not symmetric")
        if np.linalg.eigvalsh(mat)[0] < -1e-10:
            raise PomValidationError("Fisher matrix has a negative eigenvalue")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


@dataclass(frozen=True)
class FisherTraceBound:
    """Tr(F) at the maximally mixed state against its dimensional ceiling."""

    tr_fbar: float
    bound: float
    satisfied: bool


def measurement_matrices(pom: Pom, basis: HermitianBasis) -> TomographyMatrices:
    if pom.dim != basis.dim:
        raise DimensionMismatchError(f"pom dimension {pom.dim} != basis dimension {basis.dim}")
    raw = np.einsum("mij,kji->mk", pom.outcomes, basis.full_ops)
    if np.abs(raw.imag).max() > 1e-10:
        raise PomValidationError("measurement matrix has a non-real entry")
    c_tilde = raw.real
    c_matrix = c_tilde[:, 1:]
    p_bar = pom.traces / pom.dim
    if p_bar.min() <= 0:
        j = int(p_bar.argmin())
        raise PomValidationError(f"outcome {j} has non-positive trace")
    col_sums = np.abs(c_matrix.sum(axis=0)).max()
    if col_sums > 1e-10:
        raise PomValidationError(f"traceless column sums deviate from 0 by {col_sums:.2e}")
    return TomographyMatrices(
        dim=pom.dim,
        c_matrix=c_matrix,
        c_tilde=c_tilde,
        p_bar=p_bar,
        singular_values_c=np.linalg.svd(c_matrix, compute_uv=False),
        singular_values_c_tilde=np.linalg.svd(c_tilde, compute_uv=False),
    )


def probabilities(rho, pom: Pom) -> np.ndarray:
    """Born-rule outcome probabilities p_j = Tr(rho Pi_j)."""
    mat = _as_matrix(rho)
    if mat.shape[0] != pom.dim:
        raise DimensionMismatchError(f"state dimension {mat.shape[0]} != pom dimension {pom.dim}")
    probs = np.einsum("ij,mji->m", mat, pom.outcomes)
    if np.abs(probs.imag).max() > 1e-10:
        raise PomValidationError("Born probabilities have a non-real entry")
    return probs.real


def fisher_from_probabilities(matrices: TomographyMatrices, probs) -> np.ndarray:
    """F = C^T diag(p)^{-1} C for an explicit probability vector.

    This is also the evaluation mode behind the scaling law F(alpha * rho) =
    F(rho) / alpha: scaling the probability vector scales F inversely.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (matrices.n_outcomes,):
        raise DimensionMismatchError(
            f"expected {matrices.n_outcomes} probabilities, got shape {probs.shape}"
        )
    bad = np.nonzero(probs <= P_FLOOR)[0]
    if bad.size:
        j = int(bad[0])
        raise ZeroProbabilityError(
            f"outcome {j} has probability {probs[j]:.3e} at or below the floor {P_FLOOR}",
            index=j,
        )
    weighted = matrices.c_matrix / probs[:, None]
    fisher = matrices.c_matrix.T @ weighted
    return (fisher + fisher.T) / 2


def fisher_matrix(rho, pom: Pom, basis: HermitianBasis) -> FisherMatrix:
    matrices = measurement_matrices(pom, basis)
    probs = probabilities(rho, pom)
    return FisherMatrix(
        matrix=fisher_from_probabilities(matrices, probs),
        at_state=rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho),
        pom_label=pom.label,
    )


def trace_inverse(fisher: np.ndarray) -> float:
    """Tr(F^{-1}) through a symmetric eigendecomposition.

    Eigenvalues below 1e-12 of the largest are treated as rank deficiency
    rather than inverted into garbage.
    """
    evals = np.linalg.eigvalsh(fisher)
    top = evals[-1]
    if top <= 0 or evals[0] <= EIG_RTOL * top:
        raise NotInformationallyCompleteError(
            f"Fisher matrix is singular (eigenvalue range [{evals[0]:.3e}, {top:.3e}])"
        )
    return float(np.sum(1.0 / evals))


def accuracy(rho, pom: Pom, basis: HermitianBasis) -> float:
    """Optimal scaled estimation error Tr(F(rho)^{-1}) at a single state."""
    return trace_inverse(fisher_matrix(rho, pom, basis).matrix)


def accuracy_from_probabilities(matrices: TomographyMatrices, probs) -> float:
    return trace_inverse(fisher_from_probabilities(matrices, probs))


def fisher_trace_bound_check(pom: Pom, basis: HermitianBasis) -> FisherTraceBound:
    """Tr(F) at the maximally mixed state; bounded above by dim * (dim - 1)."""
    matrices = measurement_matrices(pom, basis)
    fbar = fisher_from_probabilities(matrices, matrices.p_bar)
    tr_fbar = float(np.trace(fbar))
    bound = float(pom.dim * (pom.dim - 1))
    return FisherTraceBound(tr_fbar=tr_fbar, bound=bound, satisfied=tr_fbar <= bound + 1e-9)
