"""The tomographic transfer function: closed forms, ordered series, Monte Carlo.

The transfer function of a measurement is the pure-state Haar average of
Tr(F(rho)^{-1}), a state-independent figure of merit (smaller is better).
Its evaluation routes:

* closed forms for minimally complete measurements (M = dim**2) and for
  measurements made of dim+1 rank-one bases (e.g. mutually unbiased bases),
* a moment series around the maximally mixed state, exact through fourth
  order in the probability fluctuations,
* plain Monte-Carlo averaging over Haar states.

The series rests on the identity (with Pbar the diagonal matrix of
maximally mixed probabilities, P the diagonal probability matrix at rho,
and alpha in (0, 1] a scale factor)

    Tr F(rho)^{-1} = (1/alpha) [ Tr Fbar^{-1} + Tr( X D (1 - Y D)^{-1} ) ],
    D = alpha P - Pbar,

with X = Pbar^{-1} C Fbar^{-2} C^T Pbar^{-1} and
Y = Pbar^{-1} C Fbar^{-1} C^T Pbar^{-1} - Pbar^{-1}.  Expanding, averaging
term by term, and using X Pbar Y = 0 and Y Pbar Y = -Y to absorb the Pbar
parts of D leaves one additive contribution per expansion order:

    order 0-1 : Tr Fbar^{-1}
    order 2   : alpha * F2
    order 3   : alpha**2 * (F3 - F2) + alpha * F2
    order 4   : alpha**3 * (F4 - 2 F3 + F2) + 2 alpha**2 * (F3 - F2) + alpha * F2

where F_k = E[Tr(X d (Y d)^{k-1})] with d = diag(p - pbar) is the pure
k-th central-moment contraction (series_term_f2/f3/f4 below).  Convergence
of the untruncated series is guaranteed for alpha < alpha0 =
1 / (||Y||_2 * max_j Tr Pi_j).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceededError,
    ConvergenceWarning,
    HeavyTailWarning,
    NotInformationallyCompleteError,
    NotMinimalBasesError,
    NotMinimallyCompleteError,
    PathologicalPomError,
    UnsupportedOrderError,
)
from .fisher import measurement_matrices
from .operators import HermitianBasis, build_basis, haar_state_vectors
from .pom import Pom

P_FLOOR = 1e-12
DEFAULT_MEMORY_BUDGET = 2**30  # bytes
STRUCTURE_TOL = 1e-8
KURTOSIS_FLAG = 100.0


@dataclass(frozen=True)
class QttfEstimate:
    """A transfer-function value with its method provenance."""

    value: float
    method: str  # "closed_minimal" | "closed_minimal_bases" | "series" | "monte_carlo"
    params: dict = field(default_factory=dict)
    std_error: float = 0.0

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"transfer-function value must be positive, got {self.value}")
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")


@dataclass(frozen=True)
class ReferenceValues:
    """Dimension-only reference points for the transfer function."""

    dim: int
    sic: float  # minimally complete symmetric measurement
    mub: float  # full set of mutually unbiased bases
    zeroth_bound: float  # lower bound on Tr Fbar^{-1}
    covariant: float  # many-outcome covariant limit
    limit_rel_error: float  # limiting relative error of the order-2 series

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "sic": self.sic,
            "mub": self.mub,
            "zeroth_bound": self.zeroth_bound,
            "covariant": self.covariant,
            "limit_rel_error": self.limit_rel_error,
        }


def reference_values(dim: int) -> ReferenceValues:
    d = float(dim)
    if dim < 2 or int(dim) != dim:
        raise ValueError(f"dimension must be an integer >= 2, got {dim!r}")
    return ReferenceValues(
        dim=int(dim),
        sic=d * d + d - 2,
        mub=d * d - 1,
        zeroth_bound=(d + 1) * (d * d - 1) / d,
        covariant=2 * (d - 1),
        limit_rel_error=d / (d + 2),
    )


@dataclass(frozen=True)
class AuxiliaryMatrices:
    """Expansion matrices around the maximally mixed state.

    x_matrix is PSD, y_matrix is negative semidefinite, and alpha0 is the
    guaranteed convergence radius of the moment series.
    """

    x_matrix: np.ndarray  # Pbar^{-1} C Fbar^{-2} C^T Pbar^{-1}
    y_matrix: np.ndarray  # Pbar^{-1} C Fbar^{-1} C^T Pbar^{-1} - Pbar^{-1}
    p_bar: np.ndarray
    tr_fbar_inv: float
    alpha0: float


def auxiliary_matrices(pom: Pom, basis: HermitianBasis) -> AuxiliaryMatrices:
    matrices = measurement_matrices(pom, basis)
    if not matrices.is_informationally_complete:
        raise NotInformationallyCompleteError(
            f"measurement matrix C is rank deficient "
            f"(s_min {matrices.singular_values_c[-1]:.3e}, "
            f"s_max {matrices.singular_values_c[0]:.3e})"
        )
    pbar = matrices.p_bar
    scaled = matrices.c_matrix / pbar[:, None]  # Pbar^{-1} C
    fbar = matrices.c_matrix.T @ scaled
    fbar = (fbar + fbar.T) / 2
    evals, evecs = np.linalg.eigh(fbar)
    if evals[0] <= 1e-12 * evals[-1]:
        raise NotInformationallyCompleteError("Fisher matrix at the mixed state is singular")
    inv1 = (evecs / evals) @ evecs.T
    inv2 = (evecs / evals**2) @ evecs.T
    x_matrix = scaled @ inv2 @ scaled.T
    y_matrix = scaled @ inv1 @ scaled.T - np.diag(1.0 / pbar)
    x_matrix = (x_matrix + x_matrix.T) / 2
    y_matrix = (y_matrix + y_matrix.T) / 2
    y_norm = float(np.abs(np.linalg.eigvalsh(y_matrix)).max())
    alpha0 = 1.0 / (y_norm * float(pom.traces.max()))
    return AuxiliaryMatrices(
        x_matrix=x_matrix,
        y_matrix=y_matrix,
        p_bar=pbar,
        tr_fbar_inv=float(np.sum(1.0 / evals)),
        alpha0=alpha0,
    )


@dataclass(frozen=True)
class GramTensors:
    """Cyclic overlap traces of outcome operators.

    g2[a, b] = Tr(Pi_a Pi_b) (real), g3[a, b, c] = Tr(Pi_a Pi_b Pi_c)
    (complex), g4[a, b, c, d] = Tr(Pi_a Pi_b Pi_c Pi_d) (complex); g4 is
    None when materializing M**4 entries would exceed the memory budget.
    """

    g2: np.ndarray
    g3: np.ndarray
    g4: np.ndarray | None


def _pair_products(outcomes: np.ndarray, memory_budget: int) -> np.ndarray:
    m, dim = outcomes.shape[0], outcomes.shape[1]
    need = 16 * m * m * dim * dim
    if need > memory_budget:
        raise BudgetExceededError(
            f"pair-product cache needs {need} bytes > budget {memory_budget}; "
            "use qttf_monte_carlo for this measurement"
        )
    return np.einsum("aij,bjk->abik", outcomes, outcomes)


def gram_tensors(pom: Pom, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> GramTensors:
    products = _pair_products(pom.outcomes, memory_budget)
    g2 = np.einsum("abii->ab", products).real
    g3 = np.einsum("abij,cji->abc", products, pom.outcomes)
    m = pom.n_outcomes
    g4 = None
    if 16 * m**4 <= memory_budget:
        g4 = np.einsum("abij,cdji->abcd", products, products)
    return GramTensors(g2=g2, g3=g3, g4=g4)


def haar_moment_term(
    pom: Pom,
    basis: HermitianBasis,
    order: int,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    aux: AuxiliaryMatrices | None = None,
) -> float:
    """Central-moment contraction F_k = E[Tr(X d (Y d)^{k-1})], k in {2, 3, 4}.

    Written out with the Haar probability moments and the matrix identities,

        F2 = (1 / (D(D+1))) s2
        F3 = (2 / (D(D+1)(D+2))) (s2 + s3)
        F4 = ((6-D) s2 + 12 s3 + s4) / (D(D+1)(D+2)(D+3))

    with D = dim, s2 = sum X_{ba} Y_{ab} G2_{ab}, s3 the X-Y-Y chain against
    Re G3, and s4 the X-Y-Y-Y cycle against the three inequivalent quartic
    orderings plus the three pair-pair Gram products.  The quartic piece is
    contracted from the materialized g4 tensor when it fits the budget and
    streamed through cached pair products otherwise.
    """
    if order not in (2, 3, 4):
        raise UnsupportedOrderError(f"moment term order must be 2, 3, or 4, got {order}")
    if aux is None:
        aux = auxiliary_matrices(pom, basis)
    x, y = aux.x_matrix, aux.y_matrix
    dim = pom.dim
    outcomes = pom.outcomes
    products = _pair_products(outcomes, memory_budget)
    g2 = np.einsum("abii->ab", products).real

    s2 = float(np.sum(x * y * g2))
    if order == 2:
        return s2 / (dim * (dim + 1))

    s3 = float(
        np.einsum("ca,ab,bc,abij,cji->", x, y, y, products, outcomes, optimize=True).real
    )
    if order == 3:
        return 2 * (s2 + s3) / (dim * (dim + 1) * (dim + 2))

    m = pom.n_outcomes
    if 16 * m**4 <= memory_budget:
        g4 = np.einsum("abij,cdji->abcd", products, products)
        orderings = g4 + g4.transpose(0, 1, 3, 2) + g4.transpose(0, 2, 1, 3)
        quartic = complex(np.einsum("da,ab,bc,cd,abcd->", x, y, y, y, orderings, optimize=True))
    else:
        quartic = complex(
            np.einsum("da,ab,bc,cd,abij,cdji->", x, y, y, y, products, products, optimize=True)
            + np.einsum("da,ab,bc,cd,abij,dcji->", x, y, y, y, products, products, optimize=True)
            + np.einsum("da,ab,bc,cd,acij,bdji->", x, y, y, y, products, products, optimize=True)
        )
    yg = y * g2
    xg = x * g2
    pairpair = float(
        np.einsum("da,ab,bc,cd->", x, yg, y, yg, optimize=True)
        + np.einsum("da,ab,bc,cd,ac,bd->", x, y, y, y, g2, g2, optimize=True)
        + np.einsum("da,ab,bc,cd->", xg, y, yg, y, optimize=True)
    )
    s4 = 2 * quartic.real + pairpair
    denom = dim * (dim + 1) * (dim + 2) * (dim + 3)
    return ((6 - dim) * s2 + 12 * s3 + s4) / denom


def series_term_f2(pom: Pom, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """Second-order moment term; equals 1/dim - 1 for minimally complete POMs."""
    return haar_moment_term(pom, build_basis(pom.dim), 2, memory_budget)


def series_term_f3(pom: Pom, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """Third-order moment term E[Tr(X d Y d Y d)]."""
    return haar_moment_term(pom, build_basis(pom.dim), 3, memory_budget)


def series_term_f4(pom: Pom, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """Fourth-order moment term E[Tr(X d (Y d)^3)]."""
    return haar_moment_term(pom, build_basis(pom.dim), 4, memory_budget)


def qttf_series(
    pom: Pom,
    basis: HermitianBasis,
    alpha: float = 1.0,
    max_order: int = 2,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> QttfEstimate:
    """Ordered series around the maximally mixed state, truncated at max_order.

    Orders 0 and 1 collapse to Tr(Fbar^{-1}); orders 2 through 4 add the
    alpha-weighted groupings documented in the module docstring.  The result
    for alpha < 1 is the alpha-deformed truncation; at alpha = 1 it is the
    plain truncated moment series.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not isinstance(max_order, (int, np.integer)) or not 0 <= max_order <= 4:
        raise UnsupportedOrderError(f"max_order must be an integer in [0, 4], got {max_order!r}")
    aux = auxiliary_matrices(pom, basis)
    if alpha >= aux.alpha0:
        warnings.warn(
            "series scale factor alpha is at or beyond the guaranteed convergence "
            "radius alpha0; the truncation remains a controlled approximation "
            "but the untruncated series may diverge",
            ConvergenceWarning,
            stacklevel=2,
        )
    contributions = [aux.tr_fbar_inv]
    if max_order >= 2:
        f2 = haar_moment_term(pom, basis, 2, memory_budget, aux)
        contributions.append(alpha * f2)
    if max_order >= 3:
        f3 = haar_moment_term(pom, basis, 3, memory_budget, aux)
        contributions.append(alpha**2 * (f3 - f2) + alpha * f2)
    if max_order >= 4:
        f4 = haar_moment_term(pom, basis, 4, memory_budget, aux)
        contributions.append(
            alpha**3 * (f4 - 2 * f3 + f2) + 2 * alpha**2 * (f3 - f2) + alpha * f2
        )
    return QttfEstimate(
        value=float(sum(contributions)),
        method="series",
        params={
            "order": int(max_order),
            "alpha": float(alpha),
            "alpha0": aux.alpha0,
            "contributions": [float(c) for c in contributions],
        },
    )


def qttf_closed_minimal(pom: Pom, basis: HermitianBasis) -> QttfEstimate:
    """Closed form Tr(Fbar^{-1}) - 1 + 1/dim for minimally complete measurements.

    Requires M = dim**2 informationally complete outcomes; for those the
    Y matrix is the all-(-1) matrix and the moment series terminates at
    second order, making the closed form exact.
    """
    dim = pom.dim
    if pom.n_outcomes != dim * dim:
        raise NotMinimallyCompleteError(
            f"minimally complete needs {dim * dim} outcomes, got {pom.n_outcomes}"
        )
    aux = auxiliary_matrices(pom, basis)
    deviation = float(np.abs(aux.y_matrix + 1.0).max())
    if deviation > STRUCTURE_TOL:
        raise NotMinimallyCompleteError(
            f"Y matrix deviates from the all-(-1) matrix by {deviation:.2e}"
        )
    return QttfEstimate(
        value=aux.tr_fbar_inv - 1.0 + 1.0 / dim,
        method="closed_minimal",
        params={"tr_fbar_inv": aux.tr_fbar_inv, "y_deviation": deviation},
    )


def qttf_closed_minimal_bases(pom: Pom, basis: HermitianBasis) -> QttfEstimate:
    """Closed form Tr[(C^T C)^{-1}] / (dim+1)**2 for dim+1 rank-one bases.

    Outcomes must come in dim+1 contiguous groups of dim rank-one operators,
    each group summing to identity/(dim+1); the Y matrix is then block
    diagonal with constant -(dim+1) blocks and the series again terminates.
    """
    dim = pom.dim
    n_bases = dim + 1
    if pom.n_outcomes != dim * n_bases:
        raise NotMinimalBasesError(
            f"expected {dim * n_bases} outcomes ({n_bases} bases of {dim}), got {pom.n_outcomes}"
        )
    grouped = pom.outcomes.reshape(n_bases, dim, dim, dim)
    group_dev = np.abs(grouped.sum(axis=1) - np.eye(dim) / n_bases).max()
    if group_dev > STRUCTURE_TOL:
        raise NotMinimalBasesError(
            f"outcome groups do not sum to identity/{n_bases} (deviation {group_dev:.2e})"
        )
    evals = np.linalg.eigvalsh(pom.outcomes)
    if evals[:, :-1].max() > STRUCTURE_TOL:
        raise NotMinimalBasesError("outcomes are not all rank one")
    aux = auxiliary_matrices(pom, basis)
    expected = np.kron(np.eye(n_bases), -(n_bases) * np.ones((dim, dim)))
    block_dev = float(np.abs(aux.y_matrix - expected).max())
    if block_dev > STRUCTURE_TOL:
        raise NotMinimalBasesError(
            f"Y matrix lacks the {n_bases}-block structure (deviation {block_dev:.2e})"
        )
    matrices = measurement_matrices(pom, basis)
    gram = matrices.c_matrix.T @ matrices.c_matrix
    evals = np.linalg.eigvalsh((gram + gram.T) / 2)
    value = float(np.sum(1.0 / evals)) / n_bases**2
    return QttfEstimate(
        value=value,
        method="closed_minimal_bases",
        params={"n_bases": n_bases, "y_block_deviation": block_dev},
    )


def qttf_monte_carlo(
    pom: Pom,
    basis: HermitianBasis,
    n_samples: int,
    rng=None,
    p_floor: float = P_FLOOR,
    batch_size: int = 20000,
) -> QttfEstimate:
    """Haar average of Tr(F(rho)^{-1}) over n_samples pure states.

    States with any outcome probability at or below p_floor are redrawn and
    the redraw rate is reported; a measurement rejecting more than half of
    all draws is refused as pathological.
    """
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    matrices = measurement_matrices(pom, basis)
    if not matrices.is_informationally_complete:
        raise NotInformationallyCompleteError(
            f"measurement matrix C is rank deficient "
            f"(s_min {matrices.singular_values_c[-1]:.3e}); Tr(F^{{-1}}) does not exist"
        )
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    c_matrix = matrices.c_matrix
    values = np.empty(n_samples)
    filled = 0
    drawn = 0
    rejected = 0
    while filled < n_samples:
        chunk = min(batch_size, max(n_samples - filled, 64))
        vectors = haar_state_vectors(pom.dim, chunk, rng)
        probs = np.einsum("si,mij,sj->sm", vectors.conj(), pom.outcomes, vectors).real
        keep = probs.min(axis=1) > p_floor
        drawn += chunk
        rejected += int(chunk - keep.sum())
        if drawn >= 100 and rejected > drawn / 2:
            raise PathologicalPomError(
                f"{rejected}/{drawn} Haar draws hit the probability floor {p_floor}"
            )
        if not keep.any():
            continue
        good = probs[keep]
        fishers = np.einsum("mk,sm,ml->skl", c_matrix, 1.0 / good, c_matrix)
        evals = np.linalg.eigvalsh(fishers)
        batch_vals = np.sum(1.0 / evals, axis=1)
        take = min(n_samples - filled, batch_vals.size)
        values[filled : filled + take] = batch_vals[:take]
        filled += take
    mean = float(values.mean())
    std_error = float(values.std(ddof=1) / np.sqrt(n_samples))
    centered = values - mean
    second = float(np.mean(centered**2))
    # Zero spread (up to roundoff) means a state-independent Tr(F^{-1});
    # the kurtosis diagnostic is meaningless there.
    if second > (1e-9 * max(abs(mean), 1.0)) ** 2:
        kurtosis = float(np.mean(centered**4) / second**2)
    else:
        kurtosis = 0.0
    if kurtosis > KURTOSIS_FLAG:
        warnings.warn(
            "Tr(F^{-1}) samples are heavy tailed; consider a larger n_samples",
            HeavyTailWarning,
            stacklevel=2,
        )
    return QttfEstimate(
        value=mean,
        method="monte_carlo",
        params={
            "n_samples": int(n_samples),
            "seed": seed if seed is None else int(seed),
            "redraw_rate": rejected / drawn if drawn else 0.0,
            "kurtosis": kurtosis,
        },
        std_error=std_error,
    )


def qttf_auto(
    pom: Pom,
    basis: HermitianBasis,
    n_samples: int = 10000,
    rng=None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> QttfEstimate:
    """Closed form when the structure allows it, otherwise order-2 series for
    moderately sized measurements (M <= 4 dim**2), otherwise Monte Carlo."""
    try:
        return qttf_closed_minimal(pom, basis)
    except NotMinimallyCompleteError:
        pass
    try:
        return qttf_closed_minimal_bases(pom, basis)
    except NotMinimalBasesError:
        pass
    if pom.n_outcomes <= 4 * pom.dim * pom.dim:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            return qttf_series(pom, basis, alpha=1.0, max_order=2, memory_budget=memory_budget)
    return qttf_monte_carlo(pom, basis, n_samples, rng)
