"""Independent oracles used by the test suite.

Everything here is written against first principles rather than the library
internals: raw Haar moments come from qttf.haar_probability_moment (itself
exercised against explicit integrals in test_operators), centered moments
follow by inclusion-exclusion, and the series terms are contracted directly
from tensors, without the grouped closed forms used by the package.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from qttf import auxiliary_matrices, haar_probability_moment, measurement_matrices


def random_density(dim: int, rng) -> np.ndarray:
    """A full-rank density matrix from a Ginibre draw."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho += 0.05 * np.eye(dim)  # keep eigenvalues away from 0
    return rho / np.trace(rho).real


class MomentOracle:
    """Centered Haar moments E[prod (p_j - pbar_j)] up to fourth order.

    Raw moments are tabulated entrywise with haar_probability_moment; the
    centered tensors come from the inclusion-exclusion expansion.  Intended
    for small outcome counts (cost grows like M**4 moment evaluations).
    """

    def __init__(self, pom):
        self.pom = pom
        m = pom.n_outcomes
        self.p_bar = np.array([haar_probability_moment([j], pom) for j in range(m)])
        self.raw2 = np.array(
            [[haar_probability_moment([a, b], pom) for b in range(m)] for a in range(m)]
        )
        self.raw3 = np.zeros((m, m, m))
        for a, b, c in product(range(m), repeat=3):
            self.raw3[a, b, c] = haar_probability_moment([a, b, c], pom)
        self.raw4 = np.zeros((m, m, m, m))
        for a, b, c, d in product(range(m), repeat=4):
            self.raw4[a, b, c, d] = haar_probability_moment([a, b, c, d], pom)

    def centered2(self) -> np.ndarray:
        p = self.p_bar
        return self.raw2 - np.einsum("a,b->ab", p, p)

    def centered3(self) -> np.ndarray:
        p = self.p_bar
        out = self.raw3.copy()
        out -= np.einsum("a,bc->abc", p, self.raw2)
        out -= np.einsum("b,ac->abc", p, self.raw2)
        out -= np.einsum("c,ab->abc", p, self.raw2)
        out += 2 * np.einsum("a,b,c->abc", p, p, p)
        return out

    def centered4(self) -> np.ndarray:
        p = self.p_bar
        out = self.raw4.copy()
        out -= np.einsum("a,bcd->abcd", p, self.raw3)
        out -= np.einsum("b,acd->abcd", p, self.raw3)
        out -= np.einsum("c,abd->abcd", p, self.raw3)
        out -= np.einsum("d,abc->abcd", p, self.raw3)
        out += np.einsum("a,b,cd->abcd", p, p, self.raw2)
        out += np.einsum("a,c,bd->abcd", p, p, self.raw2)
        out += np.einsum("a,d,bc->abcd", p, p, self.raw2)
        out += np.einsum("b,c,ad->abcd", p, p, self.raw2)
        out += np.einsum("b,d,ac->abcd", p, p, self.raw2)
        out += np.einsum("c,d,ab->abcd", p, p, self.raw2)
        out -= 3 * np.einsum("a,b,c,d->abcd", p, p, p, p)
        return out


def oracle_series_terms(pom, basis) -> tuple[float, float, float]:
    """F2, F3, F4 contracted directly from centered-moment tensors.

    F_k = E[Tr(X d (Y d)^(k-1))] with d = diag(p - pbar); writing the trace
    out index by index gives plain tensor contractions against the centered
    moments, with no regrouping or Gram-tensor shortcuts.
    """
    oracle = MomentOracle(pom)
    aux = auxiliary_matrices(pom, basis)
    x, y = aux.x_matrix, aux.y_matrix
    f2 = float(np.einsum("ab,ba,ab->", x, y, oracle.centered2()))
    f3 = float(np.einsum("ab,bc,ca,abc->", x, y, y, oracle.centered3()))
    f4 = float(np.einsum("ab,bc,cd,da,abcd->", x, y, y, y, oracle.centered4()))
    return f2, f3, f4


def identity_rhs(pom, basis, probs: np.ndarray, alpha: float, max_order=None) -> float:
    """Right side of the scaled inverse-trace identity at one probability vector.

    (1/alpha) [Tr Fbar^{-1} + Tr(X Delta (1 - Y Delta)^{-1})] with
    Delta = alpha * diag(p) - diag(pbar).  With max_order=None the resolvent
    is evaluated exactly (the identity then reproduces Tr F(rho)^{-1} for any
    alpha); an integer truncates the expansion at that total power of Delta.
    """
    aux = auxiliary_matrices(pom, basis)
    x, y = aux.x_matrix, aux.y_matrix
    delta = alpha * probs - aux.p_bar
    xd = x * delta[None, :]  # X Delta
    yd = y * delta[None, :]  # Y Delta
    if max_order is None:
        resolvent = np.linalg.solve(np.eye(pom.n_outcomes) - yd, np.eye(pom.n_outcomes))
        correction = float(np.trace(xd @ resolvent))
    else:
        correction = 0.0
        term = xd
        for _ in range(max_order):
            correction += float(np.trace(term))
            term = term @ yd
    return (aux.tr_fbar_inv + correction) / alpha


def mc_truncated_identity(pom, basis, alpha, max_order, n_samples, rng):
    """Haar-average the truncated identity sample by sample.

    Returns (mean, stderr); the mean estimates the same quantity as
    qttf_series(pom, basis, alpha, max_order) but through the raw expansion
    rather than the analytic moment formulas.
    """
    dim = pom.dim
    values = np.empty(n_samples)
    for s in range(n_samples):
        vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        vec /= np.linalg.norm(vec)
        probs = np.einsum("i,mij,j->m", vec.conj(), pom.outcomes, vec).real
        values[s] = identity_rhs(pom, basis, probs, alpha, max_order)
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(n_samples))


def chain_fisher_trace_inverse(pom, basis, probs: np.ndarray) -> float:
    """Tr((C^T diag(p)^{-1} C)^{-1}) assembled without the library helpers."""
    c = measurement_matrices(pom, basis).c_matrix
    fisher = c.T @ np.diag(1.0 / probs) @ c
    return float(np.trace(np.linalg.inv(fisher)))


def mc_series_terms(pom, basis, n_samples: int, rng, chunk: int = 100_000):
    """Monte-Carlo means and stderrs of the order-2..4 series terms at alpha=1.

    Each Haar sample contributes Tr(X Delta (Y Delta)^{k-1}) with
    Delta = diag(p - pbar); the sample means estimate the analytic
    haar_moment_term values.  Contractions run in chunks of states so the
    intermediates stay small.
    """
    aux = auxiliary_matrices(pom, basis)
    x, y = aux.x_matrix, aux.y_matrix
    dim = pom.dim
    parts2, parts3, parts4 = [], [], []
    remaining = n_samples
    while remaining > 0:
        size = min(chunk, remaining)
        remaining -= size
        vecs = rng.normal(size=(size, dim)) + 1j * rng.normal(size=(size, dim))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        probs = np.einsum("si,mij,sj->sm", vecs.conj(), pom.outcomes, vecs).real
        d = probs - aux.p_bar
        parts2.append(np.einsum("ab,ba,sa,sb->s", x, y, d, d, optimize=True))
        parts3.append(np.einsum("ab,bc,ca,sa,sb,sc->s", x, y, y, d, d, d, optimize=True))
        parts4.append(
            np.einsum("ab,bc,cd,da,sa,sb,sc,sd->s", x, y, y, y, d, d, d, d, optimize=True)
        )
    out = []
    for parts in (parts2, parts3, parts4):
        values = np.concatenate(parts)
        out.append((float(values.mean()), float(values.std(ddof=1) / np.sqrt(n_samples))))
    return out
