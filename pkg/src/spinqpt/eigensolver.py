"""Dense and Lanczos eigensolvers for real symmetric operators.

``dense_spectrum`` wraps LAPACK for small matrices and is the oracle
everything else is checked against.  ``lanczos_lowest_k`` is a Krylov
iteration with full reorthogonalization; degenerate levels are recovered
by restarting with deflation against everything already converged (a
single Krylov sequence carries one vector per distinct eigenvalue, so
multiplets need the restarts).

Both solvers fix eigenvector phase by making the largest-magnitude
amplitude positive, and both report explicit residuals |H v - E v|.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal


class ConvergenceError(RuntimeError):
    """Solver failed to converge; carries the best residual seen."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class EigenSolution:
    energies: np.ndarray       # ascending
    vectors: np.ndarray        # orthonormal columns, one per energy
    residuals: np.ndarray      # |H v - E v|_2 per state
    labels: list | None = None  # attached by callers that know the basis
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.energies)

    def ground(self) -> tuple[float, np.ndarray]:
        return float(self.energies[0]), self.vectors[:, 0]


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def dense_spectrum(matrix: np.ndarray, symmetry_tol: float = 1e-12) -> EigenSolution:
    """All eigenpairs of a real symmetric matrix, ascending."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.T)) > symmetry_tol * scale:
        raise ValueError("matrix is not symmetric")
    energies, vectors = np.linalg.eigh(matrix)
    vectors = _fix_phases(vectors)
    resid = np.linalg.norm(matrix @ vectors - vectors * energies, axis=0)
    return EigenSolution(energies, vectors, resid)


def lanczos_lowest_k(apply, dim: int, k: int, *, max_iter: int | None = None,
                     tol: float = 1e-10, seed: int = 0x5EED,
                     degeneracy_tol: float | None = None,
                     max_restarts: int | None = None,
                     check_every: int = 5) -> EigenSolution:
    """Lowest ``k`` eigenpairs of a symmetric operator given as a closure.

    ``apply`` maps a vector to H times that vector and must be linear and
    symmetric.  ``tol`` and ``degeneracy_tol`` are relative to the
    spectral width estimated from the Krylov process itself.  Runs are
    deterministic for a fixed seed: start vectors come from a seeded
    generator, one fresh draw per deflation restart.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if k > dim:
        raise ValueError(f"k={k} exceeds dimension {dim}")
    if max_iter is None:
        max_iter = min(dim, max(3 * k + 80, 320))
    if max_restarts is None:
        max_restarts = 3 * k + 12

    found_vals: list[float] = []
    found = np.empty((dim, 0))
    width = 1.0
    history: list[float] = []
    restarts = 0
    best_resid = np.inf

    def deflate(w):
        if found.shape[1]:
            w -= found @ (found.T @ w)
        return w

    def deg_tol():
        return degeneracy_tol if degeneracy_tol is not None else 1e-9 * max(1.0, width)

    certified = False
    while restarts <= max_restarts:
        if len(found_vals) >= dim:
            certified = True
            break
        if len(found_vals) >= k:
            if certified:
                break
            # a deflated restart whose smallest converged value clears the
            # current k-th level certifies the multiplet is complete
            want = 1
        else:
            want = k - len(found_vals)

        rng = np.random.RandomState((seed + 0x9E3779B9 * restarts) % (2 ** 32))
        q = deflate(rng.standard_normal(dim))
        norm = np.linalg.norm(q)
        if norm < 1e-12:
            restarts += 1
            continue

        steps = min(max_iter, dim - len(found_vals))
        q_mat = np.empty((dim, steps + 1))
        q_mat[:, 0] = q / norm
        alphas = np.empty(steps)
        betas = np.empty(steps)
        ritz = None
        m_used = 0
        for m in range(steps):
            w = apply(q_mat[:, m])
            alphas[m] = q_mat[:, m] @ w
            w -= alphas[m] * q_mat[:, m]
            if m > 0:
                w -= betas[m - 1] * q_mat[:, m - 1]
            # full reorthogonalization against the Krylov block and the
            # deflated converged states; twice is enough in floating point
            for _ in range(2):
                w = deflate(w)
                w -= q_mat[:, :m + 1] @ (q_mat[:, :m + 1].T @ w)
            beta = float(np.linalg.norm(w))
            betas[m] = beta
            m_used = m + 1
            exhausted = beta <= 1e-13 * max(1.0, width)
            if (m + 1) % check_every == 0 or m == steps - 1 or exhausted:
                theta, s_mat = eigh_tridiagonal(alphas[:m + 1], betas[:m])
                width = max(width, float(theta[-1] - theta[0]))
                if restarts == 0:
                    history.append(float(theta[0]))
                nwant = min(want, len(theta))
                bounds = beta * np.abs(s_mat[-1, :nwant])
                ritz = (theta, s_mat)
                if np.all(bounds <= 0.1 * tol * max(1.0, width)) or exhausted:
                    break
            if exhausted:
                break
            q_mat[:, m + 1] = w / beta

        if ritz is None:
            restarts += 1
            continue
        theta, s_mat = ritz
        abs_tol = tol * max(1.0, width)
        pass_min = None
        for col in range(min(want, len(theta))):
            vec = q_mat[:, :m_used] @ s_mat[:, col]
            vec = deflate(vec)
            nrm = np.linalg.norm(vec)
            if nrm < 1e-8:
                continue
            vec /= nrm
            resid = float(np.linalg.norm(apply(vec) - theta[col] * vec))
            best_resid = min(best_resid, resid)
            if resid > abs_tol:
                break  # extremal Ritz pairs converge first; later ones are worse
            found_vals.append(float(theta[col]))
            found = np.column_stack([found, vec])
            if pass_min is None:
                pass_min = float(theta[col])
        if pass_min is not None and len(found_vals) > k:
            kth = np.sort(found_vals)[k - 1]
            certified = pass_min > kth + deg_tol()
        restarts += 1

    if not certified and len(found_vals) >= k:
        raise ConvergenceError(
            "could not certify the multiplicity of the k-th level "
            f"within {max_restarts} deflation restarts", residuals=best_resid)
    if len(found_vals) < k:
        raise ConvergenceError(
            f"only {len(found_vals)} of {k} eigenpairs converged "
            f"(best residual {best_resid:.3e})", residuals=best_resid)

    order = np.argsort(found_vals)[:k]
    energies = np.array([found_vals[i] for i in order])
    vectors = _fix_phases(found[:, order])
    resid = np.array([np.linalg.norm(apply(vectors[:, c]) - energies[c] * vectors[:, c])
                      for c in range(k)])
    return EigenSolution(energies, vectors, resid,
                         meta={"restarts": restarts, "ritz_history": history,
                               "spectral_width": width})
