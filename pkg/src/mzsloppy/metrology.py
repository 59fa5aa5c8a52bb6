"""First-principles metrology for pure Gaussian models.

The information matrix and curvature are computed directly from the state
moments and their parameter derivatives:

    Q[j,k] = (1/4) Tr[(cov^-1 dcov_j)(cov^-1 dcov_k)]
             + 2 dmean_j^T cov^-1 dmean_k
    U[i,j] = (1/4) Tr[Om cov (Om dcov_i Om dcov_j - Om dcov_j Om dcov_i)]
             + 4 dmean_i^T cov^-1 Om cov^-1 dmean_j

Both formulas assume a pure model state and are gated on that. Linear
systems are solved directly rather than through explicit inverses.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .exceptions import SloppyModelError
from .gaussian import physicality_check, symplectic_form
from .model import ModelJet

# Q below this minimum eigenvalue is treated as singular for R / bounds
SINGULAR_Q_TOL = 1e-12

# default sloppiness threshold is relative to trace(Q); absolute floor for
# the degenerate zero-trace matrix (vacuum-like configs are legal downstream)
THRESHOLD_SCALE = 1e-8


def _require_pure(jet: ModelJet, op: str) -> None:
    label, _ = physicality_check(jet.state)
    if label != "pure":
        raise ValueError(f"{op} requires a pure model state, got {label}")


def qfi_matrix(jet: ModelJet) -> np.ndarray:
    """Quantum Fisher information matrix, 2x2 symmetric."""
    _require_pure(jet, "qfi_matrix")
    cov = jet.state.cov
    n = len(jet.dcov)
    A = [np.linalg.solve(cov, d) for d in jet.dcov]
    m = [np.linalg.solve(cov, d) for d in jet.dmean]
    Q = np.empty((n, n))
    # both terms are symmetric in (j, k); mirroring keeps that exact
    for j in range(n):
        for k in range(j, n):
            Q[j, k] = 0.25 * np.trace(A[j] @ A[k]) + 2.0 * jet.dmean[j] @ m[k]
            Q[k, j] = Q[j, k]
    return Q


def uhlmann_matrix(jet: ModelJet) -> np.ndarray:
    """Uhlmann curvature, 2x2 antisymmetric (enforced structurally)."""
    _require_pure(jet, "uhlmann_matrix")
    cov = jet.state.cov
    Om = symplectic_form(jet.state.modes)
    d1, d2 = jet.dcov
    comm = Om @ d1 @ Om @ d2 - Om @ d2 @ Om @ d1
    si_m2 = np.linalg.solve(cov, jet.dmean[1])
    si_m1 = np.linalg.solve(cov, jet.dmean[0])
    u = 0.25 * np.trace(Om @ cov @ comm) + 4.0 * si_m1 @ Om @ si_m2
    return np.array([[0.0, u], [-u, 0.0]])


def _require_invertible(Q: np.ndarray) -> None:
    if np.min(np.linalg.eigvalsh(Q)) <= SINGULAR_Q_TOL:
        raise SloppyModelError(
            "information matrix is singular: some parameter combination is "
            "unestimable, so quantumness and scalar bounds are undefined; "
            "reduce or recombine the parameters and retry"
        )


def quantumness_general(Q: np.ndarray, U: np.ndarray) -> float:
    """R as the largest eigenvalue modulus of Q^-1 U (any parameter count)."""
    _require_invertible(Q)
    ev = np.linalg.eigvals(np.linalg.solve(Q, U))
    return float(np.max(np.abs(ev)))


def quantumness_two_param(Q: np.ndarray, U: np.ndarray) -> float:
    """R = |U12| / sqrt(det Q), the two-parameter shortcut."""
    if Q.shape != (2, 2):
        raise ValueError("two-parameter form needs 2x2 matrices")
    _require_invertible(Q)
    return float(abs(U[0, 1]) / np.sqrt(np.linalg.det(Q)))


@dataclasses.dataclass(frozen=True)
class ScalarBounds:
    weight: np.ndarray
    repetitions: int
    c_q: float
    bracket_upper: float  # (1 + R) * c_q


def scalar_crb(
    Q: np.ndarray, U: np.ndarray, weight: np.ndarray, repetitions: int = 1
) -> ScalarBounds:
    """Scalar Cramer-Rao bound c_q = Tr[W Q^-1]/M and its (1+R) bracket."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    W = np.asarray(weight, dtype=float)
    if W.shape != Q.shape or np.max(np.abs(W - W.T)) > 1e-12 * max(1.0, np.max(np.abs(W))):
        raise ValueError("weight must be a symmetric matrix matching Q")
    if np.min(np.linalg.eigvalsh(W)) < -1e-9:
        raise ValueError("weight must be positive semidefinite")
    _require_invertible(Q)
    c_q = float(np.trace(np.linalg.solve(Q, W))) / repetitions
    r = quantumness_general(Q, U)
    return ScalarBounds(
        weight=W, repetitions=int(repetitions), c_q=c_q, bracket_upper=(1.0 + r) * c_q
    )


@dataclasses.dataclass(frozen=True)
class SloppinessReport:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # orthonormal columns, matching order
    determinant: float
    threshold: float
    sloppy: bool
    null_directions: tuple[np.ndarray, ...]  # eigenvectors below threshold


def default_threshold(Q: np.ndarray) -> float:
    tr = float(np.trace(Q))
    return THRESHOLD_SCALE * tr if tr > 0 else THRESHOLD_SCALE


def sloppiness_report(Q: np.ndarray, threshold: float | None = None) -> SloppinessReport:
    """Eigenstructure of Q with sloppy classification.

    A model is sloppy when the smallest eigenvalue falls below the
    threshold; the matching eigenvectors are reported as null directions.
    """
    Q = np.asarray(Q, dtype=float)
    if np.max(np.abs(Q - Q.T)) > 1e-10 * max(1.0, float(np.max(np.abs(Q)))):
        raise ValueError("sloppiness_report needs a symmetric matrix")
    if threshold is None:
        threshold = default_threshold(Q)
    elif threshold <= 0:
        raise ValueError("threshold must be positive")
    w, V = np.linalg.eigh(Q)
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    nulls = tuple(V[:, i].copy() for i in range(len(w)) if w[i] < threshold)
    return SloppinessReport(
        eigenvalues=w,
        eigenvectors=V,
        determinant=float(np.prod(w)),
        threshold=float(threshold),
        sloppy=bool(w[-1] < threshold),
        null_directions=nulls,
    )
