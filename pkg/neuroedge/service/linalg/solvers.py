import logging
import math

import numpy as np

from neuroedge.domain.errors import (
    DimensionMismatch,
    NoConvergence,
    NotStabilizable,
    SingularSystem,
)
from neuroedge.service.linalg.config import (
    CARE_GAIN_TOLERANCE,
    CARE_MAX_ITERATIONS,
    CARE_STAGNATION_TOLERANCE,
    LYAPUNOV_MAX_CONDITION,
    SYMMETRY_TOLERANCE,
)
from neuroedge.utils.vectors import as_matrix, require_square


logger = logging.getLogger(__name__)


def symmetrize(S: np.ndarray) -> np.ndarray:
    return 0.5 * (S + S.T)


def is_hurwitz(A: np.ndarray) -> bool:
    return bool(np.max(np.linalg.eigvals(A).real) < 0.0)


def lyapunov_solve(A, Q) -> np.ndarray:
    """Solve A^T S + S A + Q = 0 for symmetric S.

    The equation is linearised with Kronecker products over the row-major
    vectorisation of S and solved as one dense n^2 x n^2 system.

    Raises:
        DimensionMismatch: A or Q not square, sizes differ, or Q not symmetric.
        SingularSystem: A has eigenvalues summing to zero.
    """
    A = as_matrix(A, "A")
    Q = as_matrix(Q, "Q")
    n = require_square(A, "A")
    if Q.shape != (n, n):
        raise DimensionMismatch(f"Q has shape {Q.shape}, expected {(n, n)}")
    if np.max(np.abs(Q - Q.T), initial=0.0) > SYMMETRY_TOLERANCE * (1.0 + np.linalg.norm(Q)):
        raise DimensionMismatch("Q must be symmetric")

    eye = np.eye(n)
    L = np.kron(A.T, eye) + np.kron(eye, A.T)
    try:
        if np.linalg.cond(L) > LYAPUNOV_MAX_CONDITION:
            raise SingularSystem("Lyapunov operator is rank deficient")
        s = np.linalg.solve(L, -Q.reshape(-1))
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"Lyapunov operator is singular: {e}") from e

    S = symmetrize(s.reshape(n, n))
    if not np.all(np.isfinite(S)):
        raise SingularSystem("Lyapunov solution is not finite")
    return S


def _check_care_inputs(A, B, Q, R) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    Q = as_matrix(Q, "Q")
    R = as_matrix(R, "R")
    n = require_square(A, "A")
    m = require_square(R, "R")
    if B.shape != (n, m):
        raise DimensionMismatch(f"B has shape {B.shape}, expected {(n, m)}")
    if Q.shape != (n, n):
        raise DimensionMismatch(f"Q has shape {Q.shape}, expected {(n, n)}")
    try:
        np.linalg.cholesky(symmetrize(R))
    except np.linalg.LinAlgError as e:
        raise SingularSystem("R must be positive definite") from e
    return A, B, Q, R


def initial_stabilizing_gain(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Bass's method: shift A until it is anti-stable, then invert a controllability Gramian.

    Hurwitz A gets the zero gain.
    """
    n, m = B.shape
    if is_hurwitz(A):
        return np.zeros((m, n))

    # beta exceeds every |Re(eig(A))| since the spectral radius is bounded by the Frobenius norm
    beta = 1.0 + np.linalg.norm(A)
    shifted = A + beta * np.eye(n)
    # (A + beta I) X + X (A + beta I)^T = 2 B B^T
    X = lyapunov_solve(shifted.T, -2.0 * B @ B.T)
    try:
        K0 = np.linalg.solve(X, B).T
    except np.linalg.LinAlgError:
        K0 = (np.linalg.pinv(X) @ B).T

    if not np.all(np.isfinite(K0)) or not is_hurwitz(A - B @ K0):
        raise NotStabilizable("no stabilizing initial gain found for (A, B)")
    return K0


def kleinman_step(A, B, Q, R, K) -> tuple[np.ndarray, np.ndarray]:
    """One Newton step: evaluate the cost of gain K, return (S, improved gain)."""
    closed_loop = A - B @ K
    S = lyapunov_solve(closed_loop, symmetrize(Q + K.T @ R @ K))
    return S, np.linalg.solve(R, B.T @ S)


def care_solve(A, B, Q, R) -> np.ndarray:
    """Stabilizing solution of A^T S + S A - S B R^-1 B^T S + Q = 0 (Kleinman-Newton)."""
    A, B, Q, R = _check_care_inputs(A, B, Q, R)
    Q = symmetrize(Q)
    R = symmetrize(R)

    K = initial_stabilizing_gain(A, B)
    previous_change = math.inf
    for iteration in range(1, CARE_MAX_ITERATIONS + 1):
        S, K_next = kleinman_step(A, B, Q, R, K)
        change = float(np.linalg.norm(K_next - K))
        scale = 1.0 + float(np.linalg.norm(K_next))
        K = K_next
        logger.debug(f"Kleinman iteration {iteration}: gain change {change:.3e}")
        if change <= CARE_GAIN_TOLERANCE * scale:
            return S
        # round-off floor: the change stopped shrinking at a level already far below any physical gain
        if change >= previous_change and change <= CARE_STAGNATION_TOLERANCE * scale:
            logger.debug(f"Kleinman iteration stagnated at {change:.3e}, accepting")
            return S
        previous_change = change

    raise NoConvergence(f"Riccati iteration did not converge in {CARE_MAX_ITERATIONS} iterations")


def lqr_gain(A, B, Q, R) -> np.ndarray:
    """K = R^-1 B^T S for the stabilizing CARE solution S."""
    A, B, Q, R = _check_care_inputs(A, B, Q, R)
    S = care_solve(A, B, Q, R)
    K = np.linalg.solve(symmetrize(R), B.T @ S)
    if not is_hurwitz(A - B @ K):
        raise NotStabilizable("LQR closed loop is not Hurwitz")
    return K


def matrix_exponential(A, t: float) -> np.ndarray:
    """exp(A t) by scaling and squaring over a truncated Taylor series."""
    A = as_matrix(A, "A")
    n = require_square(A, "A")
    if not math.isfinite(t):
        raise DimensionMismatch("t must be finite")

    At = A * t
    norm = float(np.linalg.norm(At, 1))
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    scaled = At / (2.0 ** squarings)

    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 30):
        term = term @ scaled / k
        result = result + term
        if np.max(np.abs(term), initial=0.0) <= 1e-18 * np.max(np.abs(result)):
            break

    for _ in range(squarings):
        result = result @ result
    return result
