"""One-step Magnus integrators of orders 2 and 3 for the quasilinear form y' = A(y) y.

Both schemes alternate evaluations of A along provisional exponential
updates, so a step costs a handful of matrix exponentials.  When the
state matrix has the delay-system block pattern (rows 0..d-1 zero
outside columns 0..d-1), every intermediate exponent inherits that
pattern; passing ``structure_dim=d`` turns on debug assertions for it
(removed under ``python -O``).
"""

from __future__ import annotations

import numpy as np

from .linalg import commutator, expm

NONLINEAR_ORDERS = (2, 3)


def structure_check(M, d: int) -> bool:
    """True iff rows 0..d-1 of the square matrix M vanish outside columns 0..d-1.

    This is the pattern of the spectrally discretized quasilinear
    operator, which matrix exponentials and the integrators below
    preserve exactly.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("structure_check expects a square matrix")
    if d < 1 or M.shape[0] % d != 0:
        raise ValueError(
            f"matrix dimension {M.shape[0]} is not a multiple of the block size {d}")
    return bool(np.all(M[:d, d:] == 0.0))


def _eval_state_matrix(A, y: np.ndarray) -> np.ndarray:
    M = np.asarray(A(y), dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("state-matrix evaluator must return a square matrix")
    return M


def nonlinear_magnus_step(A, h: float, y, order: int, *,
                          structure_dim: int | None = None) -> np.ndarray:
    """Advance y' = A(y) y one step of size h with the order-2 or order-3 scheme.

    Order 2 (trapezoidal correction of the frozen exponent):
        u = h A(y);  v = (u + h A(e^u y)) / 2;  y_next = e^v y.
    Order 3 adds two more corrector evaluations and one commutator.
    Local error is O(h^(order+1)).
    """
    if h <= 0:
        raise ValueError("step size h must be positive")
    y = np.asarray(y, dtype=float)

    def checked(M):
        if structure_dim is not None:
            assert structure_check(M, structure_dim), \
                "intermediate matrix lost the quasilinear block pattern"
        return M

    if order == 2:
        u = checked(h * _eval_state_matrix(A, y))
        v = checked(0.5 * (u + h * _eval_state_matrix(A, expm(u) @ y)))
        return expm(v) @ y
    if order == 3:
        q1 = checked(h * _eval_state_matrix(A, y))
        q2 = checked(h * _eval_state_matrix(A, expm(0.5 * q1) @ y) - q1)
        u1 = checked(0.5 * q1 + 0.25 * q2)
        u2 = checked(q1 + q2)
        q3 = checked(-u2 + h * _eval_state_matrix(A, expm(u1) @ y))
        q4 = checked(-u2 - q2 + h * _eval_state_matrix(A, expm(u2) @ y))
        u3 = checked(u2 + (2.0 / 3.0) * q3 + (1.0 / 6.0) * q4
                     - (1.0 / 6.0) * commutator(q1, q2))
        return expm(u3) @ y
    raise ValueError(f"order must be one of {NONLINEAR_ORDERS}, got {order}")
