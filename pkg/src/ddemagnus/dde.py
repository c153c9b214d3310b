"""Delay differential equations by spectral discretization plus Magnus stepping.

A problem with delay tau is turned into a d(N+1)-dimensional ODE: the
state vector stacks approximations to x(t + theta_j) at the shifted
Chebyshev nodes theta_j, the first d rows of the system matrix carry the
DDE coefficients and the remaining rows the scaled spectral
differentiation of the history window.  Integration proceeds in the
method-of-steps fashion, one delay interval [i*tau, (i+1)*tau] at a
time, so step boundaries always coincide with the breaking points where
the solution loses smoothness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .linalg import NumericalFailure, eigenvalues
from .magnus_linear import LINEAR_ORDERS, magnus_step, magnus_step_matrix
from .magnus_nonlinear import NONLINEAR_ORDERS, nonlinear_magnus_step
from .spectral import ChebyshevGrid, interpolate_window

# t_final within this fraction of tau of a breaking point snaps onto it,
# so truncated-decimal inputs like 6.2832 for 2*pi still produce whole
# delay intervals.
BREAKPOINT_SNAP = 1e-4


@dataclass
class LinearDDEProblem:
    """x'(t) = A(t) x(t) + B(t) x(t - tau), x = phi on [-tau, 0].

    ``A`` and ``B`` map a time to a (d, d) array, ``phi`` maps a time in
    [-tau, 0] to a length-d array (a scalar is fine for d = 1).  ``period``
    marks the problem as T-periodic for Floquet analysis; periodicity of
    the coefficients is the caller's assertion and is not checked.
    """

    d: int
    tau: float
    A: Callable[[float], np.ndarray]
    B: Callable[[float], np.ndarray]
    phi: Callable[[float], np.ndarray]
    period: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("state dimension d must be >= 1")
        if self.tau <= 0:
            raise ValueError("delay tau must be positive")
        if self.period is not None and self.period <= 0:
            raise ValueError("period must be positive when given")

    def describe(self) -> str:
        base = f"linear d={self.d} tau={self.tau!r}"
        return f"{base} [{self.label}]" if self.label else base


@dataclass
class QuasilinearDDEProblem:
    """x'(t) = A(x(t - tau)) x(t), x = phi on [-tau, 0].

    ``A`` maps the delayed state (length-d array) to a (d, d) array.
    The form is autonomous: the coefficients depend on time only through
    the delayed state.
    """

    d: int
    tau: float
    A: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[float], np.ndarray]
    label: str = ""

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("state dimension d must be >= 1")
        if self.tau <= 0:
            raise ValueError("delay tau must be positive")

    def describe(self) -> str:
        base = f"quasilinear d={self.d} tau={self.tau!r}"
        return f"{base} [{self.label}]" if self.label else base


DDEProblem = Union[LinearDDEProblem, QuasilinearDDEProblem]


def _coefficient(func, arg, d: int) -> np.ndarray:
    M = np.asarray(func(arg), dtype=float)
    if M.shape != (d, d):
        raise ValueError(f"coefficient evaluator returned shape {M.shape}, expected {(d, d)}")
    return M


def _lower_rows(grid: ChebyshevGrid, d: int) -> np.ndarray:
    """Rows d .. d(N+1)-1 of (2/tau) * (D kron I_d)."""
    return np.kron(grid.scaled_diff_matrix, np.eye(d))[d:, :]


def assemble_linear(problem: LinearDDEProblem, grid: ChebyshevGrid, t: float) -> np.ndarray:
    """System matrix of the discretized linear DDE at time t.

    First d rows: A(t) in the leading d x d block, B(t) in the trailing
    one, zeros between.  Remaining rows: the scaled spectral
    differentiation of the history window.
    """
    if grid.delay != problem.tau:
        raise ValueError("grid delay does not match the problem delay")
    d = problem.d
    n = d * (grid.N + 1)
    out = np.zeros((n, n))
    out[d:, :] = _lower_rows(grid, d)
    out[:d, :d] = _coefficient(problem.A, t, d)
    out[:d, n - d:] = _coefficient(problem.B, t, d)
    return out


def assemble_quasilinear(problem: QuasilinearDDEProblem, grid: ChebyshevGrid,
                         state: np.ndarray) -> np.ndarray:
    """System matrix of the discretized quasilinear DDE for the given big state.

    Only the last d components of the state (the fully delayed block)
    enter the coefficients; the trailing upper block is zero.
    """
    if grid.delay != problem.tau:
        raise ValueError("grid delay does not match the problem delay")
    state = np.asarray(state, dtype=float)
    d = problem.d
    n = d * (grid.N + 1)
    if state.shape != (n,):
        raise ValueError(f"state has shape {state.shape}, expected ({n},)")
    out = np.zeros((n, n))
    out[d:, :] = _lower_rows(grid, d)
    out[:d, :d] = _coefficient(problem.A, state[n - d:], d)
    return out


@dataclass
class DiscretizedSystem:
    """A DDE problem sampled on a Chebyshev grid, ready for time stepping."""

    problem: DDEProblem
    grid: ChebyshevGrid
    phi_vector: np.ndarray
    _base: np.ndarray = field(repr=False, default=None)

    @property
    def d(self) -> int:
        return self.problem.d

    @property
    def big_dim(self) -> int:
        return self.problem.d * (self.grid.N + 1)

    @property
    def is_linear(self) -> bool:
        return isinstance(self.problem, LinearDDEProblem)

    def matrix_at(self, t: float) -> np.ndarray:
        """Assembled system matrix at time t (linear problems)."""
        d, n = self.d, self.big_dim
        out = self._base.copy()
        out[:d, :d] = _coefficient(self.problem.A, t, d)
        out[:d, n - d:] = _coefficient(self.problem.B, t, d)
        return out

    def matrix_of_state(self, state: np.ndarray) -> np.ndarray:
        """Assembled system matrix for a big state vector (quasilinear problems)."""
        d, n = self.d, self.big_dim
        out = self._base.copy()
        out[:d, :d] = _coefficient(self.problem.A, np.asarray(state)[n - d:], d)
        return out

    def evaluator(self):
        return self.matrix_at if self.is_linear else self.matrix_of_state


def discretize(problem: DDEProblem, N: int) -> DiscretizedSystem:
    """Build the grid for the problem's delay and sample phi at the shifted nodes."""
    grid = ChebyshevGrid.build(N, problem.tau)
    d = problem.d
    blocks = []
    for theta in grid.nodes_shifted:
        value = np.asarray(problem.phi(theta), dtype=float).reshape(d)
        if not np.isfinite(value).all():
            raise ValueError(f"initial function returned a non-finite value at t = {theta}")
        blocks.append(value)
    base = np.zeros((d * (N + 1), d * (N + 1)))
    base[d:, :] = _lower_rows(grid, d)
    return DiscretizedSystem(problem=problem, grid=grid,
                             phi_vector=np.concatenate(blocks), _base=base)


def _plan_intervals(span: float, tau: float, M: int):
    """Split a time span into whole delay intervals plus a trailing partial one.

    Returns (full_count, partial_steps, partial_fraction); partial_steps
    is 0 when the span snaps onto a multiple of tau.
    """
    ratio = span / tau
    n_full = int(math.floor(ratio + BREAKPOINT_SNAP))
    frac = ratio - n_full
    if frac <= BREAKPOINT_SNAP:
        return n_full, 0, 0.0
    return n_full, int(math.ceil(M * frac)), frac


@dataclass
class Trajectory:
    """Solution of a discretized DDE, stored window by window.

    ``states[k]`` is the big state vector at ``times[k]``; its block j
    approximates x(times[k] + theta_j), so it covers the window
    [times[k] - tau, times[k]].  ``states[0]`` holds the sampled initial
    function.  Per-step states are kept in ``steps`` only when the solve
    was asked to store them.
    """

    grid: ChebyshevGrid
    d: int
    order: int
    M: int
    problem: str
    times: np.ndarray
    states: list
    steps: Optional[list] = None

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def endpoint_values(self, index: int = -1) -> np.ndarray:
        """x at times[index] (block 0 of the stored state)."""
        return self.states[index][:self.d]

    def node_times(self, index: int = -1) -> np.ndarray:
        """Abscissae of the window stored at ``index``, newest first."""
        return self.times[index] + self.grid.nodes_shifted

    def at(self, t: float) -> np.ndarray:
        """Interpolated solution value x(t) from the covering window."""
        k = int(np.searchsorted(self.times, t, side="left"))
        if k == len(self.times):
            k -= 1
        return interpolate_window(self.states[k], self.grid, float(self.times[k]), t)

    def mean_error(self, reference, index: int = -1, component: int = 0) -> float:
        """Mean absolute node error of the stored window against a reference.

        ``reference`` maps a time to the exact length-d value (or a
        scalar for d = 1); ``component`` picks the compared entry inside
        each block, e.g. 0 for the position of a second-order system.
        """
        return _window_mean_error(self.states[index], reference,
                                  float(self.times[index]), self.grid, component)


def _window_mean_error(values, reference, window_end, grid, component) -> float:
    blocks = np.asarray(values, dtype=float).reshape(grid.N + 1, -1)
    if not 0 <= component < blocks.shape[1]:
        raise ValueError(f"component {component} out of range for block size {blocks.shape[1]}")
    total = 0.0
    for theta, block in zip(grid.nodes_shifted, blocks):
        ref = np.atleast_1d(np.asarray(reference(window_end + theta), dtype=float))
        total += abs(ref[component] - block[component])
    return total / (grid.N + 1)


def mean_error(values, reference, interval_index: int, grid: ChebyshevGrid,
               component: int = 0) -> float:
    """Mean absolute per-node error of one stored window.

    ``values`` is the state whose window ends at interval_index * tau;
    the error is averaged over all N+1 nodes of the selected component.
    """
    return _window_mean_error(values, reference, interval_index * grid.delay,
                              grid, component)


def _admissible_orders(problem: DDEProblem):
    return LINEAR_ORDERS if isinstance(problem, LinearDDEProblem) else NONLINEAR_ORDERS


def _run_interval(evaluator, is_linear, state, t0, length, n_steps, order,
                  interval_index, step_store, structure_dim):
    h = length / n_steps
    for k in range(n_steps):
        if is_linear:
            state = magnus_step(evaluator, t0 + k * h, h, state, order)
        else:
            state = nonlinear_magnus_step(evaluator, h, state, order,
                                          structure_dim=structure_dim)
        if not np.isfinite(state).all():
            raise NumericalFailure(
                f"non-finite state in interval {interval_index}, step {k}",
                interval=interval_index, step=k, partial=state)
        if step_store is not None:
            step_store.append((t0 + (k + 1) * h, state.copy()))
    return state


def solve(problem: DDEProblem, N: int, M: int, order: int, t_final: float, *,
          store_steps: bool = False, t_start: float = 0.0,
          initial_state=None) -> Trajectory:
    """Integrate a DDE up to t_final with the method of steps.

    Each delay interval [i*tau, (i+1)*tau] is integrated with M Magnus
    steps of size tau/M (orders 2/4/6 for linear problems, 2/3 for
    quasilinear ones), chaining the final state of one interval into the
    next.  If t_final is not a multiple of tau, the trailing partial
    interval of fractional length ``frac`` is covered by ceil(M * frac)
    equal steps ending exactly at t_final.

    ``t_start``/``initial_state`` resume an integration from a stored
    window at a multiple of tau; by default the run starts at 0 from the
    sampled initial function.
    """
    orders = _admissible_orders(problem)
    if order not in orders:
        kind = "linear" if isinstance(problem, LinearDDEProblem) else "quasilinear"
        raise ValueError(f"order {order} invalid for {kind} problems; admissible: {orders}")
    if M < 1:
        raise ValueError("M (steps per delay interval) must be >= 1")
    system = discretize(problem, N)
    tau = problem.tau
    g0 = int(round(t_start / tau))
    if abs(t_start - g0 * tau) > 1e-9 * tau or g0 < 0:
        raise ValueError("t_start must be a nonnegative multiple of tau")
    if initial_state is None:
        if g0 != 0:
            raise ValueError("resuming at t_start > 0 requires initial_state")
        state = system.phi_vector.copy()
    else:
        state = np.asarray(initial_state, dtype=float).copy()
        if state.shape != (system.big_dim,):
            raise ValueError(f"initial_state must have shape ({system.big_dim},)")
    span = t_final - g0 * tau
    if span <= 0:
        raise ValueError("t_final must lie beyond t_start")

    n_full, m_part, frac = _plan_intervals(span, tau, M)
    if n_full == 0 and m_part == 0:
        raise ValueError("t_final is indistinguishable from t_start "
                         "(closer than the breaking-point snap tolerance)")
    evaluator = system.evaluator()
    is_linear = system.is_linear
    structure_dim = None if is_linear else problem.d

    times = [g0 * tau]
    states = [state.copy()]
    steps = [] if store_steps else None
    for i in range(n_full):
        g = g0 + i
        bucket = [] if store_steps else None
        state = _run_interval(evaluator, is_linear, state, g * tau, tau, M,
                              order, g, bucket, structure_dim)
        if store_steps:
            steps.append(bucket)
        times.append((g + 1) * tau)
        states.append(state.copy())
    if m_part:
        g = g0 + n_full
        bucket = [] if store_steps else None
        state = _run_interval(evaluator, is_linear, state, g * tau,
                              t_final - g * tau, m_part, order, g, bucket,
                              structure_dim)
        if store_steps:
            steps.append(bucket)
        times.append(t_final)
        states.append(state.copy())

    return Trajectory(grid=system.grid, d=problem.d, order=order, M=M,
                      problem=problem.describe(), times=np.asarray(times),
                      states=states, steps=steps)


@dataclass
class MonodromyResult:
    """Fundamental matrix over one period and its characteristic multipliers.

    ``multipliers`` holds all d(N+1) eigenvalues of the monodromy matrix
    in the canonical order (modulus descending, ties by real then
    imaginary part).
    """

    monodromy: np.ndarray
    multipliers: np.ndarray
    N: int
    M: int
    order: int

    @property
    def dominant(self) -> complex:
        return complex(self.multipliers[0])


def monodromy(problem: LinearDDEProblem, N: int, M: int, order: int) -> MonodromyResult:
    """Propagate Y' = A_N(t) Y, Y(0) = I over one period and take eigenvalues.

    All d(N+1) columns are advanced together with the matrix form of the
    Magnus step; interval boundaries align with multiples of tau (and
    with the period itself when it is not a multiple).
    """
    if not isinstance(problem, LinearDDEProblem):
        raise ValueError("monodromy analysis needs a linear problem")
    if problem.period is None:
        raise ValueError("problem has no period set")
    if order not in LINEAR_ORDERS:
        raise ValueError(f"order {order} invalid; admissible: {LINEAR_ORDERS}")
    if M < 1:
        raise ValueError("M (steps per delay interval) must be >= 1")
    system = discretize(problem, N)
    tau = problem.tau
    T = problem.period
    n_full, m_part, frac = _plan_intervals(T, tau, M)
    Y = np.eye(system.big_dim)
    evaluator = system.matrix_at

    def advance(Y, t0, length, n_steps, interval_index):
        h = length / n_steps
        for k in range(n_steps):
            Y = magnus_step_matrix(evaluator, t0 + k * h, h, Y, order)
            if not np.isfinite(Y).all():
                raise NumericalFailure(
                    f"non-finite fundamental matrix in interval {interval_index}, step {k}",
                    interval=interval_index, step=k, partial=Y)
        return Y

    for i in range(n_full):
        Y = advance(Y, i * tau, tau, M, i)
    if m_part:
        Y = advance(Y, n_full * tau, T - n_full * tau, m_part, n_full)
    return MonodromyResult(monodromy=Y, multipliers=eigenvalues(Y),
                           N=N, M=M, order=order)


def stability_verdict(result: MonodromyResult, tol: float = 0.0) -> str:
    """Classify a multiplier spectrum: 'stable', 'unstable' or 'marginal'.

    Stable iff every multiplier has modulus below 1 - tol, unstable iff
    the dominant one exceeds 1 + tol, marginal in between.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    dominant = float(np.abs(result.multipliers).max())
    if dominant < 1.0 - tol:
        return "stable"
    if dominant > 1.0 + tol:
        return "unstable"
    return "marginal"
