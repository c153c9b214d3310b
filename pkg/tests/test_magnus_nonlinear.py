import numpy as np
import pytest

from ddemagnus import expm, nonlinear_magnus_step, structure_check


@pytest.mark.parametrize("order", [2, 3])
def test_state_independent_coefficients_are_exact(order):
    # A(y) = C constant collapses every stage to h*C
    rng = np.random.default_rng(order + 20)
    C = rng.standard_normal((3, 3)) * 0.4
    y0 = rng.standard_normal(3)
    got = nonlinear_magnus_step(lambda y: C, 0.25, y0, order)
    ref = expm(0.25 * C) @ y0
    assert np.abs(got - ref).max() <= 1e-13 * max(1.0, np.abs(ref).max())


def scalar_quadratic_decay(y):
    # y' = -y^2 in quasilinear form; exact solution 1/(1+t) from y(0)=1
    return np.array([[-y[0]]])


def test_order2_local_error_on_quadratic_decay():
    err_h = abs(nonlinear_magnus_step(scalar_quadratic_decay, 0.1,
                                      np.array([1.0]), 2)[0] - 1.0 / 1.1)
    err_h2 = abs(nonlinear_magnus_step(scalar_quadratic_decay, 0.05,
                                       np.array([1.0]), 2)[0] - 1.0 / 1.05)
    assert err_h <= 1e-3
    # one step has local error O(h^3): halving h divides it by ~8
    assert 5.5 <= err_h / err_h2 <= 10.5


def test_order3_local_error_on_quadratic_decay():
    err_h = abs(nonlinear_magnus_step(scalar_quadratic_decay, 0.1,
                                      np.array([1.0]), 3)[0] - 1.0 / 1.1)
    err_h2 = abs(nonlinear_magnus_step(scalar_quadratic_decay, 0.05,
                                       np.array([1.0]), 3)[0] - 1.0 / 1.05)
    # local error O(h^4): ratio ~16 up to an O(h) correction
    assert 11.0 <= err_h / err_h2 <= 20.0


def test_step_input_validation():
    A = lambda y: np.eye(2)
    with pytest.raises(ValueError):
        nonlinear_magnus_step(A, 0.0, np.zeros(2), 2)
    with pytest.raises(ValueError):
        nonlinear_magnus_step(A, 0.1, np.zeros(2), 4)


def _patterned(rng, d, n):
    M = rng.standard_normal((n, n))
    M[:d, d:] = 0.0
    return M


def test_structure_check_patterns():
    rng = np.random.default_rng(31)
    assert structure_check(_patterned(rng, 2, 8), 2)
    assert structure_check(np.zeros((6, 6)), 3)
    assert not structure_check(rng.standard_normal((8, 8)), 2)


def test_structure_check_validation():
    with pytest.raises(ValueError):
        structure_check(np.zeros((4, 5)), 2)
    with pytest.raises(ValueError):
        structure_check(np.zeros((5, 5)), 2)  # 5 not a multiple of 2
    with pytest.raises(ValueError):
        structure_check(np.zeros((4, 4)), 0)


@pytest.mark.parametrize("order", [2, 3])
def test_intermediates_keep_delay_pattern(order):
    # a state-dependent evaluator with the discretized-delay pattern:
    # the step's debug assertions (structure_dim) must stay silent
    rng = np.random.default_rng(order + 77)
    d, blocks = 2, 4
    n = d * blocks
    lower = rng.standard_normal((n - d, n))

    def A(y):
        M = np.zeros((n, n))
        M[:d, :d] = np.array([[0.0, 1.0], [-1.0 - 0.1 * y[-1] ** 2, 0.0]])
        M[d:, :] = lower
        return M

    y0 = rng.standard_normal(n) * 0.2
    out = nonlinear_magnus_step(A, 0.05, y0, order, structure_dim=d)
    assert np.isfinite(out).all()
