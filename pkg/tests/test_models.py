import numpy as np
import pytest

from ddemagnus import (MATHIEU_CRITICAL_B, MATHIEU_REFERENCE_MULTIPLIER,
                       builtin_problem, example2_delayed_mathieu,
                       example4_delayed_sir)


def test_example1_coefficients_at_zero():
    bench = builtin_problem("example1")
    assert bench.problem.A(0.0)[0, 0] == pytest.approx(1.0)
    assert bench.problem.B(0.0)[0, 0] == pytest.approx(-np.e)
    assert bench.exact(0.0)[0] == pytest.approx(1.0)
    assert bench.reference_multiplier == 1.0 + 0.0j


def test_example1_exact_solution_satisfies_equation():
    # x(t) = exp(sin t) cos t, so x'(t) = exp(sin t)(cos^2 t - sin t)
    bench = builtin_problem("example1")
    prob = bench.problem
    rng = np.random.default_rng(1)
    for t in rng.uniform(0.0, 20.0, 100):
        x = bench.exact(t)[0]
        x_delayed = bench.exact(t - prob.tau)[0]
        x_dot = np.exp(np.sin(t)) * (np.cos(t) ** 2 - np.sin(t))
        residual = x_dot - prob.A(t)[0, 0] * x - prob.B(t)[0, 0] * x_delayed
        assert abs(residual) <= 1e-12 * max(1.0, abs(x_dot))


def test_mathieu_matrices_and_references():
    bench = builtin_problem("mathieu")
    prob = bench.problem
    assert prob.d == 2 and prob.tau == prob.period == 2 * np.pi
    np.testing.assert_allclose(prob.A(0.0), [[0.0, 1.0], [-2.0, 0.0]])
    np.testing.assert_allclose(prob.A(np.pi), [[0.0, 1.0], [-1.0, 0.0]])
    # the delayed position drives the velocity equation
    np.testing.assert_allclose(prob.B(0.3), [[0.0, 0.0], [-0.2, 0.0]])
    assert bench.reference_multiplier == MATHIEU_REFERENCE_MULTIPLIER

    decoupled = example2_delayed_mathieu(b=0.0)
    assert np.all(decoupled.problem.B(1.0) == 0.0)
    assert decoupled.reference_multiplier is None

    critical = example2_delayed_mathieu(delta=2.0, epsilon=1.0,
                                        b=MATHIEU_CRITICAL_B)
    assert critical.reference_multiplier == 1.0 + 0.0j


def test_nonlinear_scalar_coefficient_and_exact_solution():
    bench = builtin_problem("nonlinear-scalar")
    assert bench.problem.A(np.array([1.0]))[0, 0] == 0.0
    with pytest.raises(ValueError):
        bench.problem.A(np.array([0.0]))
    # periodicity of the exact orbit
    for t in (0.3, 2.0, 5.5):
        assert bench.exact(t + 2 * np.pi)[0] == pytest.approx(bench.exact(t)[0],
                                                              rel=1e-12)


def test_nonlinear_scalar_exact_solution_satisfies_equation():
    # z(t) = exp(sin t): z'(t) = cos(t) z(t) and -log z(t - pi/2) = cos t
    bench = builtin_problem("nonlinear-scalar")
    prob = bench.problem
    rng = np.random.default_rng(2)
    for t in rng.uniform(0.0, 20.0, 100):
        z = bench.exact(t)[0]
        z_delayed = bench.exact(t - prob.tau)
        z_dot = np.cos(t) * np.exp(np.sin(t))
        residual = z_dot - prob.A(z_delayed)[0, 0] * z
        assert abs(residual) <= 1e-12 * max(1.0, abs(z_dot))


def test_sir_coefficient_is_graph_laplacian():
    bench = builtin_problem("sir")
    rng = np.random.default_rng(3)
    for _ in range(25):
        state = rng.uniform(0.0, 2.0, 3)
        A = bench.problem.A(state)
        np.testing.assert_array_equal(A.sum(axis=0), np.zeros(3))
        off_diagonal = A[~np.eye(3, dtype=bool)]
        assert np.all(off_diagonal >= 0.0)
        assert np.all(np.diag(A) <= 0.0)


def test_sir_zero_infection_leaves_recovery_only():
    bench = builtin_problem("sir")
    A = bench.problem.A(np.array([0.7, 0.0, 0.3]))
    np.testing.assert_array_equal(A, [[0.0, 0.0, 0.0],
                                      [0.0, -1.0, 0.0],
                                      [0.0, 1.0, 0.0]])


def test_sir_histories_and_scaling():
    bench = builtin_problem("sir")
    np.testing.assert_allclose(bench.problem.phi(-1.0), [0.7, 0.7, 0.1])
    assert bench.conserved_total == pytest.approx(1.0)

    rising = example4_delayed_sir(history="increasing")
    np.testing.assert_allclose(rising.problem.phi(-1.0), [0.7, -0.3, 0.1])

    scaled = example4_delayed_sir(alpha=1.0, beta=2.0, gamma=0.5)
    A = scaled.problem.A(np.array([0.0, 0.2, 0.0]))
    q = 2.0 * 0.2 / 1.2
    np.testing.assert_allclose(A[:, 0], [-q, q, 0.0], rtol=1e-14)
    assert A[1, 1] == -0.5


def test_sir_parameter_validation():
    with pytest.raises(ValueError):
        example4_delayed_sir(beta=0.0)
    with pytest.raises(ValueError):
        example4_delayed_sir(history="sideways")
    with pytest.warns(UserWarning):
        example4_delayed_sir(alpha=0.5)


def test_registry_names_and_aliases():
    for name in ("example1", "mathieu", "nonlinear-scalar", "sir"):
        assert builtin_problem(name).name == name
    assert builtin_problem("example2").name == "mathieu"
    assert builtin_problem("example3").name == "nonlinear-scalar"
    assert builtin_problem("example4").name == "sir"
    with pytest.raises(KeyError):
        builtin_problem("unknown-problem")
    tweaked = builtin_problem("mathieu", delta=2.0, epsilon=1.0, b=0.1)
    assert tweaked.reference_multiplier is None


def test_benchmarks_carry_provenance():
    for name in ("example1", "mathieu", "nonlinear-scalar", "sir"):
        bench = builtin_problem(name)
        if bench.reference_multiplier is not None or bench.exact is not None \
                or bench.conserved_total is not None:
            assert bench.provenance
