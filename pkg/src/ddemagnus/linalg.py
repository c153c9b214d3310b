"""Dense small-matrix kernels: Taylor matrix exponential, commutators, eigenvalues.

The exponential uses scaling and squaring around Taylor polynomials of
degree 1, 2, 4, 8, 12 or 18, picked from the 1-norm of the input; the
higher-degree polynomials are evaluated with the product-saving schemes
of Bader, Blanes and Casas (Mathematics 7:1174, 2019), which makes each
exponential noticeably cheaper than a Pade-based routine at the same
accuracy.
"""

from __future__ import annotations

import numpy as np


class NumericalFailure(RuntimeError):
    """An iterative kernel failed; carries whatever context is available.

    Attributes ``interval`` and ``step`` locate the failure inside a
    time integration (None elsewhere); ``partial`` holds a partial
    result when the failing routine can provide one.
    """

    def __init__(self, message, *, interval=None, step=None, partial=None):
        super().__init__(message)
        self.interval = interval
        self.step = step
        self.partial = partial


# Largest 1-norm for which a degree-m Taylor polynomial of exp reaches
# double-precision accuracy (Bader/Blanes/Casas 2019, double precision).
_TAYLOR_THETA = (
    (1, 2.220446049250313e-16),
    (2, 2.580956802971767e-08),
    (4, 3.397168839976962e-04),
    (8, 4.991228871115323e-02),
    (12, 2.996158913811580e-01),
    (18, 1.090863719290036e+00),
)


def _taylor_exp(A: np.ndarray, degree: int) -> np.ndarray:
    """Degree-adapted polynomial approximation of exp(A), ||A||_1 <= theta(degree)."""
    n = A.shape[0]
    eye = np.eye(n)
    if degree == 1:
        return eye + A
    A2 = A @ A
    if degree == 2:
        return eye + A + 0.5 * A2
    if degree == 4:
        return eye + A + A2 @ (0.5 * eye + A / 6.0 + A2 / 24.0)
    if degree == 8:
        sqrt177 = np.sqrt(177.0)
        x3 = 2.0 / 3.0
        a1 = (1.0 + sqrt177) * x3 / 88.0
        a2 = (1.0 + sqrt177) * x3 / 352.0
        u2 = (857.0 - 58.0 * sqrt177) / 630.0
        c0 = (-271.0 + 29.0 * sqrt177) / (315.0 * x3)
        c1 = 11.0 * (-1.0 + sqrt177) / (1260.0 * x3)
        c2 = 11.0 * (-9.0 + sqrt177) / (5040.0 * x3)
        c4 = -(-89.0 + sqrt177) / (5040.0 * x3 * x3)
        A4 = A2 @ (a1 * A + a2 * A2)
        A8 = (x3 * A2 + A4) @ (c0 * eye + c1 * A + c2 * A2 + c4 * A4)
        return eye + A + u2 * A2 + A8
    if degree == 12:
        b = np.array([
            [-1.86023205146205530824e-02, -5.00702322573317714499e-03,
             -5.73420122960522249400e-01, -1.33399693943892061476e-01],
            [4.6, 9.92875103538486847299e-01,
             -1.32445561052799642976e-01, 1.72990000000000000000e-03],
            [2.11693118299809440730e-01, 1.58224384715726723583e-01,
             1.65635169436727403003e-01, 1.07862779315792429308e-02],
            [0.0, -1.31810610138301836924e-01,
             -2.02785554058925905629e-02, -6.75951846863086323186e-03],
        ])
        A3 = A @ A2
        q = [b[i, 0] * eye + b[i, 1] * A + b[i, 2] * A2 + b[i, 3] * A3
             for i in range(4)]
        qaux = q[2] + q[3] @ q[3]
        return q[0] + (q[1] + qaux) @ qaux
    if degree == 18:
        b = np.array([
            [0.0, -1.00365581030144618291e-01, -8.02924648241156932449e-03,
             -8.92138498045729985177e-04, 0.0],
            [0.0, 3.97849749499645077844e-01, 1.36783778460411720168e+00,
             4.98289622525382669416e-01, -6.37898194594723280150e-04],
            [-1.09676396052962061844e+01, 1.68015813878906206114e+00,
             5.71779846478865511061e-02, -6.98210122488052056106e-03,
             3.34975017086070470649e-05],
            [-9.04316832390810593223e-02, -6.76404519071381882256e-02,
             6.75961301770459654925e-02, 2.95552570429315521194e-02,
             -1.39180257516060693404e-05],
            [0.0, 0.0, -9.23364619367118555360e-02,
             -1.69364939002081722752e-02, -1.40086798182036094347e-05],
        ])
        A3 = A @ A2
        A6 = A3 @ A3
        q = [b[i, 0] * eye + b[i, 1] * A + b[i, 2] * A2 + b[i, 3] * A3
             + b[i, 4] * A6 for i in range(5)]
        qaux = q[0] @ q[4] + q[3]
        return q[1] + (q[2] + qaux) @ qaux
    raise ValueError(f"unsupported Taylor degree {degree}")


def _validated_square(M, name: str) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} expects a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} expects finite entries")
    return A


def expm(M) -> np.ndarray:
    """Matrix exponential of a real square matrix.

    Scaling and squaring with a degree-adapted Taylor polynomial: the
    degree is the smallest of {1, 2, 4, 8, 12, 18} whose accuracy
    threshold covers ``||M||_1``, and the squaring count is
    max(0, ceil(log2(||M||_1 / theta_18))).
    """
    A = _validated_square(M, "expm")
    if A.shape[0] == 1:
        return np.exp(A)
    norm = np.abs(A).sum(axis=0).max()
    for degree, theta in _TAYLOR_THETA:
        if norm <= theta:
            return _taylor_exp(A, degree)
    s = max(0, int(np.ceil(np.log2(norm / _TAYLOR_THETA[-1][1]))))
    X = _taylor_exp(A / 2.0 ** s, 18)
    for _ in range(s):
        X = X @ X
    return X


def commutator(A, B) -> np.ndarray:
    """Matrix commutator A @ B - B @ A."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError(
            f"commutator needs square matrices of equal size, got {A.shape} and {B.shape}")
    return A @ B - B @ A


def sort_spectrum(values) -> np.ndarray:
    """Canonical ordering for eigenvalue output.

    Sorted by modulus descending; ties broken by real part descending,
    then imaginary part descending.  The comparisons are exact, so the
    ordering is bit-reproducible for identical inputs.
    """
    v = np.asarray(values, dtype=complex)
    order = np.lexsort((-v.imag, -v.real, -np.abs(v)))
    return v[order]


def eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a real square matrix, in the canonical sort order.

    Delegates to LAPACK's balanced Hessenberg-QR solver (via
    ``numpy.linalg.eigvals``), which is backward stable and returns every
    eigenvalue with its algebraic multiplicity; this routine only adds
    the deterministic ordering of :func:`sort_spectrum`.
    """
    A = _validated_square(M, "eigenvalues")
    try:
        vals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed to converge: {exc}",
                               partial=None) from exc
    return sort_spectrum(vals)
