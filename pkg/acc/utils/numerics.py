# acc/utils/numerics.py
"""
Dense real-matrix kernels shared by the rest of the package.

Everything here is a pure function of its inputs. Matrices are small
(N <= 8 in practice) so accuracy is preferred over speed.
"""
import logging
from typing import Callable, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from ..errors import BracketError, ConvergenceError, DimensionError, DomainError

logger = logging.getLogger(__name__)

# Default root-finding tolerance relative to the clock period.
SWITCHING_TOL_REL = 1e-12


def _as_square(a, name: str = "a") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{name} has non-finite entries")
    return m


def expm(a, t: float = 1.0) -> np.ndarray:
    """
    e^{a t} by scaling-and-squaring with a Pade kernel (scipy.linalg.expm).
    t may be zero or negative.
    """
    m = _as_square(a)
    if not np.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}")
    if t == 0.0:
        return np.eye(m.shape[0])
    return scipy.linalg.expm(m * t)


def expm_integral(a, t: float) -> np.ndarray:
    """
    Returns the integral of e^{a s} ds over [0, t].

    Computed from the exponential of the augmented block matrix
    [[a, I], [0, 0]] * t, so `a` does not need to be invertible.
    """
    m = _as_square(a)
    if not np.isfinite(t) or t < 0:
        raise DomainError(f"expm_integral needs a finite t >= 0, got {t!r}")
    n = m.shape[0]
    if t == 0.0:
        return np.zeros((n, n))
    aug = np.zeros((2 * n, 2 * n))
    aug[:n, :n] = m
    aug[:n, n:] = np.eye(n)
    return scipy.linalg.expm(aug * t)[:n, n:]


def affine_flow(a, b, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact flow of x' = a x + b over a duration t (any sign):

        x(t) = phi @ x(0) + g,   phi = e^{a t},   g = int_0^t e^{a s} ds @ b

    One exponential of the (N+1)x(N+1) augmented matrix gives both pieces.
    """
    m = _as_square(a)
    vec = np.asarray(b, dtype=float).reshape(-1)
    n = m.shape[0]
    if vec.shape[0] != n:
        raise DimensionError(f"b has length {vec.shape[0]}, expected {n}")
    if not np.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}")
    if t == 0.0:
        return np.eye(n), np.zeros(n)
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = m
    aug[:n, n] = vec
    full = scipy.linalg.expm(aug * t)
    return full[:n, :n], full[:n, n]


def eigenvalues(m) -> np.ndarray:
    """
    All eigenvalues of a real square matrix, with multiplicity, as a complex array.
    Uses LAPACK's dense nonsymmetric QR iteration.
    """
    mat = _as_square(m, "m")
    try:
        vals = scipy.linalg.eigvals(mat)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"eigenvalue iteration failed for matrix {mat.tolist()}: {e}")
    return np.asarray(vals, dtype=complex)


def solve_linear(a, b) -> np.ndarray:
    """LU solve of a x = b (a square, possibly complex)."""
    mat = np.asarray(a)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"a must be square, got shape {mat.shape}")
    lu, piv = scipy.linalg.lu_factor(mat)
    return scipy.linalg.lu_solve((lu, piv), b)


def find_root_scalar(
        f: Callable[[float], float],
        lo: float,
        hi: float,
        tol: float = 1e-12,
        max_iter: int = 200,
) -> float:
    """
    Bracketed root of a continuous scalar function (Brent's method, which
    falls back to bisection whenever interpolation misbehaves).
    """
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={f_lo!r}, f(hi)={f_hi!r}"
        )
    try:
        root, info = brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                            maxiter=max_iter, full_output=True)
    except RuntimeError as e:
        raise ConvergenceError(f"root finder did not converge on [{lo!r}, {hi!r}]: {e}")
    logger.debug("find_root_scalar: root=%r iterations=%s", root, info.iterations)
    return float(root)
