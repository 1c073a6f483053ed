"""Hermitian matrix primitives: positivity, Loewner order, roots and solves.

Every matrix is a dense complex ``numpy.ndarray``.  Functions here are pure
and never modify their arguments.
"""

import numpy as np
import scipy.linalg

from .errors import InputError, NotPSDError, PreconditionError

#: Relative tolerance on ``|a - a^*|`` accepted as rounding noise.
HERMITIAN_RTOL = 1e-12

#: Relative tolerance below zero still treated as a zero eigenvalue.
PSD_RTOL = 1e-12


def as_matrix(a, name="matrix"):
    """Return `a` as a finite 2-D complex array (a copy)."""
    arr = np.array(a, dtype=complex, ndmin=2)
    if arr.ndim != 2:
        raise InputError(f"{name}: expected a 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name}: empty matrix")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: non-finite entries")
    return arr


def hermitian(a, name="matrix"):
    """Validate that `a` is Hermitian up to rounding and symmetrize it.

    Raises
    ------
    InputError
        If `a` is not square, has non-finite entries, or deviates from its
        conjugate transpose by more than ``1e-12 * (1 + max|a_jk|)``.
    """
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise InputError(f"{name}: not square, shape {arr.shape}")
    dev = np.max(np.abs(arr - arr.conj().T))
    if dev > HERMITIAN_RTOL * (1.0 + np.max(np.abs(arr))):
        raise InputError(f"{name}: not Hermitian (deviation {dev:.3g})")
    return 0.5 * (arr + arr.conj().T)


def kron_identity(q, n):
    """Block diagonal ``diag(q, ..., q)`` with `n` copies, i.e. ``I_n (x) q``."""
    q = np.asarray(q, dtype=complex)
    r, c = q.shape
    out = np.zeros((n * r, n * c), dtype=complex)
    for k in range(n):
        out[k * r:(k + 1) * r, k * c:(k + 1) * c] = q
    return out


def fro(a):
    return float(np.linalg.norm(a, "fro")) if np.size(a) else 0.0


def min_eigenvalue(a):
    """Smallest eigenvalue of the Hermitian part of `a`.

    >>> float(round(min_eigenvalue([[5, 2], [2, 1]]), 6))
    0.171573
    """
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"min_eigenvalue: not square, shape {arr.shape}")
    if arr.size == 0:
        return np.inf
    if not np.all(np.isfinite(arr)):
        raise InputError("min_eigenvalue: non-finite entries")
    herm = 0.5 * (arr + arr.conj().T)
    return float(np.linalg.eigvalsh(herm)[0])


def is_strongly_positive(a, delta):
    """True iff the smallest eigenvalue of `a` exceeds `delta` (> 0)."""
    if not delta > 0:
        raise InputError(f"positivity margin must be > 0, got {delta}")
    return min_eigenvalue(a) > delta


def loewner_leq(a, b, tol=0.0):
    """Loewner comparison ``a <= b``, i.e. ``min_eig(b - a) >= -tol``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise InputError(f"loewner_leq: order mismatch {a.shape} vs {b.shape}")
    if tol < 0:
        raise InputError(f"loewner_leq: tol must be >= 0, got {tol}")
    return min_eigenvalue(b - a) >= -tol


def principal_sqrt(a):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-12 * scale, 0)`` are clamped to zero, where
    ``scale = max(1, spectral radius)``.

    Raises
    ------
    NotPSDError
        If an eigenvalue lies below the clamping window.
    """
    herm = hermitian(a)
    w, v = scipy.linalg.eigh(herm)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -PSD_RTOL * scale:
        raise NotPSDError(f"principal_sqrt: min eigenvalue {w[0]:.3g} < 0")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def solve_strongly_positive(a, b, delta):
    """Solve ``a x = b`` for strongly positive Hermitian `a` by Cholesky.

    Raises
    ------
    PreconditionError
        If ``min_eig(a) <= delta``; the offending eigenvalue is attached as
        ``min_eig``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] != b.shape[0]:
        raise InputError(f"solve: order {a.shape[0]} vs rhs rows {b.shape[0]}")
    lam = min_eigenvalue(a)
    if not lam > delta:
        raise PreconditionError(
            f"solve: matrix not strongly positive (min eigenvalue {lam:.6g}"
            f" <= {delta:.3g})", min_eig=lam)
    return cho_solve(a, b)


def cho_solve(a, b):
    """Cholesky solve without the positivity pre-check."""
    if a.size == 0:
        return np.zeros_like(b, dtype=complex)
    herm = 0.5 * (a + a.conj().T)
    factor = scipy.linalg.cho_factor(herm, lower=True, check_finite=False)
    return scipy.linalg.cho_solve(factor, b, check_finite=False)
