"""Feasibility of a deviation bound and independent reference values.

A bound ``rho`` is feasible for the coefficients when
``Gamma^* Gamma <= I (x) rho^2``.  Two routes decide it: the direct
eigenvalue test on the full Gram matrix, and the Schur-complement test
``rho^2 >= A11 + A12 ((I (x) rho^2) - A22)^{-1} A12^*``, which applies when
``(I (x) rho^2) - A22`` is strongly positive.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotApplicableError
from .hankel import CoefficientSequence, build_truncated_hankel, gram_blocks, gram_full, partition
from .linalg import (
    as_matrix, cho_solve, hermitian, is_strongly_positive, kron_identity, min_eigenvalue,
    principal_sqrt,
)
from .solver import SolverConfig, shifted

#: Margins with magnitude below ``BAND_RTOL * scale`` are flagged as boundary cases.
BAND_RTOL = 1e-8


class Method(str, enum.Enum):
    DIRECT = "Direct"
    SCHUR = "Schur"


@dataclass(frozen=True)
class DeviationBound:
    """Strongly positive ``m x m`` bound ``rho`` with ``rho^2`` cached."""

    rho: np.ndarray

    def __post_init__(self):
        rho = hermitian(self.rho, "rho")
        lam = min_eigenvalue(rho)
        if not lam > 0:
            raise InputError(f"rho must be strongly positive (min eigenvalue {lam:.6g})")
        rho_sq = rho @ rho
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "rho_sq", 0.5 * (rho_sq + rho_sq.conj().T))

    @property
    def block_dim(self):
        return self.rho.shape[0]

    @classmethod
    def from_square(cls, rho_sq):
        return cls(principal_sqrt(rho_sq))


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    margin: float
    method: Method
    boundary: bool = False
    tol: float = 0.0


def _verdict(margin, tol, method):
    return FeasibilityVerdict(margin >= -tol, margin, method, abs(margin) < tol, tol)


def _check_dims(coeffs, bound):
    if coeffs.block_dim != bound.block_dim:
        raise InputError(
            f"rho is {bound.block_dim}x{bound.block_dim} but blocks are"
            f" {coeffs.block_dim}x{coeffs.block_dim}")


def feasibility_direct(coeffs, bound, cfg=SolverConfig()):
    """Decide ``Gamma^* Gamma <= I (x) rho^2`` by one eigenvalue computation."""
    _check_dims(coeffs, bound)
    h = build_truncated_hankel(coeffs)
    g = gram_blocks(partition(h))
    margin = min_eigenvalue(kron_identity(bound.rho_sq, h.block_order) - gram_full(h))
    return _verdict(margin, BAND_RTOL * g.scale, Method.DIRECT)


def feasibility_schur(g, bound, cfg=SolverConfig()):
    """Decide feasibility through the Schur complement on the first block.

    Raises
    ------
    NotApplicableError
        If ``(I (x) rho^2) - A22`` is not strongly positive; use
        :func:`feasibility_direct` instead.
    """
    if g.block_dim != bound.block_dim:
        raise InputError(f"rho is {bound.block_dim}x{bound.block_dim}, blocks are m={g.block_dim}")
    rho_sq = bound.rho_sq
    if g.inner_order:
        inner = shifted(rho_sq, g)
        if not is_strongly_positive(inner, cfg.margin(g)):
            raise NotApplicableError("(I (x) rho^2) - A22 is not strongly positive")
        rhs = g.a11 + g.a12 @ cho_solve(inner, g.a12.conj().T)
    else:
        rhs = np.array(g.a11)
    margin = min_eigenvalue(rho_sq - rhs)
    return _verdict(margin, BAND_RTOL * g.scale, Method.SCHUR)


def normalize_coefficients(coeffs, bound):
    """Right-multiply every coefficient by ``rho^{-1}``.

    ``(coeffs, rho)`` is feasible exactly when ``(normalized, I)`` is.
    """
    _check_dims(coeffs, bound)
    inv = cho_solve(bound.rho, np.eye(bound.block_dim))
    return CoefficientSequence(tuple(c @ inv for c in coeffs.coefficients))


def scalar_aak_oracle(coeffs):
    """Squared spectral norm of the scalar Hankel matrix at ``N = K``.

    Computed from the singular values of ``Gamma`` itself, independently
    of the Gram blocks and of the fixed-point iteration.
    """
    if coeffs.block_dim != 1:
        raise NotApplicableError("the scalar oracle needs m = 1")
    h = build_truncated_hankel(coeffs, coeffs.support)
    sigma = np.linalg.svd(as_matrix(h.matrix), compute_uv=False)
    return float(sigma[0] ** 2)
