"""Kernel reduction for a rank-deficient coupling block ``A12``.

With ``q0 = A11^{1/2}`` and ``Q0 = I (x) q0`` the fixed-point map is
conjugated to the normalized map

    G(q^2) = I + U ((I (x) q^2) - D)^{-1} U^*,
    U = q0^{-1} A12 Q0^{-1},   D = Q0^{-1} A22 Q0^{-1},

whose fixed point relates to the original one by ``q_F^2 = q0 q_G^2 q0``.
On ``ker U^*`` the fixed point of ``G`` is the identity.  Splitting that
subspace off and eliminating it from the inner space by a block Schur step
leaves a map of the same shape on the complement, which is solved
recursively until its coupling block is zero or has trivial kernel.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import NormalizationError, ReductionBreakdown
from .hankel import GramBlocks
from .linalg import cho_solve, fro, kron_identity, min_eigenvalue, principal_sqrt
from .solver import (
    ConvergenceResult, IterateRecord, SolverConfig, Status, TheoremPath,
    check_bracketing, classify, fixed_point_map, limits, precondition_check,
    shifted, solve_rho_min,
)

#: Relative agreement required between the reduced map and the compressed
#: full map at a probe point.
REDUCTION_CHECK_RTOL = 1e-10


@dataclass(frozen=True)
class NormalizedMap:
    u: np.ndarray
    d_mat: np.ndarray
    q0: np.ndarray
    q0_inv: np.ndarray
    inner_order: int

    @property
    def block_dim(self):
        return self.q0.shape[0]


@dataclass(frozen=True)
class KernelSplit:
    """Orthonormal splitting ``C^m = (ker U^*)^perp (+) ker U^*``.

    ``u1`` and ``u2`` are ``U`` restricted to the complement on its output
    side and to the complement / kernel parts of each inner copy on its
    input side; ``d11``, ``d12``, ``d22`` are the matching blocks of ``D``.
    """

    d_ker: int
    basis_ker: np.ndarray
    basis_coker: np.ndarray
    singular_values: np.ndarray
    u1: np.ndarray = None
    u2: np.ndarray = None
    d11: np.ndarray = None
    d12: np.ndarray = None
    d22: np.ndarray = None

    @property
    def rotation(self):
        return np.hstack([self.basis_coker, self.basis_ker])


@dataclass(frozen=True)
class ReducedBlocks:
    a11_hat: np.ndarray
    a12_hat: np.ndarray
    a22_hat: np.ndarray
    d11: np.ndarray
    d12: np.ndarray
    d22: np.ndarray
    t_factor: np.ndarray

    @property
    def gram(self):
        return GramBlocks(self.a11_hat, self.a12_hat, self.a22_hat)


def normalize_to_g(g, cfg=SolverConfig()):
    """Conjugate the fixed-point map by ``q0 = A11^{1/2}``.

    Raises
    ------
    NormalizationError
        If ``A11`` is not strongly positive, or ``I - D`` is not (the
        latter is equivalent to a violated starting precondition).
    """
    lam = min_eigenvalue(g.a11)
    if not lam > cfg.margin(g):
        raise NormalizationError(
            f"A11 not strongly positive (min eigenvalue {lam:.6g})", min_eig=lam)
    q0 = principal_sqrt(g.a11)
    q0_inv = cho_solve(q0, np.eye(q0.shape[0]))
    q0_inv = 0.5 * (q0_inv + q0_inv.conj().T)
    big_inv = kron_identity(q0_inv, g.inner_order)
    u = q0_inv @ g.a12 @ big_inv
    d_mat = big_inv @ g.a22 @ big_inv
    d_mat = 0.5 * (d_mat + d_mat.conj().T)
    gap = min_eigenvalue(np.eye(d_mat.shape[0]) - d_mat)
    if not gap > 0:
        raise NormalizationError(f"D is not strictly below I (min eig of I - D {gap:.6g})",
                                 min_eig=gap)
    return NormalizedMap(u, d_mat, q0, q0_inv, g.inner_order)


def evaluate_g(nm, q_sq):
    """``G(q^2) = I + U ((I (x) q^2) - D)^{-1} U^*``."""
    m = nm.block_dim
    x = cho_solve(kron_identity(q_sq, nm.inner_order) - nm.d_mat, nm.u.conj().T)
    out = np.eye(m) + nm.u @ x
    return 0.5 * (out + out.conj().T)


def kernel_split(nm, rank_tol=1e-10):
    """Split off ``ker U^*`` using a relative singular value threshold."""
    if not rank_tol > 0:
        raise ValueError("rank_tol must be > 0")
    m = nm.block_dim
    w, s, _ = np.linalg.svd(nm.u, full_matrices=True)
    s = np.concatenate([s, np.zeros(m - s.size)])
    smax = s[0] if s.size else 0.0
    in_ker = s <= rank_tol * smax if smax > 0 else np.ones(m, dtype=bool)
    coker, ker = w[:, ~in_ker], w[:, in_ker]
    split = KernelSplit(int(in_ker.sum()), ker, coker, s)
    if 0 < split.d_ker < m:
        split = replace(split, **_regroup(nm, split))
    return split


def _regroup(nm, split):
    # inner copies rotated by the same splitting, complement parts first
    pc = kron_identity(split.basis_coker, nm.inner_order)
    pk = kron_identity(split.basis_ker, nm.inner_order)
    c = split.basis_coker.conj().T
    return dict(
        u1=c @ nm.u @ pc,
        u2=c @ nm.u @ pk,
        d11=pc.conj().T @ nm.d_mat @ pc,
        d12=pc.conj().T @ nm.d_mat @ pk,
        d22=pk.conj().T @ nm.d_mat @ pk,
    )


def reduce_map(nm, split):
    """Eliminate the kernel part and return the reduced map's blocks.

    Raises
    ------
    ReductionBreakdown
        If ``I - d22`` is not strongly positive, ``A11_hat`` is not above
        ``I``, or the reduced map fails to reproduce the compressed full map
        at the probe point ``A11_hat``.
    """
    m, d = nm.block_dim, split.d_ker
    if not 0 < d < m:
        raise ValueError(f"reduce_map needs 0 < d < m, got d={d}, m={m}")
    u1, u2, d11, d12, d22 = split.u1, split.u2, split.d11, split.d12, split.d22
    s = np.eye(d22.shape[0]) - d22
    lam = min_eigenvalue(s)
    if not lam > 0:
        raise ReductionBreakdown(f"I - d22 not strongly positive (min eig {lam:.6g})",
                                 min_eig=lam)
    s_u2 = cho_solve(s, u2.conj().T)
    s_d12 = cho_solve(s, d12.conj().T)
    a11_hat = np.eye(m - d) + u2 @ s_u2
    a12_hat = u1 + u2 @ s_d12
    a22_hat = d11 + d12 @ s_d12
    n1, n2 = d11.shape[0], d22.shape[0]
    t_factor = np.block([[np.eye(n1), np.zeros((n1, n2))], [s_d12, np.eye(n2)]])
    rb = ReducedBlocks(
        0.5 * (a11_hat + a11_hat.conj().T), a12_hat,
        0.5 * (a22_hat + a22_hat.conj().T), d11, d12, d22, t_factor)
    floor = min_eigenvalue(rb.a11_hat) - 1.0
    if floor < -REDUCTION_CHECK_RTOL:
        raise ReductionBreakdown(f"A11_hat not >= I (min eig of A11_hat - I {floor:.3g})")
    probe = rb.a11_hat
    lhs = evaluate_reduced(rb, probe)
    rhs = compressed_g(nm, split, probe)
    err = fro(lhs - rhs)
    if err > REDUCTION_CHECK_RTOL * (1.0 + fro(rhs)):
        raise ReductionBreakdown(f"reduced map disagrees with full map by {err:.3g}")
    return rb


def evaluate_reduced(rb, q11_sq):
    """``G1(q11^2) = A11_hat + A12_hat ((I (x) q11^2) - A22_hat)^{-1} A12_hat^*``."""
    return fixed_point_map(q11_sq, rb.gram)


def lift(split, q11_sq):
    """Embed a complement-block value as ``diag(q11^2, I_d)`` in the original basis."""
    p = split.rotation
    n1 = split.basis_coker.shape[1]
    full = np.eye(p.shape[0], dtype=complex)
    full[:n1, :n1] = q11_sq
    out = p @ full @ p.conj().T
    return 0.5 * (out + out.conj().T)


def compressed_g(nm, split, q11_sq):
    """Full ``G`` at the lifted argument, compressed to the complement."""
    c = split.basis_coker
    return c.conj().T @ evaluate_g(nm, lift(split, q11_sq)) @ c


def records_from_iterates(qs, g, cfg):
    """Rebuild trace records for an iterate sequence in ``g``'s coordinates."""
    records, prev = [], None
    for n, q in enumerate(qs):
        lam = min_eigenvalue(shifted(q, g)) if g.inner_order else np.inf
        step = float("nan") if prev is None else fro(q - prev)
        records.append(IterateRecord(n, q, lam, step, fro(fixed_point_map(q, g) - q)))
        prev = q
    return tuple(records)


def _converged_from(qs, g, cfg, kernel_dims):
    history = records_from_iterates(qs, g, cfg)
    lower, upper = limits(history)
    bad = check_bracketing(history, cfg.mono_tol * g.scale)
    return ConvergenceResult(
        Status.CONVERGED, TheoremPath.THEOREM25_REDUCTION, rho_sq_min=history[-1].q_sq,
        lower_limit=lower, upper_limit=upper, iterations=len(history) - 1,
        history=history, monotone=not bad, kernel_dims=tuple(kernel_dims),
        message="; ".join(bad[:3]))


def solve_with_reduction(g, cfg=SolverConfig()):
    """Solve for ``rho_min^2`` splitting off ``ker U^*`` where needed.

    Instances with zero or full-rank coupling go straight to
    :func:`solve_rho_min`.  Otherwise the returned history holds the reduced
    iterates lifted and back-transformed to `g`'s coordinates.  Lifting
    commutes with the maps, so this is itself an orbit of the original map
    (started at ``q0 diag(A11_hat, I) q0`` rather than at ``A11``) and
    replays against :func:`~nehari.solver.iterate_once` on `g`.
    """
    path = classify(g, cfg)
    if path is not TheoremPath.THEOREM25_REDUCTION or not precondition_check(g, cfg):
        return solve_rho_min(g, cfg)
    nm = normalize_to_g(g, cfg)
    split = kernel_split(nm, cfg.rank_tol)
    m = nm.block_dim
    if split.d_ker == 0:
        return replace(solve_rho_min(g, cfg), kernel_dims=(0,))
    if split.d_ker == m:
        # G is constant I, so q_F^2 = A11 from the first step on
        return _converged_from([np.array(g.a11)] * 2, g, cfg, (m,))
    rb = reduce_map(nm, split)
    # reduced level is normalized (A11_hat >= I), so its own scale sets delta
    inner = solve_with_reduction(rb.gram, replace(cfg, delta=None))
    if not inner.converged:
        return replace(inner, theorem_path=TheoremPath.THEOREM25_REDUCTION,
                       kernel_dims=(split.d_ker,) + inner.kernel_dims,
                       history=(), message=f"reduced problem: {inner.message}")
    qs = []
    for rec in inner.history:
        q_g = lift(split, rec.q_sq)
        q_f = nm.q0 @ q_g @ nm.q0
        qs.append(0.5 * (q_f + q_f.conj().T))
    return _converged_from(qs, g, cfg, (split.d_ker,) + inner.kernel_dims)
