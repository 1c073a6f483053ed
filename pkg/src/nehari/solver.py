"""Successive approximation for the minimal deviation bound ``rho_min^2``.

The fixed-point map is

    F(q^2) = A11 + A12 ((I (x) q^2) - A22)^{-1} A12^*

started from ``q_0^2 = A11``.  Because ``F`` is Loewner-decreasing in its
argument, even iterates increase and odd iterates decrease; both
subsequences are recorded so that the bracketing can be audited.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import IterationBreakdown, StateError
from .hankel import gram_full
from .linalg import cho_solve, fro, is_strongly_positive, kron_identity, min_eigenvalue


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    GAP_POSITIVE = "GapPositive"
    PRECONDITION_FAILED = "PreconditionFailed"
    MAX_ITERATIONS = "MaxIterations"


class TheoremPath(str, enum.Enum):
    THEOREM24 = "Theorem24"
    THEOREM25_REDUCTION = "Theorem25Reduction"
    TRIVIAL_A12_ZERO = "TrivialA12Zero"


#: ``||A12||_F`` at or below this multiple of the scale counts as zero.
ZERO_COUPLING_RTOL = 1e-14


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs.  ``delta=None`` means ``1e-9 * scale`` of the instance."""

    delta: float = None
    fix_tol: float = 1e-12
    step_tol: float = 1e-12
    max_iter: int = 10_000
    mono_tol: float = 1e-10
    rank_tol: float = 1e-10

    def __post_init__(self):
        for name in ("fix_tol", "step_tol", "mono_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def margin(self, g):
        return self.delta if self.delta is not None else 1e-9 * g.scale


@dataclass(frozen=True)
class IterateRecord:
    n: int
    q_sq: np.ndarray
    min_eig_shifted: float  # min eigenvalue of (I (x) q_n^2) - A22
    step_norm: float        # ||q_n^2 - q_{n-1}^2||_F, NaN for n = 0
    residual: float         # ||F(q_n^2) - q_n^2||_F

    @property
    def parity(self):
        return "even" if self.n % 2 == 0 else "odd"


@dataclass(frozen=True)
class ConvergenceResult:
    status: Status
    theorem_path: TheoremPath
    rho_sq_min: np.ndarray = None
    lower_limit: np.ndarray = None
    upper_limit: np.ndarray = None
    iterations: int = 0
    history: tuple = ()
    monotone: bool = None
    kernel_dims: tuple = ()
    message: str = ""

    @property
    def converged(self):
        return self.status is Status.CONVERGED


@dataclass(frozen=True)
class Certificate:
    fixed_point_residual: float
    feasibility_margin: float
    singularity_witness: float
    strongly_positive: bool
    scale: float = 1.0
    mono_tol: float = 1e-10

    @property
    def valid(self):
        """Feasible and singular within tolerance, i.e. a minimal bound."""
        return (self.feasibility_margin >= -self.mono_tol * self.scale
                and self.singularity_witness <= 1e-6 * self.scale
                and self.strongly_positive)


def shifted(q_sq, g):
    """``(I_{N-1} (x) q^2) - A22``."""
    return kron_identity(q_sq, g.inner_order) - g.a22


def fixed_point_map(q_sq, g, inner=None):
    """Evaluate ``F(q^2)`` with no positivity check.

    `inner` may pass a precomputed ``shifted(q_sq, g)``.
    """
    if g.inner_order == 0:
        return np.array(g.a11)
    if inner is None:
        inner = shifted(q_sq, g)
    out = g.a11 + g.a12 @ cho_solve(inner, g.a12.conj().T)
    return 0.5 * (out + out.conj().T)


def precondition_check(g, cfg=SolverConfig()):
    """Strong positivity of ``(I (x) A11) - A22`` and of ``A11``."""
    delta = cfg.margin(g)
    if not is_strongly_positive(g.a11, delta):
        return False
    return g.inner_order == 0 or is_strongly_positive(shifted(g.a11, g), delta)


def _step(q_sq, g, delta):
    if g.inner_order == 0:
        return np.array(g.a11), np.inf
    inner = shifted(q_sq, g)
    lam = min_eigenvalue(inner)
    if not lam > delta:
        raise IterationBreakdown(
            f"(I (x) q^2) - A22 not strongly positive: min eigenvalue {lam:.6g}"
            f" <= {delta:.3g}", min_eig=lam)
    return fixed_point_map(q_sq, g, inner), lam


def iterate_once(q_sq, g, cfg=SolverConfig()):
    """One successive-approximation step ``q^2 -> F(q^2)``.

    Raises
    ------
    IterationBreakdown
        If ``(I (x) q^2) - A22`` is not strongly positive with margin
        ``cfg.delta``.
    """
    return _step(np.asarray(q_sq, dtype=complex), g, cfg.margin(g))[0]


def classify(g, cfg=SolverConfig()):
    """Pick the uniqueness argument that covers this instance."""
    if fro(g.a12) <= ZERO_COUPLING_RTOL * g.scale:
        return TheoremPath.TRIVIAL_A12_ZERO
    if is_strongly_positive(g.a12 @ g.a12.conj().T, cfg.margin(g)):
        return TheoremPath.THEOREM24
    return TheoremPath.THEOREM25_REDUCTION


def check_bracketing(history, tol):
    """Audit the alternating monotone bracketing of a trajectory.

    Checks, each in Loewner order within `tol`: even iterates
    nondecreasing, odd iterates nonincreasing, every iterate at least
    ``q_0^2``, and every even iterate below every odd iterate.  Returns a
    list of human-readable violations (empty when the trace brackets).
    """
    qs = np.array([rec.q_sq for rec in history])
    n = len(qs)
    # (lower, upper) index pairs that must satisfy q_lower <= q_upper
    pairs = [(k, k + 2) for k in range(0, n - 2, 2)]
    pairs += [(k + 2, k) for k in range(1, n - 2, 2)]
    pairs += [(0, k) for k in range(1, n)]
    pairs += [(i, j) for i in range(0, n, 2) for j in range(1, n, 2)]
    if not pairs:
        return []
    lo, hi = np.array(pairs).T
    diffs = qs[hi] - qs[lo]
    lam = np.linalg.eigvalsh(0.5 * (diffs + diffs.conj().transpose(0, 2, 1)))[:, 0]
    return [f"q_{i}^2 not <= q_{j}^2" for (i, j), v in zip(pairs, lam) if v < -tol]


def limits(history):
    """Last even and last odd iterates, i.e. the lower and upper limits."""
    last = history[-1].q_sq
    before = history[-2].q_sq if len(history) > 1 else last
    if history[-1].n % 2 == 0:
        return last, before
    return before, last


def solve_rho_min(g, cfg=SolverConfig(), q0_sq=None):
    """Iterate ``F`` to its fixed point ``rho_min^2``.

    Parameters
    ----------
    g : GramBlocks
    cfg : SolverConfig
    q0_sq : array_like, optional
        Warm start.  The default ``A11`` is the one for which the even/odd
        bracketing is guaranteed; other admissible starts are useful to
        probe uniqueness.

    Returns
    -------
    ConvergenceResult
        ``status`` is ``PreconditionFailed`` when ``(I (x) A11) - A22`` is not
        strongly positive; no exception escapes for that case.
    """
    path = classify(g, cfg)
    if not precondition_check(g, cfg):
        lam = min_eigenvalue(shifted(g.a11, g)) if g.inner_order else min_eigenvalue(g.a11)
        return ConvergenceResult(
            Status.PRECONDITION_FAILED, path,
            message=("precondition violated: Q0^2 - A22 = (I (x) A11) - A22 is not"
                     f" strongly positive (min eigenvalue {lam:.6g})"))
    delta = cfg.margin(g)
    q = np.array(g.a11 if q0_sq is None else q0_sq, dtype=complex)
    try:
        nxt, lam = _step(q, g, delta)
    except IterationBreakdown as exc:
        return ConvergenceResult(Status.PRECONDITION_FAILED, path, message=str(exc))
    history = [IterateRecord(0, q, lam, float("nan"), fro(nxt - q))]
    status = Status.MAX_ITERATIONS
    for n in range(1, cfg.max_iter + 1):
        prev, q = q, nxt
        step = fro(q - prev)
        try:
            nxt, lam = _step(q, g, delta)
        except IterationBreakdown as exc:
            return ConvergenceResult(Status.PRECONDITION_FAILED, path,
                                     iterations=n, history=tuple(history), message=str(exc))
        residual = fro(nxt - q)
        history.append(IterateRecord(n, q, lam, step, residual))
        if (step <= cfg.step_tol * (1.0 + fro(prev))
                and residual <= cfg.fix_tol * (1.0 + fro(q))):
            status = Status.CONVERGED
            break
    history = tuple(history)
    lower, upper = limits(history)
    tol = cfg.mono_tol * g.scale
    if status is Status.CONVERGED:
        bad = check_bracketing(history, tol) if q0_sq is None else []
        return ConvergenceResult(
            status, path, rho_sq_min=history[-1].q_sq, lower_limit=lower,
            upper_limit=upper, iterations=len(history) - 1, history=history,
            monotone=not bad, message="; ".join(bad[:3]))
    if _subsequences_settled(history, cfg) and fro(upper - lower) > cfg.step_tol * g.scale:
        status = Status.GAP_POSITIVE
    return ConvergenceResult(
        status, path, lower_limit=lower, upper_limit=upper,
        iterations=len(history) - 1, history=history,
        message=f"even/odd gap {fro(upper - lower):.3g} after {len(history) - 1} iterations")


def _subsequences_settled(history, cfg):
    if len(history) < 4:
        return False
    qs = [rec.q_sq for rec in history[-4:]]
    return all(fro(qs[i + 2] - qs[i]) <= cfg.step_tol * (1.0 + fro(qs[i])) for i in (0, 1))


def _require_converged(result):
    if not result.converged:
        raise StateError(f"certify needs a converged result, status is {result.status.value}")


def certify_bound(rho_sq, h, g, cfg=SolverConfig()):
    """Certificate for an arbitrary candidate ``rho^2``.

    The fixed-point residual measures the equality in the defining
    equation; the feasibility margin is ``min_eig((I_N (x) rho^2) - Gamma^*
    Gamma)``, which vanishes for the minimal bound.
    """
    rho_sq = np.asarray(rho_sq, dtype=complex)
    residual = fro(rho_sq - fixed_point_map(rho_sq, g))
    margin = min_eigenvalue(kron_identity(rho_sq, h.block_order) - gram_full(h))
    return Certificate(
        fixed_point_residual=residual,
        feasibility_margin=margin,
        singularity_witness=margin,
        strongly_positive=is_strongly_positive(rho_sq, cfg.margin(g)),
        scale=g.scale,
        mono_tol=cfg.mono_tol,
    )


def certify(result, h, g, cfg=SolverConfig()):
    _require_converged(result)
    return certify_bound(result.rho_sq_min, h, g, cfg)


def with_path(result, path, kernel_dims=()):
    return replace(result, theorem_path=path, kernel_dims=tuple(kernel_dims))
