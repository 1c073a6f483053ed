"""Truncated block-Hankel operators and the blocks of their Gram matrix.

The Hankel operator has block ``(j, k) = gamma_{j+k-1}`` (1-based).  Its
first block row and column are split off::

    Gamma = [[gamma_1, B_r    ],
             [B_c,     Gamma_1]]

with ``Gamma_1`` the trailing submatrix, so its block ``(j, k)`` is
``gamma_{j+k+1}``.  The Gram matrix ``Gamma^* Gamma`` then has blocks
``A11``, ``A12`` and ``A22``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import as_matrix, fro, hermitian


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoefficientSequence:
    """Finitely supported sequence ``gamma_1 .. gamma_K`` of ``m x m`` blocks.

    Coefficients past ``K`` are zero.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        if len(coeffs) < 1:
            raise InputError("coefficient sequence must have K >= 1 terms")
        mats = []
        for k, c in enumerate(coeffs, start=1):
            mat = as_matrix(c, name=f"gamma_{k}")
            if mat.shape[0] != mat.shape[1]:
                raise InputError(f"gamma_{k}: blocks must be square, got shape {mat.shape}")
            if mats and mat.shape != mats[0].shape:
                raise InputError(
                    f"gamma_{k}: shape {mat.shape} differs from gamma_1 shape {mats[0].shape}")
            mats.append(_frozen(mat))
        object.__setattr__(self, "coefficients", tuple(mats))

    @property
    def block_dim(self):
        return self.coefficients[0].shape[0]

    @property
    def support(self):
        return len(self.coefficients)

    def __getitem__(self, k):
        """Return ``gamma_k`` (1-based), zero outside the support."""
        if 1 <= k <= self.support:
            return self.coefficients[k - 1]
        return np.zeros((self.block_dim, self.block_dim), dtype=complex)

    def default_order(self):
        """Truncation order that is exact for this sequence.

        ``N = K`` already captures every nonzero block; at least two block
        rows are kept so that the 2 x 2 partition exists.
        """
        return max(self.support, 2)

    @classmethod
    def scalar(cls, values):
        return cls(tuple(np.array([[v]], dtype=complex) for v in values))


@dataclass(frozen=True)
class TruncatedHankel:
    matrix: np.ndarray
    block_order: int
    block_dim: int

    def block(self, j, k):
        m = self.block_dim
        return self.matrix[(j - 1) * m:j * m, (k - 1) * m:k * m]


@dataclass(frozen=True)
class HankelPartition:
    gamma1: np.ndarray
    b_row: np.ndarray
    b_col: np.ndarray
    gamma1_shifted: np.ndarray
    block_dim: int

    def reassemble(self):
        return np.block([[self.gamma1, self.b_row],
                         [self.b_col, self.gamma1_shifted]])


@dataclass(frozen=True)
class GramBlocks:
    """Blocks of ``Gamma^* Gamma``: ``[[a11, a12], [a12^*, a22]]``.

    ``a11`` is ``m x m``, ``a12`` is ``m x (N-1)m`` and ``a22`` is
    ``(N-1)m x (N-1)m``.
    """

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray

    def __post_init__(self):
        a11 = hermitian(self.a11, "A11")
        m = a11.shape[0]
        a12 = np.array(self.a12, dtype=complex, ndmin=2)
        a22 = np.array(self.a22, dtype=complex, ndmin=2)
        if a12.shape[0] != m or a12.shape[1] % m:
            raise InputError(f"A12 shape {a12.shape} incompatible with m={m}")
        inner = a12.shape[1]
        if a22.shape != (inner, inner):
            raise InputError(f"A22 shape {a22.shape}, expected {(inner, inner)}")
        if not (np.all(np.isfinite(a12)) and np.all(np.isfinite(a22))):
            raise InputError("Gram blocks: non-finite entries")
        if inner:
            a22 = hermitian(a22, "A22")
        object.__setattr__(self, "a11", _frozen(a11))
        object.__setattr__(self, "a12", _frozen(a12))
        object.__setattr__(self, "a22", _frozen(a22))

    @property
    def block_dim(self):
        return self.a11.shape[0]

    @property
    def inner_order(self):
        """Number of ``m x m`` block copies in the inner space (``N - 1``)."""
        return self.a12.shape[1] // self.block_dim

    @property
    def scale(self):
        """``1 + ||A11||_F + ||A22||_F``, the reference magnitude for tolerances."""
        return 1.0 + fro(self.a11) + fro(self.a22)

    def assemble(self):
        return np.block([[self.a11, self.a12],
                         [self.a12.conj().T, self.a22]])


def build_truncated_hankel(coeffs, n=None):
    """Dense ``Nm x Nm`` block-Hankel matrix with block ``(j,k) = gamma_{j+k-1}``."""
    if n is None:
        n = coeffs.default_order()
    if n < 1:
        raise InputError(f"truncation order must be >= 1, got {n}")
    m = coeffs.block_dim
    mat = np.zeros((n * m, n * m), dtype=complex)
    for j in range(n):
        for k in range(n):
            idx = j + k + 1
            if idx <= coeffs.support:
                mat[j * m:(j + 1) * m, k * m:(k + 1) * m] = coeffs[idx]
    return TruncatedHankel(_frozen(mat), n, m)


def partition(h):
    if h.block_order < 2:
        raise InputError("partition undefined for block order 1")
    m = h.block_dim
    a = h.matrix
    return HankelPartition(
        gamma1=_frozen(a[:m, :m]),
        b_row=_frozen(a[:m, m:]),
        b_col=_frozen(a[m:, :m]),
        gamma1_shifted=_frozen(a[m:, m:]),
        block_dim=m,
    )


def _blocks(a, m):
    rows, cols = a.shape[0] // m, a.shape[1] // m
    return [[a[i * m:(i + 1) * m, j * m:(j + 1) * m] for j in range(cols)] for i in range(rows)]


def _block_gram(left, right):
    """``left^* right`` for block matrices, summed block by block.

    Summing fixed ``m x m`` products in a fixed order keeps the result
    bitwise independent of how many zero blocks pad the truncation.
    """
    out = []
    for j in range(len(left[0])):
        row = []
        for k in range(len(right[0])):
            acc = left[0][j].conj().T @ right[0][k]
            for i in range(1, len(left)):
                acc = acc + left[i][j].conj().T @ right[i][k]
            row.append(acc)
        out.append(row)
    return out


def _add(x, y):
    return [[a + b for a, b in zip(rx, ry)] for rx, ry in zip(x, y)]


def gram_blocks(p):
    """``A11 = g1^* g1 + Bc^* Bc``, ``A12 = g1^* Br + Bc^* G1``, ``A22 = G1^* G1 + Br^* Br``."""
    m = p.block_dim
    g1, br = _blocks(p.gamma1, m), _blocks(p.b_row, m)
    bc, sh = _blocks(p.b_col, m), _blocks(p.gamma1_shifted, m)
    a11 = _add(_block_gram(g1, g1), _block_gram(bc, bc))
    a12 = _add(_block_gram(g1, br), _block_gram(bc, sh))
    a22 = _add(_block_gram(sh, sh), _block_gram(br, br))
    return GramBlocks(np.block(a11), np.block(a12), np.block(a22))


def gram_full(h):
    a = h.matrix
    g = a.conj().T @ a
    return 0.5 * (g + g.conj().T)


def gram_from_coefficients(coeffs, n=None):
    """Shortcut: truncate, partition and form the Gram blocks."""
    h = build_truncated_hankel(coeffs, n)
    return h, gram_blocks(partition(h))
