import numpy as np
import pytest

from nehari import CoefficientSequence, gram_from_coefficients, precondition_check

SQRT2 = np.sqrt(2.0)


def char_poly_root_2x2(a):
    """Largest eigenvalue of a real symmetric 2x2 via its characteristic polynomial."""
    tr = a[0][0] + a[1][1]
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return (tr + np.sqrt(tr * tr - 4 * det)) / 2


def random_complex(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hermitian(rng, n, scale=1.0):
    a = random_complex(rng, (n, n), scale)
    return 0.5 * (a + a.conj().T)


def random_psd(rng, n, rank=None):
    b = random_complex(rng, (n, rank or n))
    return b @ b.conj().T


def random_coefficients(rng, m, k, lead=None):
    """Unstructured coefficients; ``gamma_1`` gets an extra ``lead * I``."""
    coeffs = [random_complex(rng, (m, m)) for _ in range(k)]
    if lead is not None:
        coeffs[0] = coeffs[0] + lead * np.eye(m)
    return CoefficientSequence(tuple(coeffs))


def admissible_instance(rng, m, k, max_tries=50):
    """Random instance passing the starting precondition, not overly dominant."""
    for _ in range(max_tries):
        lead = rng.uniform(1.0, 4.0) * np.sqrt(m * k)
        coeffs = random_coefficients(rng, m, k, lead)
        h, g = gram_from_coefficients(coeffs)
        if precondition_check(g):
            return coeffs, h, g
    raise RuntimeError("no admissible instance found")


def rank_deficient_instance(rng, m, kind):
    """Instances whose coupling block ``A12`` has a nontrivial left kernel."""
    if kind == "rank_one_tail":
        # K = 2, gamma_2 rank one: A12 = gamma_1^* gamma_2 has rank 1
        a, b = random_complex(rng, (m, 1)), random_complex(rng, (m, 1))
        g1 = 3.0 * np.eye(m) + 0.4 * random_complex(rng, (m, m))
        return CoefficientSequence((g1, 0.8 * a @ b.conj().T))
    if kind == "shared_right_vector":
        # K = 3 with gamma_2, gamma_3 = a_k b^*: rank A12 <= 2, deficient for m >= 3
        b = random_complex(rng, (m, 1))
        tail = [0.5 * random_complex(rng, (m, 1)) @ b.conj().T for _ in range(2)]
        g1 = 4.0 * np.eye(m) + 0.4 * random_complex(rng, (m, m))
        return CoefficientSequence((g1, *tail))
    if kind == "rotated_block":
        # block diagonal in a random unitary frame, last coordinate uncoupled
        v, _ = np.linalg.qr(random_complex(rng, (m, m)))
        coeffs = []
        for k in range(3):
            blk = np.zeros((m, m), dtype=complex)
            blk[:m - 1, :m - 1] = random_complex(rng, (m - 1, m - 1), 0.5)
            if k == 0:
                blk += 3.0 * np.eye(m)
            coeffs.append(v @ blk @ v.conj().T)
        return CoefficientSequence(tuple(coeffs))
    raise ValueError(kind)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def scalar_ref():
    """Scalar reference instance ``[2, 1, 0]``."""
    coeffs = CoefficientSequence.scalar([2, 1, 0])
    h, g = gram_from_coefficients(coeffs, 2)
    return coeffs, h, g


@pytest.fixture
def decoupled():
    coeffs = CoefficientSequence((np.diag([2.0, 1.0]), np.diag([1.0, 0.0])))
    h, g = gram_from_coefficients(coeffs)
    return coeffs, h, g


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
