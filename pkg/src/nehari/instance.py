"""Instance files: parsing, emission and seeded generation.

An instance is a JSON document::

    {
      "format_version": 1,
      "dim": 1,
      "coefficients": [ [[[2.0, 0.0]]], [[[1.0, 0.0]]] ],
      "rho": [[[2.449489742783178, 0.0]]],
      "solver": {"delta": 1e-9, "tol": 1e-12, "max_iter": 500}
    }

Every matrix is a list of rows and every entry a ``[real, imag]`` pair.
``rho`` and ``solver`` are optional.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .hankel import CoefficientSequence, gram_from_coefficients
from .solver import SolverConfig, precondition_check

FORMAT_VERSION = 1
SOLVER_KEYS = {"delta": float, "tol": float, "max_iter": int}


@dataclass(frozen=True)
class InstanceFile:
    coefficients: CoefficientSequence
    rho: np.ndarray = None
    solver: dict = field(default_factory=dict)
    seed: int = None
    format_version: int = FORMAT_VERSION

    @property
    def dim(self):
        return self.coefficients.block_dim

    @property
    def support(self):
        return self.coefficients.support

    def config(self, **overrides):
        """Solver configuration from the file's overrides, then `overrides`."""
        opts = {**self.solver, **{k: v for k, v in overrides.items() if v is not None}}
        kwargs = {}
        if "delta" in opts:
            kwargs["delta"] = opts["delta"]
        if "tol" in opts:
            kwargs["step_tol"] = kwargs["fix_tol"] = opts["tol"]
        if "max_iter" in opts:
            kwargs["max_iter"] = opts["max_iter"]
        try:
            return SolverConfig(**kwargs)
        except ValueError as exc:
            raise InputError(f"solver: {exc}") from None

    def __eq__(self, other):
        if not isinstance(other, InstanceFile):
            return NotImplemented
        same_rho = (self.rho is None and other.rho is None) or (
            self.rho is not None and other.rho is not None
            and np.array_equal(self.rho, other.rho))
        return (self.format_version == other.format_version
                and self.seed == other.seed and self.solver == other.solver and same_rho
                and self.support == other.support
                and all(np.array_equal(a, b) for a, b in zip(
                    self.coefficients.coefficients, other.coefficients.coefficients)))


def _matrix(value, dim, path):
    if not isinstance(value, list) or len(value) != dim:
        raise InputError(f"{path}: expected {dim} rows")
    out = np.zeros((dim, dim), dtype=complex)
    for r, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise InputError(f"{path}[{r}]: expected {dim} entries")
        for c, entry in enumerate(row):
            where = f"{path}[{r}][{c}]"
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                               for x in entry)):
                raise InputError(f"{where}: expected a [real, imag] pair of numbers")
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise InputError(f"{where}: non-finite entry")
            out[r, c] = complex(re, im)
    return out


def parse_instance(text):
    """Parse and validate an instance document.

    Raises
    ------
    InputError
        Naming the first violated constraint with its field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed instance: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("instance: top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise InputError(f"format_version: unsupported version {version!r}")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"dim: expected a positive integer, got {dim!r}")
    coeffs = doc.get("coefficients")
    if not isinstance(coeffs, list) or not coeffs:
        raise InputError("coefficients: expected a non-empty list of matrices")
    mats = tuple(_matrix(c, dim, f"coefficients[{k}]") for k, c in enumerate(coeffs))
    rho = None
    if doc.get("rho") is not None:
        rho = _matrix(doc["rho"], dim, "rho")
    solver = doc.get("solver") or {}
    if not isinstance(solver, dict):
        raise InputError("solver: expected an object")
    checked = {}
    for key, value in solver.items():
        if key not in SOLVER_KEYS:
            raise InputError(f"solver.{key}: unknown option")
        kind = SOLVER_KEYS[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or (
                kind is int and not isinstance(value, int)):
            raise InputError(f"solver.{key}: expected {kind.__name__}")
        if not math.isfinite(value) or value <= 0:
            raise InputError(f"solver.{key}: must be finite and > 0")
        checked[key] = kind(value)
    seed = doc.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise InputError("seed: expected an integer")
    return InstanceFile(CoefficientSequence(mats), rho, checked, seed)


def _pairs(mat):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def emit_instance(inst):
    doc = {"format_version": inst.format_version, "dim": inst.dim}
    if inst.seed is not None:
        doc["seed"] = inst.seed
    doc["coefficients"] = [_pairs(c) for c in inst.coefficients.coefficients]
    if inst.rho is not None:
        doc["rho"] = _pairs(inst.rho)
    if inst.solver:
        doc["solver"] = dict(inst.solver)
    return json.dumps(doc, indent=1) + "\n"


def generate_instance(m, k, seed, dominance=1.0):
    """Seeded random instance that passes the starting precondition.

    ``gamma_2 .. gamma_K`` have entries uniform in the complex unit disk
    scaled by ``1/K``; ``gamma_1 = dominance * c * I`` with
    ``c = 1 + sum ||gamma_j||``, grown by 1.5 until the precondition holds.
    """
    if m < 1 or k < 1:
        raise InputError("m and k must be >= 1")
    if not dominance >= 1:
        raise InputError("dominance must be >= 1")
    rng = np.random.default_rng(seed)
    tail = []
    for _ in range(k - 1):
        radius = np.sqrt(rng.random((m, m)))
        angle = 2.0 * np.pi * rng.random((m, m))
        tail.append(radius * np.exp(1j * angle) / k)
    c = 1.0 + sum(np.linalg.norm(t, 2) for t in tail)
    lead = dominance * c
    while True:
        coeffs = CoefficientSequence((lead * np.eye(m, dtype=complex), *tail))
        _, g = gram_from_coefficients(coeffs)
        if precondition_check(g):
            return InstanceFile(coeffs, seed=seed)
        lead *= 1.5


def read_instance(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read instance {path}: {exc.strerror}") from None
    return parse_instance(text)


def write_atomic(path, text):
    """Write `text` to `path` via a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
