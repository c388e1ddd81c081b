"""Dense complex kernels: labeled registers, state vectors, unitary matrices.

Every other module is built on the handful of operations defined here, so
invariants (unit norm, unitarity, orthonormality) are validated eagerly at
construction time, and all numerical tolerances live in this module.

Amplitude ordering is row-major over the register order of the layout: the
first listed register is the most significant index block. All values are
immutable after construction; operations return new values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Centralized tolerances: unitarity/normalization 1e-9, amplitude equality
# 1e-10, probability comparisons 1e-9.
UNITARITY_TOL = 1e-9
NORM_TOL = 1e-9
AMP_TOL = 1e-10
PROB_TOL = 1e-9

# Gram-Schmidt candidates whose residual norm falls below this are skipped.
_RESIDUAL_TOL = 1e-8


def _frozen_complex_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, order="C")
    if shape is not None:
        arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite (no NaN/Inf)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered list of (label, dimension) registers defining a tensor space."""

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        regs = tuple((str(label), int(dim)) for label, dim in self.registers)
        object.__setattr__(self, "registers", regs)
        labels = [label for label, _ in regs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"register labels must be unique, got {labels}")
        if any(dim < 1 for _, dim in regs):
            raise ValueError("every register dimension must be >= 1")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.registers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.registers)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def axis(self, label: str) -> int:
        """Tensor axis of a register; raises KeyError for unknown labels."""
        for i, (name, _) in enumerate(self.registers):
            if name == label:
                return i
        raise KeyError(f"no register labeled {label!r} in {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.registers[self.axis(label)][1]

    def extended(self, label: str, dim: int) -> "RegisterLayout":
        """New layout with one register appended (least significant block)."""
        return RegisterLayout(self.registers + ((label, dim),))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector over the registers of a layout.

    Unit Euclidean norm is required within 1e-9 unless the state is
    explicitly flagged as an unnormalized intermediate.
    """

    layout: RegisterLayout
    amps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = _frozen_complex_array(self.amps).reshape(-1)
        if amps.shape != (self.layout.total_dim,):
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, "
                f"layout expects {self.layout.total_dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        if self.normalized and abs(self.norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {self.norm} deviates from 1 beyond {NORM_TOL}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def tensor_view(self) -> np.ndarray:
        """Read-only view shaped by the register dimensions."""
        return self.amps.reshape(self.layout.dims)


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Dense square complex matrix verified unitary at construction."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen_complex_array(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        dev = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
        if dev > UNITARITY_TOL:
            raise ValueError(f"matrix fails unitarity check: max |U†U - I| = {dev:.3e}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def adjoint(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix.conj().T)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix @ other.matrix)


def basis_state(layout: RegisterLayout, values: tuple[int, ...] | list[int]) -> StateVector:
    """Computational basis state with one index per register."""
    if len(values) != len(layout.registers):
        raise ValueError("need one basis index per register")
    flat = 0
    for (label, dim), v in zip(layout.registers, values):
        if not 0 <= v < dim:
            raise IndexError(f"basis index {v} out of range for register {label!r} (dim {dim})")
        flat = flat * dim + v
    amps = np.zeros(layout.total_dim, dtype=np.complex128)
    amps[flat] = 1.0
    return StateVector(layout, amps)


def zero_state(layout: RegisterLayout) -> StateVector:
    """All-zeros computational basis state."""
    return basis_state(layout, [0] * len(layout.registers))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Hermitian inner product <a|b> with conjugation on the left argument."""
    if a.layout != b.layout:
        raise ValueError(f"layout mismatch: {a.layout.labels} vs {b.layout.labels}")
    return complex(np.vdot(a.amps, b.amps))


def apply_to_registers(state: StateVector, u: UnitaryMatrix, targets: list[str]) -> StateVector:
    """Apply ``u`` to the listed registers, identity on the rest.

    The matrix is interpreted over the tensor product of the target registers
    in the given order (first target most significant).
    """
    axes = [state.layout.axis(t) for t in targets]
    if len(set(axes)) != len(axes):
        raise ValueError(f"duplicate target registers: {targets}")
    dims = state.layout.dims
    block = math.prod(dims[a] for a in axes)
    if block != u.dim:
        raise ValueError(
            f"target registers {targets} span dimension {block}, matrix has dimension {u.dim}"
        )
    psi = state.amps.reshape(dims)
    psi = np.moveaxis(psi, axes, range(len(axes)))
    moved_shape = psi.shape
    psi = u.matrix @ psi.reshape(block, -1)
    psi = np.moveaxis(psi.reshape(moved_shape), range(len(axes)), axes)
    return StateVector(state.layout, psi.reshape(-1), normalized=state.normalized)


def projection_norm_sq(state: StateVector, register: str, value: int) -> float:
    """Probability weight of a computational basis value on one register."""
    axis = state.layout.axis(register)
    dim = state.layout.dims[axis]
    if not 0 <= value < dim:
        raise IndexError(f"value {value} out of range for register {register!r} (dim {dim})")
    sub = np.take(state.amps.reshape(state.layout.dims), value, axis=axis)
    return float(np.sum(np.abs(sub) ** 2))


def complete_orthonormal_basis(u, dim: int) -> np.ndarray:
    """Orthonormal basis of C^dim whose first vector is ``u``.

    Gram-Schmidt completion over the computational basis vectors in index
    order; a candidate is skipped when its residual norm drops below 1e-8.
    Deterministic: no randomness enters the construction.

    Returns an array of shape (dim, dim) whose rows are the basis vectors.
    """
    first = np.array(u, dtype=np.complex128).reshape(-1)
    if first.shape != (dim,):
        raise ValueError(f"seed vector has length {first.shape[0]}, expected {dim}")
    nrm = np.linalg.norm(first)
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"seed vector norm {nrm} deviates from 1 beyond {NORM_TOL}")
    rows = [first / nrm]
    for k in range(dim):
        if len(rows) == dim:
            break
        cand = np.zeros(dim, dtype=np.complex128)
        cand[k] = 1.0
        for r in rows:
            cand = cand - np.vdot(r, cand) * r
        res = np.linalg.norm(cand)
        if res < _RESIDUAL_TOL:
            continue
        cand /= res
        # second orthogonalization pass keeps the Gram matrix at ~1e-16
        for r in rows:
            cand = cand - np.vdot(r, cand) * r
        cand /= np.linalg.norm(cand)
        rows.append(cand)
    if len(rows) != dim:
        raise ValueError("could not complete an orthonormal basis")
    out = np.array(rows)
    out.setflags(write=False)
    return out


def haar_random_unitary(dim: int, seed) -> UnitaryMatrix:
    """Haar-distributed random unitary, deterministic for a fixed seed.

    QR of a complex Gaussian matrix with the R diagonal rotated to be
    positive real, which removes the QR phase ambiguity and makes the
    distribution exactly Haar. ``seed`` may be an int or a Generator.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return UnitaryMatrix(q)
