"""Phase oracle families: grid phases, controlled/coherent/power variants.

A family over modulus n is a set of n commuting unitaries sharing one
eigenstate u: member y multiplies u by w^y (w the n-th root of unity) and
fixes the orthogonal complement pointwise. The coherent version drives the
member choice from a counter register held in superposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    AMP_TOL,
    NORM_TOL,
    UNITARITY_TOL,
    UnitaryMatrix,
    _frozen_complex_array,
    complete_orthonormal_basis,
)


@dataclass(frozen=True)
class QueryKind:
    """Which power of the oracle a query applies: 1 forward, -1 inverse."""

    exponent: int

    @classmethod
    def forward(cls) -> "QueryKind":
        return cls(1)

    @classmethod
    def inverse(cls) -> "QueryKind":
        return cls(-1)

    @classmethod
    def power(cls, m: int) -> "QueryKind":
        return cls(int(m))


FORWARD = QueryKind.forward()
INVERSE = QueryKind.inverse()


@dataclass(frozen=True, eq=False)
class PhaseOracleFamily:
    """The n oracles over a work space of dimension D with shared eigenstate.

    ``basis`` holds an orthonormal basis as rows, with ``basis[0]`` equal to
    the eigenstate; the remaining rows span the fixed subspace.
    """

    n: int
    eigenstate: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"number of phases must be >= 1, got {self.n}")
        eig = _frozen_complex_array(self.eigenstate).reshape(-1)
        d = eig.shape[0]
        basis = _frozen_complex_array(self.basis, shape=(d, d))
        if abs(np.linalg.norm(eig) - 1.0) > NORM_TOL:
            raise ValueError("eigenstate must be a unit vector")
        gram_dev = np.max(np.abs(basis @ basis.conj().T - np.eye(d)))
        if gram_dev > UNITARITY_TOL:
            raise ValueError(f"basis fails orthonormality check, deviation {gram_dev:.3e}")
        if np.max(np.abs(basis[0] - eig)) > AMP_TOL:
            raise ValueError("first basis vector must equal the eigenstate")
        object.__setattr__(self, "eigenstate", eig)
        object.__setattr__(self, "basis", basis)

    @property
    def work_dim(self) -> int:
        return self.eigenstate.shape[0]

    @classmethod
    def from_eigenstate(cls, n: int, eigenstate) -> "PhaseOracleFamily":
        eig = np.asarray(eigenstate, dtype=np.complex128).reshape(-1)
        basis = complete_orthonormal_basis(eig, eig.shape[0])
        return cls(n=n, eigenstate=basis[0], basis=basis)


def default_family(n: int, work_dim: int = 2) -> PhaseOracleFamily:
    """Smallest faithful family: eigenstate e_0 on a dim-``work_dim`` space."""
    eig = np.zeros(work_dim, dtype=np.complex128)
    eig[0] = 1.0
    return PhaseOracleFamily.from_eigenstate(n, eig)


@dataclass(frozen=True, eq=False)
class PhaseInstance:
    """A single unitary with eigenphase theta in [0, 1) on its eigenstate."""

    theta: float
    eigenstate: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.theta < 1.0:
            raise ValueError(f"theta must lie in [0, 1), got {self.theta}")
        eig = _frozen_complex_array(self.eigenstate).reshape(-1)
        if abs(np.linalg.norm(eig) - 1.0) > NORM_TOL:
            raise ValueError("eigenstate must be a unit vector")
        object.__setattr__(self, "eigenstate", eig)

    @property
    def work_dim(self) -> int:
        return self.eigenstate.shape[0]


def _member_matrix(family: PhaseOracleFamily, phase_power: int) -> np.ndarray:
    """w^phase_power on the eigenstate, identity on the rest of the basis."""
    coeffs = np.ones(family.work_dim, dtype=np.complex128)
    coeffs[0] = np.exp(2j * np.pi * phase_power / family.n)
    return (family.basis.T * coeffs) @ family.basis.conj()


def u_y_matrix(family: PhaseOracleFamily, y: int) -> UnitaryMatrix:
    """Family member y: eigenvalue w^y on u, identity elsewhere."""
    if not 0 <= y < family.n:
        raise IndexError(f"label {y} out of range for {family.n} phases")
    return UnitaryMatrix(_member_matrix(family, y))


def controlled_u(family: PhaseOracleFamily, y: int, kind: QueryKind = FORWARD) -> UnitaryMatrix:
    """Controlled member y on (control qubit, work): |0><0| I + |1><1| U_y^m.

    The exponent is reduced modulo n first, since U_y^n is the identity.
    """
    if not 0 <= y < family.n:
        raise IndexError(f"label {y} out of range for {family.n} phases")
    d = family.work_dim
    block = np.eye(2 * d, dtype=np.complex128)
    block[d:, d:] = _member_matrix(family, (y * kind.exponent) % family.n)
    return UnitaryMatrix(block)


def coherent_controlled_u(family: PhaseOracleFamily, kind: QueryKind = FORWARD) -> UnitaryMatrix:
    """Coherent oracle on (control, work, counter): applies member y when the
    counter register holds computational value y.

    Register order is (control qubit, work dim D, counter dim n), control
    most significant, matching the simulator convention.
    """
    n, d = family.n, family.work_dim
    dim = 2 * d * n
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for y in range(n):
        mat[y::n, y::n] = controlled_u(family, y, kind).matrix
    return UnitaryMatrix(mat)


def phase_unitary(inst: PhaseInstance) -> UnitaryMatrix:
    """exp(2*pi*i*theta) on the eigenstate, identity on its complement."""
    proj = np.outer(inst.eigenstate, inst.eigenstate.conj())
    mat = np.eye(inst.work_dim, dtype=np.complex128) + (np.exp(2j * np.pi * inst.theta) - 1) * proj
    return UnitaryMatrix(mat)


def controlled_phase(inst: PhaseInstance, kind: QueryKind = FORWARD) -> UnitaryMatrix:
    """Controlled power of a continuous-phase unitary on (control, work)."""
    proj = np.outer(inst.eigenstate, inst.eigenstate.conj())
    d = inst.work_dim
    core = np.eye(d, dtype=np.complex128) + (np.exp(2j * np.pi * inst.theta * kind.exponent) - 1) * proj
    block = np.eye(2 * d, dtype=np.complex128)
    block[d:, d:] = core
    return UnitaryMatrix(block)
