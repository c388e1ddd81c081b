"""Optimal distinguishing algorithms, the standard estimator, and reductions.

``build_truncated_optimal(n, q)`` constructs the q-query algorithm whose
average success probability on the n-phase distinguishing task is exactly
(q+1)/n: it spreads the output register over {0..q}, walks a control-wire
predicate [O >= j] across the q queries so that branch k of the output
picks up phase w^(y*k), and finishes with the inverse Fourier transform.
At q = n-1 this is the standard phase estimation circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fourier import qft_matrix
from .linalg import (
    AMP_TOL,
    RegisterLayout,
    StateVector,
    UnitaryMatrix,
    complete_orthonormal_basis,
    projection_norm_sq,
)
from .oracles import FORWARD, PhaseInstance
from .simulate import COUNTER, OUTPUT, QueryAlgorithm, run_fixed_phase, standard_layout


@dataclass(frozen=True)
class PhaseEstimate:
    """An estimated phase together with the grid size that produced it."""

    theta_hat: float
    n_grid: int

    def __post_init__(self):
        if not 0.0 <= self.theta_hat < 1.0:
            raise ValueError(f"estimate must lie in [0, 1), got {self.theta_hat}")
        if self.n_grid < 1:
            raise ValueError(f"grid size must be >= 1, got {self.n_grid}")


def _default_eigenstate() -> np.ndarray:
    eig = np.zeros(2, dtype=np.complex128)
    eig[0] = 1.0
    return eig


def threshold_toggle(n: int, threshold: int, work_dim: int = 2) -> UnitaryMatrix:
    """Flip the control wire B on every output branch with O >= threshold.

    XOR semantics: applying the same toggle twice is the identity, so it
    both sets and clears the predicate.
    """
    d2 = 2 * work_dim
    flip = np.zeros((d2, d2), dtype=np.complex128)
    flip[:work_dim, work_dim:] = np.eye(work_dim)
    flip[work_dim:, :work_dim] = np.eye(work_dim)
    keep = np.eye(d2, dtype=np.complex128)
    mat = np.zeros((n * d2, n * d2), dtype=np.complex128)
    for k in range(n):
        mat[k * d2 : (k + 1) * d2, k * d2 : (k + 1) * d2] = flip if k >= threshold else keep
    return UnitaryMatrix(mat)


def _assemble(n: int, q: int, prep_o: np.ndarray, eigenstate: np.ndarray) -> QueryAlgorithm:
    work_dim = eigenstate.shape[0]
    prep_w = complete_orthonormal_basis(eigenstate, work_dim).T
    prep = np.kron(prep_o, np.kron(np.eye(2), prep_w))
    iqft = np.kron(qft_matrix(n).matrix.conj().T, np.eye(2 * work_dim))
    if q == 0:
        steps = (UnitaryMatrix(iqft @ prep),)
    else:
        toggles = [threshold_toggle(n, j, work_dim).matrix for j in range(q + 1)]
        steps = [UnitaryMatrix(toggles[1] @ prep)]
        for j in range(1, q):
            steps.append(UnitaryMatrix(toggles[j + 1] @ toggles[j]))
        steps.append(UnitaryMatrix(iqft @ toggles[q]))
        steps = tuple(steps)
    return QueryAlgorithm(
        n=n, layout=standard_layout(n, work_dim), steps=steps, kinds=(FORWARD,) * q
    )


def build_truncated_optimal(n: int, q: int, eigenstate=None) -> QueryAlgorithm:
    """The q-query algorithm saturating the (q+1)/n success bound.

    The output register is prepared in a uniform superposition over {0..q};
    branch k then gathers phase w^(y*k) from min(k, q) = k active queries,
    leaving the Fourier state of index y truncated to q+1 terms, which the
    final inverse transform concentrates on outcome y with weight (q+1)/n.
    """
    if not 0 <= q <= n - 1:
        raise ValueError(f"query count must satisfy 0 <= q <= n-1, got q={q}, n={n}")
    eig = _default_eigenstate() if eigenstate is None else np.asarray(eigenstate, np.complex128)
    target = np.zeros(n, dtype=np.complex128)
    target[: q + 1] = 1.0 / np.sqrt(q + 1)
    prep_o = complete_orthonormal_basis(target, n).T
    return _assemble(n, q, prep_o, eig)


def build_cemm(n: int, eigenstate=None) -> QueryAlgorithm:
    """The full phase estimation circuit: q = n-1, uniform superposition over
    all of [n], controlled phase accumulation, inverse Fourier transform.

    Semantically the q = n-1 case of ``build_truncated_optimal``, but
    assembled with the Fourier transform as the superposition preparation.
    """
    if n < 1:
        raise ValueError(f"problem size must be >= 1, got {n}")
    eig = _default_eigenstate() if eigenstate is None else np.asarray(eigenstate, np.complex128)
    return _assemble(n, n - 1, qft_matrix(n).matrix, eig)


def cemm_on_continuous_phase(inst: PhaseInstance, n: int) -> np.ndarray:
    """Exact outcome distribution of the grid-n estimator on a continuous phase.

    Entry y is the probability of measuring outcome y on the output register
    when the oracle has eigenphase ``inst.theta`` instead of a grid value.
    """
    if n < 2:
        raise ValueError(f"grid size must be >= 2, got {n}")
    alg = build_cemm(n, eigenstate=inst.eigenstate)
    final = run_fixed_phase(alg, inst)
    return np.array([projection_norm_sq(final, OUTPUT, y) for y in range(n)])


def phase_distance(a: float, b: float, circular: bool = True) -> float:
    """Distance between two phases in [0, 1); circular by default.

    ``circular=False`` gives the literal absolute difference, without
    wraparound at the 0/1 boundary.
    """
    d = abs(float(a) - float(b))
    return min(d, 1.0 - d) if circular else d


def round_to_grid(estimate, n: int) -> int:
    """Nearest grid label y minimizing the circular distance |theta - y/n|.

    Accepts a plain phase in [0, 1) or a PhaseEstimate. Ties break toward
    the smaller label.
    """
    theta = estimate.theta_hat if isinstance(estimate, PhaseEstimate) else float(estimate)
    theta %= 1.0
    d = np.abs(theta - np.arange(n) / n)
    d = np.minimum(d, 1.0 - d)
    return int(np.argmin(d))


@dataclass(frozen=True)
class ReducedPdSolver:
    """An estimator wrapped into a grid distinguisher by rounding.

    If the estimator errs by less than 1/(2*grid_size) on a run, rounding
    recovers the grid label exactly, so the wrapper's distinguishing success
    is at least the estimator's success probability.
    """

    grid_size: int
    estimator: Callable[[PhaseInstance], float]

    def solve(self, inst: PhaseInstance) -> int:
        return round_to_grid(self.estimator(inst), self.grid_size)


def reduction_estimator_to_pd(estimator, epsilon: float) -> ReducedPdSolver:
    """Wrap an epsilon-accurate estimator into a distinguisher on the
    floor(1/(2*epsilon))-point grid."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n = int(np.floor(1.0 / (2.0 * epsilon)))
    if n < 1:
        raise ValueError(f"epsilon={epsilon} yields an empty grid")
    return ReducedPdSolver(grid_size=n, estimator=estimator)


@dataclass(frozen=True, eq=False)
class EprPair:
    """The maximally correlated state (1/sqrt(n)) sum_y |y>|y> on (O, C)."""

    n: int
    state: StateVector

    def __post_init__(self):
        ideal = _epr_computational(self.n)
        if np.max(np.abs(self.state.amps - ideal)) > AMP_TOL:
            raise ValueError("state deviates from the maximally correlated form")


def _epr_computational(n: int) -> np.ndarray:
    amps = np.zeros(n * n, dtype=np.complex128)
    amps[:: n + 1] = 1.0 / np.sqrt(n)
    return amps


def _epr_fourier(n: int) -> np.ndarray:
    f = qft_matrix(n).matrix
    return np.einsum("ay,by->ab", f.conj(), f).reshape(-1) / np.sqrt(n)


def epr_fourier_deviation(n: int) -> float:
    """Max entrywise gap between the computational and Fourier constructions
    (conjugate Fourier state on O paired with Fourier state on C)."""
    return float(np.max(np.abs(_epr_computational(n) - _epr_fourier(n))))


def epr_state(n: int) -> EprPair:
    """Build the pair state and verify both constructions agree entrywise."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    dev = epr_fourier_deviation(n)
    if dev > AMP_TOL:
        raise ValueError(f"basis-change identity violated: deviation {dev:.3e}")
    layout = RegisterLayout(((OUTPUT, n), (COUNTER, n)))
    return EprPair(n=n, state=StateVector(layout, _epr_computational(n)))
