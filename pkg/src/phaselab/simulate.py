"""Query-algorithm runs in the fixed-label and purified views.

An algorithm owns registers O (output, dim n), B (oracle control wire,
dim 2), W (work space the oracle acts on) and optionally more. Its steps
are unitaries over all of those registers; between consecutive steps the
simulator applies the oracle to (B, W). The purified view appends a counter
register C of dimension n initialized to the zero Fourier state and drives
every query through the coherent oracle.

Success probabilities are computed exactly from amplitudes in all
verification paths; sampling never enters these functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import fourier_weights
from .linalg import (
    RegisterLayout,
    StateVector,
    UnitaryMatrix,
    apply_to_registers,
    haar_random_unitary,
    projection_norm_sq,
    zero_state,
)
from .oracles import (
    FORWARD,
    PhaseInstance,
    PhaseOracleFamily,
    QueryKind,
    coherent_controlled_u,
    controlled_phase,
    controlled_u,
)

OUTPUT = "O"
CONTROL = "B"
WORK = "W"
COUNTER = "C"


@dataclass(frozen=True, eq=False)
class QueryAlgorithm:
    """Register layout plus the interleaving unitaries of a q-query algorithm.

    ``steps`` holds q+1 unitaries over the whole layout; ``kinds`` holds one
    oracle power per query. The initial state is all-zeros; any other start
    state is folded into the first step.
    """

    n: int
    layout: RegisterLayout
    steps: tuple[UnitaryMatrix, ...]
    kinds: tuple[QueryKind, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        if self.n < 1:
            raise ValueError(f"problem size must be >= 1, got {self.n}")
        if self.layout.dim_of(OUTPUT) != self.n:
            raise ValueError("output register O must have dimension n")
        if self.layout.dim_of(CONTROL) != 2:
            raise ValueError("control wire B must have dimension 2")
        self.layout.axis(WORK)
        if COUNTER in self.layout.labels:
            raise ValueError("label C is reserved for the purified counter register")
        if len(self.steps) < 1:
            raise ValueError("an algorithm needs at least one step")
        if len(self.kinds) != len(self.steps) - 1:
            raise ValueError(
                f"{len(self.steps)} steps require {len(self.steps) - 1} query kinds, "
                f"got {len(self.kinds)}"
            )
        total = self.layout.total_dim
        for i, step in enumerate(self.steps):
            if step.dim != total:
                raise ValueError(f"step {i} has dimension {step.dim}, layout expects {total}")

    @property
    def q(self) -> int:
        return len(self.kinds)

    @property
    def work_dim(self) -> int:
        return self.layout.dim_of(WORK)


@dataclass(frozen=True, eq=False)
class RunTranscript:
    """Counter-spectrum snapshots of one purified run.

    ``counter_weights[j]`` is the Fourier weight vector of C after j queries
    (the algorithm steps in between leave it unchanged).
    """

    n: int
    q: int
    counter_weights: tuple[np.ndarray, ...]
    final_state: StateVector

    def __post_init__(self):
        if len(self.counter_weights) != self.q + 1:
            raise ValueError(f"expected {self.q + 1} snapshots, got {len(self.counter_weights)}")
        for j, w in enumerate(self.counter_weights):
            total = float(np.sum(w))
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"snapshot {j} weights sum to {total}, expected 1")


def _check_compatible(alg: QueryAlgorithm, family: PhaseOracleFamily) -> None:
    if alg.n != family.n:
        raise ValueError(f"algorithm expects {alg.n} phases, family has {family.n}")
    if alg.work_dim != family.work_dim:
        raise ValueError(
            f"work register has dimension {alg.work_dim}, family acts on {family.work_dim}"
        )


def run_fixed_y(alg: QueryAlgorithm, family: PhaseOracleFamily, y: int) -> StateVector:
    """Final state on the algorithm registers when querying family member y."""
    _check_compatible(alg, family)
    if not 0 <= y < family.n:
        raise IndexError(f"label {y} out of range for {family.n} phases")
    oracles = {k: controlled_u(family, y, k) for k in set(alg.kinds)}
    state = apply_to_registers(zero_state(alg.layout), alg.steps[0], list(alg.layout.labels))
    for kind, step in zip(alg.kinds, alg.steps[1:]):
        state = apply_to_registers(state, oracles[kind], [CONTROL, WORK])
        state = apply_to_registers(state, step, list(alg.layout.labels))
    return state


def run_fixed_phase(alg: QueryAlgorithm, inst: PhaseInstance) -> StateVector:
    """Final state when the oracle is a continuous-phase unitary."""
    if alg.work_dim != inst.work_dim:
        raise ValueError(
            f"work register has dimension {alg.work_dim}, instance acts on {inst.work_dim}"
        )
    oracles = {k: controlled_phase(inst, k) for k in set(alg.kinds)}
    state = apply_to_registers(zero_state(alg.layout), alg.steps[0], list(alg.layout.labels))
    for kind, step in zip(alg.kinds, alg.steps[1:]):
        state = apply_to_registers(state, oracles[kind], [CONTROL, WORK])
        state = apply_to_registers(state, step, list(alg.layout.labels))
    return state


def _purified_initial(alg: QueryAlgorithm) -> StateVector:
    layout = alg.layout.extended(COUNTER, alg.n)
    amps = np.zeros(layout.total_dim, dtype=np.complex128)
    amps[: alg.n] = 1.0 / np.sqrt(alg.n)  # A at |0..0>, C at the zero Fourier state
    return StateVector(layout, amps)


def _purified_run(alg: QueryAlgorithm, family: PhaseOracleFamily, record: bool):
    _check_compatible(alg, family)
    a_labels = list(alg.layout.labels)
    oracles = {k: coherent_controlled_u(family, k) for k in set(alg.kinds)}
    state = apply_to_registers(_purified_initial(alg), alg.steps[0], a_labels)
    snapshots = [fourier_weights(state, COUNTER)] if record else None
    for kind, step in zip(alg.kinds, alg.steps[1:]):
        state = apply_to_registers(state, oracles[kind], [CONTROL, WORK, COUNTER])
        state = apply_to_registers(state, step, a_labels)
        if record:
            snapshots.append(fourier_weights(state, COUNTER))
    return state, snapshots


def run_purified(alg: QueryAlgorithm, family: PhaseOracleFamily) -> StateVector:
    """Final state on (algorithm registers) x C in the purified view."""
    state, _ = _purified_run(alg, family, record=False)
    return state


def run_purified_transcript(alg: QueryAlgorithm, family: PhaseOracleFamily) -> RunTranscript:
    """Purified run keeping a counter-spectrum snapshot after every query."""
    state, snaps = _purified_run(alg, family, record=True)
    return RunTranscript(n=alg.n, q=alg.q, counter_weights=tuple(snaps), final_state=state)


def counter_leakage(state: StateVector, budget: int) -> float:
    """Total Fourier weight of the counter register beyond ``budget``."""
    weights = fourier_weights(state, COUNTER)
    return float(weights[budget + 1 :].sum())


def counter_leakage_outside(state: StateVector, allowed) -> float:
    """Total Fourier weight of the counter register outside an index set."""
    weights = fourier_weights(state, COUNTER)
    allowed = set(allowed)
    return float(sum(w for k, w in enumerate(weights) if k not in allowed))


def leakage_from_weights(weights: np.ndarray, allowed) -> float:
    """Same as counter_leakage_outside but on a precomputed weight vector."""
    allowed = set(allowed)
    return float(sum(w for k, w in enumerate(weights) if k not in allowed))


def reachable_counter_values(exponents, n: int) -> list[set[int]]:
    """Counter values (mod n) reachable after each prefix of a query schedule.

    Each query adds its exponent on the branch where the control wire is set
    and the work register sits on the eigenstate, and leaves the counter
    alone on every other branch, so the reachable set after j queries is the
    set of subset sums of the first j exponents.

    Returns q+1 sets; entry j applies after j queries.
    """
    cur = {0}
    sets = [set(cur)]
    for m in exponents:
        cur = cur | {(v + m) % n for v in cur}
        sets.append(set(cur))
    return sets


def success_probability_purified(state: StateVector) -> float:
    """Probability that measuring O and C in the computational basis agrees."""
    layout = state.layout
    ax_o, ax_c = layout.axis(OUTPUT), layout.axis(COUNTER)
    if layout.dims[ax_o] != layout.dims[ax_c]:
        raise ValueError("output and counter registers must have equal dimension")
    probs = np.abs(state.tensor_view()) ** 2
    other = tuple(i for i in range(probs.ndim) if i not in (ax_o, ax_c))
    joint = probs.sum(axis=other)
    return float(np.trace(joint))


def success_probability_average(alg: QueryAlgorithm, family: PhaseOracleFamily) -> float:
    """Success probability averaged over a uniformly random family member."""
    total = 0.0
    for y in range(family.n):
        total += projection_norm_sq(run_fixed_y(alg, family, y), OUTPUT, y)
    return total / family.n


def standard_layout(n: int, work_dim: int = 2) -> RegisterLayout:
    """The (O, B, W) layout shared by the built-in algorithm constructors."""
    return RegisterLayout(((OUTPUT, n), (CONTROL, 2), (WORK, work_dim)))


def haar_random_algorithm(
    n: int,
    q: int,
    seed,
    work_dim: int = 2,
    kinds: tuple[QueryKind, ...] | None = None,
) -> QueryAlgorithm:
    """Algorithm with q+1 independent Haar-random steps on (O, B, W)."""
    if q < 0:
        raise ValueError(f"query count must be >= 0, got {q}")
    rng = np.random.default_rng(seed)
    layout = standard_layout(n, work_dim)
    steps = tuple(haar_random_unitary(layout.total_dim, rng) for _ in range(q + 1))
    if kinds is None:
        kinds = (FORWARD,) * q
    return QueryAlgorithm(n=n, layout=layout, steps=steps, kinds=tuple(kinds))
