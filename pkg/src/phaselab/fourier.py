"""Fourier transform over arbitrary dimension and Fourier-basis diagnostics.

The transform maps the computational basis state ``|y>`` to
``(1/sqrt(n)) * sum_k w^(y*k) |k>`` with ``w = exp(2*pi*i/n)``. The Fourier
weights analyzer reads the spectrum of one register without mutating the
input, so it can be inserted between steps of a simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import RegisterLayout, StateVector, UnitaryMatrix, apply_to_registers


@lru_cache(maxsize=None)
def qft_matrix(n: int) -> UnitaryMatrix:
    """The n x n Fourier transform matrix, entries w^(y*k)/sqrt(n)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    grid = np.outer(np.arange(n), np.arange(n))
    return UnitaryMatrix(np.exp(2j * np.pi * grid / n) / np.sqrt(n))


def fourier_state(n: int, y: int, label: str = "C") -> StateVector:
    """Fourier basis state of index ``y``: amplitude w^(y*k)/sqrt(n) at k."""
    if not 0 <= y < n:
        raise IndexError(f"index {y} out of range for modulus {n}")
    amps = np.exp(2j * np.pi * y * np.arange(n) / n) / np.sqrt(n)
    return StateVector(RegisterLayout(((label, n),)), amps)


def conjugate_fourier_state(n: int, y: int, label: str = "C") -> StateVector:
    """Entrywise conjugate of the Fourier state; equals index (n - y) mod n."""
    if not 0 <= y < n:
        raise IndexError(f"index {y} out of range for modulus {n}")
    base = fourier_state(n, y, label)
    return StateVector(base.layout, base.amps.conj())


@dataclass(frozen=True)
class FourierBasisIndex:
    """A validated Fourier-basis label k modulo n."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"modulus must be >= 1, got {self.n}")
        if not 0 <= self.k < self.n:
            raise IndexError(f"index {self.k} out of range for modulus {self.n}")

    def state(self, label: str = "C") -> StateVector:
        return fourier_state(self.n, self.k, label)

    def conjugate_state(self, label: str = "C") -> StateVector:
        return conjugate_fourier_state(self.n, self.k, label)


def fourier_weights(state: StateVector, register: str) -> np.ndarray:
    """Fourier-basis outcome probabilities of one register.

    Entry k is the probability of outcome k when the register is rotated by
    the inverse transform and measured. Works on a copy; the input state is
    never mutated.
    """
    dim = state.layout.dim_of(register)
    rotated = apply_to_registers(state, qft_matrix(dim).adjoint, [register])
    axis = state.layout.axis(register)
    probs = np.abs(rotated.tensor_view()) ** 2
    other = tuple(i for i in range(probs.ndim) if i != axis)
    return probs.sum(axis=other)


def phase_gradient(n: int, step: int = 1) -> UnitaryMatrix:
    """Diagonal unitary diag(w^(step*k)); shifts Fourier index by ``step``."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return UnitaryMatrix(np.diag(np.exp(2j * np.pi * step * np.arange(n) / n)))
