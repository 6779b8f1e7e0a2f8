"""Dense statevector container used by the circuit emulation.

Amplitudes follow the big-endian index convention of :mod:`ucrbm.spins`.
States are immutable after construction; every operation returns a new
instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SizeCapError

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray
    norm: float = field(default=0.0)

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitude vector of length {amps.shape} does not match "
                f"{self.n_qubits} qubits"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("non-finite amplitude")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "norm", float(np.linalg.norm(amps)))

    def normalized(self) -> "StateVector":
        if self.norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.n_qubits, self.amplitudes / self.norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def with_plus_ancilla(self) -> "StateVector":
        """Append a fresh ancilla qubit in |+> as the least significant bit."""
        amps = np.kron(self.amplitudes, np.array([1.0, 1.0]) / SQRT2)
        return StateVector(self.n_qubits + 1, amps)


def from_amplitudes(amps, normalize: bool = False) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128)
    n = int(round(np.log2(amps.shape[0])))
    if (1 << n) != amps.shape[0]:
        raise ValueError(f"length {amps.shape[0]} is not a power of two")
    state = StateVector(n, amps)
    return state.normalized() if normalize else state


def overlap(a: StateVector, b: StateVector) -> complex:
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>| between the normalized versions of both states."""
    denom = a.norm * b.norm
    if denom == 0.0:
        raise ValueError("fidelity with a zero vector is undefined")
    return abs(overlap(a, b)) / denom


def check_cap(n_qubits: int, cap: int, what: str = "statevector") -> None:
    if n_qubits > cap:
        raise SizeCapError(f"{what} over {n_qubits} qubits exceeds the cap of {cap}")
