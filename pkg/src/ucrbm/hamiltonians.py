"""Benchmark Hamiltonians as real-weighted sums of Pauli words.

Provides the spin-chain builders (transverse-field Ising lines and
antiferromagnetic Heisenberg lines, open boundaries, nearest neighbors),
a Jordan-Wigner mapper for fermionic operators, the triple-quantum-dot
Hubbard model with Peierls hopping phases, a plain-text file format, and
matrix-free application plus dense exact diagonalization.
"""

from __future__ import annotations

import functools
import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import HermiticityError, PauliFileError
from .spins import all_spin_configs, as_spins
from .statevector import StateVector, check_cap

PAULI_CHARS = "IXYZ"
DENSE_CAP = 14

# Bohr magneton in meV per tesla; enters only the quantum-dot builder.
MU_B_MEV_PER_T = 0.05788

_PAULI_MATS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# Single-qubit products P1*P2 -> (P3, phase).
_PAULI_MUL = {
    ("I", "I"): ("I", 1),
    ("I", "X"): ("X", 1),
    ("I", "Y"): ("Y", 1),
    ("I", "Z"): ("Z", 1),
    ("X", "I"): ("X", 1),
    ("Y", "I"): ("Y", 1),
    ("Z", "I"): ("Z", 1),
    ("X", "X"): ("I", 1),
    ("Y", "Y"): ("I", 1),
    ("Z", "Z"): ("I", 1),
    ("X", "Y"): ("Z", 1j),
    ("Y", "X"): ("Z", -1j),
    ("Y", "Z"): ("X", 1j),
    ("Z", "Y"): ("X", -1j),
    ("Z", "X"): ("Y", 1j),
    ("X", "Z"): ("Y", -1j),
}


@dataclass(frozen=True)
class PauliHamiltonian:
    """Hermitian operator sum_l c_l P_l with real coefficients c_l.

    Words are unique strings over {I, X, Y, Z}; their common length fixes
    the qubit count.
    """

    n_qubits: int
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        seen = set()
        for coeff, word in self.terms:
            if len(word) != self.n_qubits or any(c not in PAULI_CHARS for c in word):
                raise ValueError(f"bad Pauli word {word!r} for {self.n_qubits} qubits")
            if word in seen:
                raise ValueError(f"duplicate Pauli word {word!r}")
            seen.add(word)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient for {word!r}")
        object.__setattr__(
            self, "terms", tuple((float(c), str(w)) for c, w in self.terms)
        )

    @classmethod
    def from_terms(cls, terms) -> "PauliHamiltonian":
        terms = list(terms)
        if not terms:
            raise ValueError("a Hamiltonian needs at least one term")
        return cls(len(terms[0][1]), tuple(terms))

    @property
    def n_terms(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class FermionTerm:
    """coefficient * product of ladder operators, e.g. c * d3^dag d0."""

    coefficient: complex
    ops: tuple[tuple[int, bool], ...]  # (mode index, dagger flag), applied right to left


@dataclass(frozen=True)
class TqdParams:
    """Triangular triple-dot Hubbard parameters (energies in meV, field in T)."""

    b_field: float
    t: float = -0.23
    u: float = 50 * 0.23
    e_site: float = -0.23
    g_star: float = -0.44
    phi_per_b: float = 1.25
    v: float = 10 * 0.23  # inter-dot density-density strength, off by default

    def __post_init__(self):
        if self.u < 0:
            raise ValueError("on-site repulsion must be non-negative")
        for value in (self.b_field, self.t, self.u, self.e_site, self.g_star,
                      self.phi_per_b, self.v):
            if not np.isfinite(value):
                raise ValueError("non-finite quantum-dot parameter")


# ---------------------------------------------------------------------------
# spin-chain builders


def build_tfi(n: int, h: float) -> PauliHamiltonian:
    """Open transverse-field Ising chain: -h sum_i X_i - sum_i Z_i Z_{i+1}."""
    if n < 2:
        raise ValueError("the chain needs at least two sites")
    terms = []
    if h != 0.0:
        for i in range(n):
            word = ["I"] * n
            word[i] = "X"
            terms.append((-h, "".join(word)))
    for i in range(n - 1):
        word = ["I"] * n
        word[i] = word[i + 1] = "Z"
        terms.append((-1.0, "".join(word)))
    return PauliHamiltonian(n, tuple(terms))


def build_afh(n: int) -> PauliHamiltonian:
    """Open antiferromagnetic Heisenberg chain: sum_i XX + YY + ZZ."""
    if n < 2:
        raise ValueError("the chain needs at least two sites")
    terms = []
    for i in range(n - 1):
        for pauli in "XYZ":
            word = ["I"] * n
            word[i] = word[i + 1] = pauli
            terms.append((1.0, "".join(word)))
    return PauliHamiltonian(n, tuple(terms))


# ---------------------------------------------------------------------------
# Jordan-Wigner mapping


def _multiply_words(w1: str, w2: str) -> tuple[complex, str]:
    phase = 1 + 0j
    out = []
    for c1, c2 in zip(w1, w2):
        c3, p = _PAULI_MUL[(c1, c2)]
        out.append(c3)
        phase *= p
    return phase, "".join(out)


def _jw_ladder(mode: int, dagger: bool, n_modes: int) -> dict[str, complex]:
    """Pauli expansion of one ladder operator with its Z string."""
    prefix = "Z" * mode
    suffix = "I" * (n_modes - mode - 1)
    sign = -0.5j if dagger else 0.5j
    return {
        prefix + "X" + suffix: 0.5,
        prefix + "Y" + suffix: sign,
    }


def jordan_wigner(terms, n_modes: int, drop_tol: float = 1e-12) -> PauliHamiltonian:
    """Map a Hermitian sum of fermionic terms onto Pauli words.

    Raises HermiticityError when the input does not close under conjugation
    (detected as residual imaginary Pauli coefficients).
    """
    acc: dict[str, complex] = {}
    for term in terms:
        product = {"I" * n_modes: complex(term.coefficient)}
        for mode, dagger in term.ops:
            if not 0 <= mode < n_modes:
                raise ValueError(f"mode {mode} out of range for {n_modes} modes")
            ladder = _jw_ladder(mode, dagger, n_modes)
            new: dict[str, complex] = {}
            for w1, c1 in product.items():
                for w2, c2 in ladder.items():
                    phase, w3 = _multiply_words(w1, w2)
                    new[w3] = new.get(w3, 0.0) + c1 * c2 * phase
            product = new
        for word, coeff in product.items():
            acc[word] = acc.get(word, 0.0) + coeff

    scale = max((abs(c) for c in acc.values()), default=1.0)
    tol = drop_tol * max(1.0, scale)
    bad = max((abs(c.imag) for c in acc.values()), default=0.0)
    if bad > tol:
        raise HermiticityError(
            f"fermionic input is not Hermitian (imaginary residue {bad:.3e})"
        )
    kept = sorted(
        (word, c.real) for word, c in acc.items() if abs(c.real) > tol
    )
    if not kept:
        kept = [("I" * n_modes, 0.0)]
    return PauliHamiltonian(n_modes, tuple((c, w) for w, c in kept))


def _number_term(coeff: float, mode: int) -> FermionTerm:
    return FermionTerm(coeff, ((mode, True), (mode, False)))


def build_tqd(
    params: TqdParams,
    include_density_coupling: bool = False,
    bond_phases=None,
) -> PauliHamiltonian:
    """Six-mode triple-dot Hubbard model mapped onto six qubits.

    Modes are indexed 2*site + spin with spin 0 = up (sigma = +1/2) and
    spin 1 = down (sigma = -1/2).  The total Aharonov-Bohm phase
    2*pi*phi_per_b*B is split equally over the directed bonds
    0->1, 1->2, 2->0 unless explicit per-bond fractions are given.
    """
    n_modes = 6
    if bond_phases is None:
        total_flux = params.phi_per_b * params.b_field
        bond_phases = (total_flux / 3.0,) * 3
    if len(bond_phases) != 3:
        raise ValueError("need one phase per triangle bond")

    terms: list[FermionTerm] = []
    for site in range(3):
        for spin_idx, sigma in ((0, +0.5), (1, -0.5)):
            energy = params.e_site + params.g_star * MU_B_MEV_PER_T * params.b_field * sigma
            terms.append(_number_term(energy, 2 * site + spin_idx))
    bonds = ((0, 1), (1, 2), (2, 0))
    for (i, j), phi in zip(bonds, bond_phases):
        hop = params.t * np.exp(2j * np.pi * phi)
        for spin_idx in (0, 1):
            mi, mj = 2 * i + spin_idx, 2 * j + spin_idx
            terms.append(FermionTerm(hop, ((mi, True), (mj, False))))
            terms.append(FermionTerm(np.conj(hop), ((mj, True), (mi, False))))
    for site in range(3):
        up, down = 2 * site, 2 * site + 1
        terms.append(
            FermionTerm(params.u, ((down, True), (down, False), (up, True), (up, False)))
        )
    if include_density_coupling:
        for i in range(3):
            for j in range(i + 1, 3):
                for si in (0, 1):
                    for sj in (0, 1):
                        mi, mj = 2 * i + si, 2 * j + sj
                        terms.append(
                            FermionTerm(
                                params.v,
                                ((mi, True), (mi, False), (mj, True), (mj, False)),
                            )
                        )
    return jordan_wigner(terms, n_modes)


# ---------------------------------------------------------------------------
# text format: one "<coefficient> <word>" per line, '#' comments


def parse_pauli_text(text: str) -> PauliHamiltonian:
    terms: list[tuple[float, str]] = []
    seen: dict[str, int] = {}
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise PauliFileError(
                f"expected '<coefficient> <word>', got {raw.strip()!r}", lineno
            )
        coeff_tok, word = tokens
        try:
            coeff = float(coeff_tok)
        except ValueError:
            try:
                cval = complex(coeff_tok)
            except ValueError:
                raise PauliFileError(f"bad coefficient {coeff_tok!r}", lineno) from None
            if cval.imag != 0.0:
                raise HermiticityError(
                    f"line {lineno}: coefficient {coeff_tok!r} is not real"
                ) from None
            coeff = cval.real
        if any(c not in PAULI_CHARS for c in word):
            raise PauliFileError(f"bad Pauli word {word!r}", lineno)
        if width is None:
            width = len(word)
        elif len(word) != width:
            raise PauliFileError(
                f"word {word!r} has length {len(word)}, expected {width}", lineno
            )
        if word in seen:
            raise PauliFileError(
                f"duplicate word {word!r} (first seen on line {seen[word]})", lineno
            )
        seen[word] = lineno
        terms.append((coeff, word))
    if not terms:
        raise PauliFileError("no terms found")
    return PauliHamiltonian(width, tuple(terms))


def load_pauli_file(path) -> PauliHamiltonian:
    return parse_pauli_text(Path(path).read_text())


def save_pauli_file(h: PauliHamiltonian, path) -> None:
    lines = [f"{coeff!r} {word}" for coeff, word in h.terms]
    Path(path).write_text("\n".join(lines) + "\n")


BUNDLED_FILES = ("h2_two_qubit.txt", "lih_four_qubit.txt")


def load_bundled(name: str) -> PauliHamiltonian:
    """Load one of the example molecular-style files shipped with the package."""
    if name not in BUNDLED_FILES:
        raise ValueError(f"unknown bundled file {name!r}; have {BUNDLED_FILES}")
    text = importlib.resources.files("ucrbm").joinpath("data", name).read_text()
    return parse_pauli_text(text)


# ---------------------------------------------------------------------------
# matrix-free application and connected configurations


@dataclass(frozen=True)
class ConnectedStructure:
    """Words grouped by flip pattern for sparse row-wise application.

    For a bra configuration z, the matrix element against the flipped ket
    z' = z * flips[g] is sum over the group's words of pref * prod of z_i
    on the word's mask.
    """

    flips: np.ndarray = field(repr=False)  # (C, N) float64 in {+1, -1}
    flip_bits: np.ndarray = field(repr=False)  # (C,) int64 XOR masks on indices
    word_pref: np.ndarray = field(repr=False)  # (n_words,) complex128
    word_mask: np.ndarray = field(repr=False)  # (n_words, N) bool
    group_ptr: np.ndarray = field(repr=False)  # (C+1,) int64

    @property
    def n_groups(self) -> int:
        return self.flips.shape[0]

    def elements(self, zmat: np.ndarray) -> np.ndarray:
        """(K, C) matrix elements H(z, z*flip_g) for spin rows zmat."""
        bits = (1.0 - np.asarray(zmat, dtype=np.float64)) * 0.5
        parity = (bits @ self.word_mask.T.astype(np.float64)) % 2.0
        elem_words = (1.0 - 2.0 * parity) * self.word_pref[None, :]
        return np.add.reduceat(elem_words, self.group_ptr[:-1], axis=1)


@functools.lru_cache(maxsize=64)
def connected_structure(h: PauliHamiltonian) -> ConnectedStructure:
    n = h.n_qubits
    groups: dict[int, list[tuple[complex, np.ndarray]]] = {}
    for coeff, word in h.terms:
        flip_bits = 0
        mask = np.zeros(n, dtype=bool)
        n_y = 0
        for i, c in enumerate(word):
            if c in "XY":
                flip_bits |= 1 << (n - 1 - i)
            if c in "YZ":
                mask[i] = True
            if c == "Y":
                n_y += 1
        pref = coeff * (-1j) ** n_y
        groups.setdefault(flip_bits, []).append((pref, mask))

    order = sorted(groups)
    flips = np.ones((len(order), n), dtype=np.float64)
    prefs, masks, ptr = [], [], [0]
    for g, bitkey in enumerate(order):
        for i in range(n):
            if bitkey & (1 << (n - 1 - i)):
                flips[g, i] = -1.0
        for pref, mask in groups[bitkey]:
            prefs.append(pref)
            masks.append(mask)
        ptr.append(len(prefs))
    return ConnectedStructure(
        flips=flips,
        flip_bits=np.array(order, dtype=np.int64),
        word_pref=np.array(prefs, dtype=np.complex128),
        word_mask=np.array(masks, dtype=bool),
        group_ptr=np.array(ptr, dtype=np.int64),
    )


def connected_states(h: PauliHamiltonian, z) -> list[tuple[np.ndarray, complex]]:
    """Distinct flip patterns reachable from z with summed matrix elements."""
    z = as_spins(z)
    if z.shape[0] != h.n_qubits:
        raise ValueError("configuration length does not match the Hamiltonian")
    struct = connected_structure(h)
    elements = struct.elements(z[None, :].astype(np.float64))[0]
    out = []
    for g in range(struct.n_groups):
        out.append(((z * struct.flips[g]).astype(np.int8), complex(elements[g])))
    return out


def apply_h(h: PauliHamiltonian, state: StateVector) -> StateVector:
    """Matrix-free H|state> via per-word index permutations and phases."""
    if state.n_qubits != h.n_qubits:
        raise ValueError("state and Hamiltonian qubit counts differ")
    n = h.n_qubits
    dim = 1 << n
    amps = state.amplitudes
    idx = np.arange(dim)
    out = np.zeros(dim, dtype=np.complex128)
    zmat = all_spin_configs(n).astype(np.float64)
    for coeff, word in h.terms:
        flip_bits = 0
        char = np.ones(dim)
        n_y = 0
        for i, c in enumerate(word):
            if c in "XY":
                flip_bits |= 1 << (n - 1 - i)
            if c in "YZ":
                char *= zmat[:, i]
            if c == "Y":
                n_y += 1
        out[idx ^ flip_bits] += (coeff * (1j) ** n_y) * char * amps
    return StateVector(n, out)


def dense_matrix(h: PauliHamiltonian, cap: int = DENSE_CAP) -> np.ndarray:
    check_cap(h.n_qubits, cap, "dense matrix")
    dim = 1 << h.n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, word in h.terms:
        mat = np.ones((1, 1), dtype=np.complex128)
        for c in word:
            mat = np.kron(mat, _PAULI_MATS[c])
        out += coeff * mat
    return out


def exact_ground(h: PauliHamiltonian, cap: int = DENSE_CAP) -> tuple[float, StateVector]:
    """Lowest eigenvalue and a unit eigenvector of the dense Hermitian matrix.

    A degenerate ground space is resolved deterministically by projecting the
    lowest-index basis state with non-vanishing weight onto it; the global
    phase makes the largest-magnitude amplitude real positive.
    """
    check_cap(h.n_qubits, cap, "exact diagonalization")
    evals, evecs = np.linalg.eigh(dense_matrix(h, cap))
    e0 = float(evals[0])
    tol = 1e-9 * max(1.0, abs(e0))
    members = evecs[:, evals <= e0 + tol]
    weights = np.abs(members) ** 2
    candidate_mass = weights.sum(axis=1)
    k = int(np.argmax(candidate_mass > 1e-9))
    vec = members @ members[k].conj()
    vec /= np.linalg.norm(vec)
    j = int(np.argmax(np.abs(vec)))
    phase = vec[j] / abs(vec[j])
    vec = vec * phase.conj()
    return e0, StateVector(h.n_qubits, vec)
