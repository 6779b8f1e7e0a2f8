"""Shared independent oracles for the test suite.

These deliberately avoid the library's own computational paths: amplitudes
come from explicit hidden-spin enumeration, operators from dense Kronecker
products of 2x2 matrices, and gradients from finite differences.
"""

import numpy as np

from ucrbm.spins import all_spin_configs

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SI = np.eye(2, dtype=complex)
PAULI = {"I": SI, "X": SX, "Y": SY, "Z": SZ}


def kron_chain(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_from_terms(terms, n):
    """Dense operator from (coefficient, word) pairs via Kronecker products."""
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for coeff, word in terms:
        out += coeff * kron_chain([PAULI[c] for c in word])
    return out


def brute_force_amplitudes(params):
    """Unnormalized visible amplitudes by summing over all hidden spin
    assignments of exp(energy function); equals 2^M times the closed form."""
    n, m = params.n_visible, params.n_hidden
    zmat = all_spin_configs(n).astype(float)
    hmat = all_spin_configs(m).astype(float)
    amps = np.zeros(1 << n, dtype=complex)
    for k in range(1 << n):
        z = zmat[k]
        total = 0.0 + 0.0j
        for hidx in range(1 << m):
            h = hmat[hidx]
            energy = z @ params.b + h @ params.m + z @ params.w @ h
            total += np.exp(energy)
        amps[k] = total
    return amps


def random_pauli_hamiltonian(rng, n, n_terms):
    """Random Hermitian Pauli sum with distinct words."""
    from ucrbm.hamiltonians import PauliHamiltonian

    words = set()
    while len(words) < n_terms:
        word = "".join(rng.choice(list("IXYZ")) for _ in range(n))
        words.add(word)
    terms = tuple((float(rng.normal()), w) for w in sorted(words))
    return PauliHamiltonian(n, terms)
