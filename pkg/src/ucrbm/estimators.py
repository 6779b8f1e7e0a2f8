"""Exact and Monte Carlo estimators for observables and the stochastic
reconfiguration system.

Three estimation modes share one accumulation path:

* ``exact``    - complete enumeration weighted by |<z|Psi>|^2;
* ``vmc``      - i.i.d. computational-basis samples drawn from the exact
  statevector (a desk-scale stand-in for projective measurements);
* ``ensemble`` - protocol runs accepted for every hidden outcome and
  reweighted by prod_j R^2_{s_j}; estimators are self-normalized ratios.

Every sampled quantity (all A entries, the C vector, and the energy) is
accumulated from the same sample stream: one state preparation per sample.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .circuit import protocol_sampling_tables, sample_protocol_batch
from .errors import DegenerateWeightError, NumericalIntegrityError
from .hamiltonians import PauliHamiltonian, apply_h, connected_states, connected_structure
from .rbm import (
    DEFAULT_STATEVECTOR_CAP,
    RbmParams,
    exact_statevector,
    log_amplitude,
    log_derivatives_batch,
)
from .spins import all_spin_configs, as_spins, spins_to_string, string_to_spins

# Sign relating the raw covariance Re(<O_m^dag H> - <O_m^dag><H>) to the
# update direction: fixed once by the finite-difference gradient validation
# (C equals -1/2 of the energy gradient), asserted in the test suite.
C_SIGN = -1.0

CHUNK_SIZE = 4096

MODES = ("exact", "vmc", "ensemble")


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n_samples: int
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode != "exact" and self.n_samples < 1:
            raise ValueError("sampled estimates need at least one sample")


@dataclass
class SrSystem:
    """Stochastic-reconfiguration system: A delta-theta = C at one point."""

    a: np.ndarray
    c: np.ndarray
    energy: Estimate
    n_preparations: int = 0

    def __post_init__(self):
        if self.a.shape != (self.c.shape[0], self.c.shape[0]):
            raise ValueError("A/C dimensions are inconsistent")
        asym = float(np.max(np.abs(self.a - self.a.T), initial=0.0))
        if asym > 1e-10:
            raise NumericalIntegrityError(f"A is asymmetric by {asym:.3e}")


def local_observable(params: RbmParams, z, h: PauliHamiltonian) -> complex:
    """sum over connected z' of H(z, z') psi(z')/psi(z), via log-amplitude
    differences over the <= n_terms connected configurations."""
    z = as_spins(z)
    base = log_amplitude(params, z)
    total = 0.0 + 0.0j
    for z_prime, element in connected_states(h, z):
        if element == 0.0:
            continue
        total += element * np.exp(log_amplitude(params, z_prime) - base)
    return total


def expectation_exact(
    params: RbmParams, h: PauliHamiltonian, cap: int = DEFAULT_STATEVECTOR_CAP
) -> Estimate:
    """<Psi|H|Psi> by dense statevector and matrix-free application."""
    psi = exact_statevector(params, cap)
    value = complex(np.vdot(psi.amplitudes, apply_h(h, psi).amplitudes))
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        raise NumericalIntegrityError(
            f"imaginary residue {value.imag!r} for a Hermitian observable"
        )
    return Estimate(mean=float(value.real), std_error=0.0, n_samples=0, mode="exact")


# ---------------------------------------------------------------------------
# sample generation (deterministic chunked streams, thread-parallel)


def _chunk_rngs(rng: np.random.Generator, n_chunks: int) -> list[np.random.Generator]:
    base = int(rng.integers(0, 2**62))
    return [np.random.default_rng([base, i]) for i in range(n_chunks)]


def _chunk_sizes(n: int) -> list[int]:
    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)
    return sizes


def _run_chunks(worker, chunk_args, n_threads: int):
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            return list(pool.map(worker, chunk_args))
    return [worker(args) for args in chunk_args]


def _draw_vmc(params, n_samples, rng, cap, n_threads):
    probs = exact_statevector(params, cap).probabilities()
    probs = probs / probs.sum()
    zmat_all = all_spin_configs(params.n_visible)
    sizes = _chunk_sizes(n_samples)
    rngs = _chunk_rngs(rng, len(sizes))

    def worker(args):
        size, chunk_rng = args
        idx = chunk_rng.choice(probs.shape[0], size=size, p=probs)
        return zmat_all[idx]

    chunks = _run_chunks(worker, list(zip(sizes, rngs)), n_threads)
    zmat = np.concatenate(chunks, axis=0)
    return None, zmat, np.ones(n_samples), n_samples


def _draw_ensemble(params, n_samples, rng, n_threads):
    tables = protocol_sampling_tables(params)
    sizes = _chunk_sizes(n_samples)
    rngs = _chunk_rngs(rng, len(sizes))

    def worker(args):
        size, chunk_rng = args
        return sample_protocol_batch(params, size, chunk_rng, tables=tables)

    chunks = _run_chunks(worker, list(zip(sizes, rngs)), n_threads)
    smat = np.concatenate([c[0] for c in chunks], axis=0)
    zmat = np.concatenate([c[1] for c in chunks], axis=0)
    weights = np.concatenate([c[2] for c in chunks])
    return smat, zmat, weights, n_samples


def _draw_samples(params, h, n_samples, rng, mode, cap, n_threads):
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if mode == "vmc":
        return _draw_vmc(params, n_samples, rng, cap, n_threads)
    if mode == "ensemble":
        if not params.unitary_coupled:
            raise ValueError("the ensemble mode requires unitary couplings")
        return _draw_ensemble(params, n_samples, rng, n_threads)
    raise ValueError(f"unknown sampling mode {mode!r}")


def _local_energies(params, h, zmat) -> np.ndarray:
    struct = connected_structure(h)
    return _kernels.local_energy_batch(
        np.ascontiguousarray(zmat, dtype=np.float64),
        params.b,
        params.m,
        params.w,
        struct.flips,
        struct.word_pref,
        struct.word_mask,
        struct.group_ptr,
    )


def _energy_estimate(eloc_real, weights, weight_sum, mode, n_samples) -> Estimate:
    mean = float(weights @ eloc_real / weight_sum)
    if mode == "exact":
        return Estimate(mean=mean, std_error=0.0, n_samples=0, mode="exact")
    if mode == "vmc":
        k = eloc_real.shape[0]
        var = float(np.var(eloc_real, ddof=1)) if k > 1 else 0.0
        return Estimate(mean, np.sqrt(var / k), n_samples, "vmc")
    resid = weights * (eloc_real - mean)
    se = float(np.sqrt(resid @ resid)) / weight_sum
    return Estimate(mean, se, n_samples, "ensemble")


def _check_weights(weights) -> float:
    weight_sum = float(weights.sum())
    if weight_sum <= 0.0:
        raise DegenerateWeightError(
            "all sample weights vanished; increase the number of samples"
        )
    return weight_sum


def expectation_vmc(
    params: RbmParams,
    h: PauliHamiltonian,
    n_samples: int,
    rng: np.random.Generator,
    cap: int = DEFAULT_STATEVECTOR_CAP,
    n_threads: int = 1,
) -> Estimate:
    """Mean local observable over z ~ |<z|Psi>|^2 with i.i.d. errors."""
    _, zmat, weights, _ = _draw_samples(params, h, n_samples, rng, "vmc", cap, n_threads)
    eloc = _local_energies(params, h, zmat).real
    return _energy_estimate(eloc, weights, _check_weights(weights), "vmc", n_samples)


def expectation_ensemble(
    params: RbmParams,
    h: PauliHamiltonian,
    n_samples: int,
    rng: np.random.Generator,
    cap: int = DEFAULT_STATEVECTOR_CAP,
    n_threads: int = 1,
) -> Estimate:
    """Self-normalized estimator over protocol runs: the weighted mean of
    local observables with weights prod_j R^2_{s_j}, ratio standard error."""
    _, zmat, weights, _ = _draw_samples(
        params, h, n_samples, rng, "ensemble", cap, n_threads
    )
    eloc = _local_energies(params, h, zmat).real
    return _energy_estimate(eloc, weights, _check_weights(weights), "ensemble", n_samples)


# ---------------------------------------------------------------------------
# stochastic-reconfiguration system


def _assemble_system(params, h, zmat, weights, mode, n_samples, n_preparations):
    weight_sum = _check_weights(weights)
    wn = weights / weight_sum
    o_mat = log_derivatives_batch(params, np.asarray(zmat, dtype=np.float64))
    eloc = _local_energies(params, h, zmat)

    mean_o = wn @ o_mat
    cov = (o_mat.conj() * wn[:, None]).T @ o_mat
    a = (cov - np.outer(mean_o.conj(), mean_o)).real
    a = 0.5 * (a + a.T)

    mean_e = complex(wn @ eloc)
    mean_oe = (wn[:, None] * o_mat.conj() * eloc[:, None]).sum(axis=0)
    c = C_SIGN * (mean_oe - mean_o.conj() * mean_e).real

    energy = _energy_estimate(eloc.real, weights, weight_sum, mode, n_samples)
    return SrSystem(a=a, c=c, energy=energy, n_preparations=n_preparations)


def compute_a_c_exact(
    params: RbmParams, h: PauliHamiltonian, cap: int = DEFAULT_STATEVECTOR_CAP
) -> SrSystem:
    """A and C with expectations taken over the exact statevector."""
    psi = exact_statevector(params, cap)
    zmat = all_spin_configs(params.n_visible)
    return _assemble_system(params, h, zmat, psi.probabilities(), "exact", 0, 0)


def compute_a_c_sampled(
    params: RbmParams,
    h: PauliHamiltonian,
    n_samples: int,
    rng: np.random.Generator,
    mode: str = "vmc",
    cap: int = DEFAULT_STATEVECTOR_CAP,
    n_threads: int = 1,
    sample_log=None,
) -> SrSystem:
    """A, C, and the energy accumulated from one shared sample stream.

    Per sample the derivative vector is evaluated once and every A entry,
    every C entry, and the energy are updated from it - exactly one state
    preparation per sample, reported in ``n_preparations``.  When
    ``sample_log`` is given, the records are written there for replay.
    """
    smat, zmat, weights, n_preps = _draw_samples(
        params, h, n_samples, rng, mode, cap, n_threads
    )
    if sample_log is not None:
        write_sample_log(sample_log, smat, zmat, weights)
    return _assemble_system(params, h, zmat, weights, mode, n_samples, n_preps)


def compute_a_c_from_log(params: RbmParams, h: PauliHamiltonian, path) -> SrSystem:
    """Replay a recorded sample log; bit-identical to the original system."""
    smat, zmat, weights = read_sample_log(path)
    mode = "vmc" if smat is None else "ensemble"
    return _assemble_system(
        params, h, zmat, weights, mode, zmat.shape[0], zmat.shape[0]
    )


# ---------------------------------------------------------------------------
# sample log: one "<s-string> <z-string> <weight>" record per line; the
# s field is "." for modes without hidden outcomes


def write_sample_log(path, smat, zmat, weights) -> None:
    lines = []
    for k in range(zmat.shape[0]):
        s_str = "." if smat is None else spins_to_string(smat[k])
        lines.append(f"{s_str} {spins_to_string(zmat[k])} {float(weights[k])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_sample_log(path):
    s_rows, z_rows, weights = [], [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise ValueError(f"sample log line {lineno}: expected 3 fields")
        s_tok, z_tok, w_tok = tokens
        s_rows.append(None if s_tok == "." else string_to_spins(s_tok))
        z_rows.append(string_to_spins(z_tok))
        weights.append(float(w_tok))
    if not z_rows:
        raise ValueError("empty sample log")
    smat = None if s_rows[0] is None else np.stack(s_rows)
    return smat, np.stack(z_rows), np.array(weights)
