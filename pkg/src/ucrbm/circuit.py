"""Statevector emulation of the qubit-recycled state-preparation protocol.

One ancilla qubit is attached in |+>, entangled with all visible qubits by
a hidden-block phase unitary, measured in the X basis, and dropped - so M
hidden units never cost more than one extra qubit.  Accepting every
measurement outcome and reweighting by the classical factors R_s(Re m_j)^2
replaces post-selection; enumerating all 2^M outcome histories gives the
exact branch decomposition used by the verification routines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericalIntegrityError, ProtocolOrderError, SizeCapError
from .rbm import DEFAULT_STATEVECTOR_CAP, RbmParams, r_factor
from .spins import all_spin_configs
from .statevector import StateVector, check_cap

DEFAULT_HIDDEN_CAP = 12

_ANCILLA_PLUS_TOL = 1e-10
_PROB_SUM_TOL = 1e-8


@dataclass(frozen=True)
class EnsembleSample:
    """One protocol run: outcome history, its probability, and the classical
    reweighting factor prod_j R_{s_j}(Re m_j)^2."""

    s: np.ndarray  # (M,) int8 of +1/-1
    branch_prob: float
    weight: float
    visible_state: StateVector
    z_shots: np.ndarray | None = None  # optional (shots, N) int8
    nonunitary_norm: float = 1.0  # product of renormalization factors, 1 when unitary


@dataclass(frozen=True)
class BranchTable:
    """All 2^M outcome histories of the protocol for one parameter set."""

    s: np.ndarray  # (2^M, M) int8
    branch_probs: np.ndarray  # (2^M,)
    weights: np.ndarray  # (2^M,)
    states: tuple[StateVector, ...]  # zero vectors mark unreachable branches
    nonunitary_norms: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.nonunitary_norms is None:
            object.__setattr__(
                self, "nonunitary_norms", np.ones_like(self.branch_probs)
            )
        total = float(self.branch_probs.sum())
        if abs(total - 1.0) > 1e-10:
            raise NumericalIntegrityError(
                f"branch probabilities sum to {total!r}, expected 1"
            )


@dataclass(frozen=True)
class EnsembleIdentityReport:
    branch_prob_sum_error: float
    odd_cross_max: float
    even_pair_max: float
    success_prob_lhs: float
    success_prob_rhs: float
    success_prob_error: float

    def max_violation(self) -> float:
        return max(self.odd_cross_max, self.even_pair_max, self.success_prob_error)


def prepare_visible_product(params: RbmParams) -> StateVector:
    """Product state with per-qubit amplitudes (e^{b_i}, e^{-b_i}), each qubit
    normalized - the non-unitary bias realized as a single-qubit rotation."""
    amps = np.ones(1, dtype=np.complex128)
    for b_i in params.b:
        pair = np.array([np.exp(b_i), np.exp(-b_i)])
        amps = np.kron(amps, pair / np.linalg.norm(pair))
    return StateVector(params.n_visible, amps)


def block_phases(params: RbmParams, j: int) -> np.ndarray:
    """phi_j(z) = Im(m_j) + sum_i Im(w_ij) z_i over all 2^N configurations."""
    zmat = all_spin_configs(params.n_visible).astype(np.float64)
    return params.m[j].imag + zmat @ params.w[:, j].imag


def apply_hidden_block(
    state: StateVector, params: RbmParams, j: int
) -> tuple[StateVector, float]:
    """Entangle the ancilla (last qubit) with all visible qubits.

    Applies exp(i*(Im m_j + sum_i Im w_ij v_i^z) * h^z): one ancilla Z phase
    plus N ZZ phases.  Unrestricted couplings additionally apply the
    non-unitary factor exp(sum_i Re w_ij v_i^z h^z) followed by explicit
    renormalization; the squared pre-normalization norm is returned as the
    side value (1.0 for the unitary case).

    The ancilla must still be in |+> - i.e. this block must come right after
    attaching a fresh ancilla.
    """
    n = params.n_visible
    if state.n_qubits != n + 1:
        raise ValueError("expected a visible register plus one ancilla")
    if not 0 <= j < params.n_hidden:
        raise ValueError(f"hidden index {j} out of range")
    grid = state.amplitudes.reshape(1 << n, 2)
    if np.linalg.norm(grid[:, 0] - grid[:, 1]) > _ANCILLA_PLUS_TOL * max(state.norm, 1e-300):
        raise ProtocolOrderError(
            "ancilla is not in |+>; attach a fresh ancilla before each hidden block"
        )
    phi = block_phases(params, j)
    phase = np.exp(1j * phi)
    new = np.empty_like(grid)
    new[:, 0] = grid[:, 0] * phase
    new[:, 1] = grid[:, 1] * phase.conj()
    norm_sq = 1.0
    if not params.unitary_coupled:
        g = all_spin_configs(n).astype(np.float64) @ params.w[:, j].real
        new[:, 0] *= np.exp(g)
        new[:, 1] *= np.exp(-g)
        norm_sq = float(np.linalg.norm(new) ** 2)
        new /= np.sqrt(norm_sq)
    return StateVector(n + 1, new.reshape(-1)), norm_sq


def project_hidden_outcome(state: StateVector, s: int) -> tuple[StateVector, float]:
    """Project the ancilla onto |s> of the X basis and drop it.

    Returns the renormalized visible state and the Born probability; a
    zero-probability outcome yields the zero vector.
    """
    if s not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    n = state.n_qubits - 1
    grid = state.amplitudes.reshape(1 << n, 2)
    amps = (grid[:, 0] + s * grid[:, 1]) / np.sqrt(2.0)
    prob = float(np.linalg.norm(amps) ** 2)
    if prob > 0.0:
        amps = amps / np.sqrt(prob)
    return StateVector(n, amps), prob


def sample_hidden_outcome(
    state: StateVector, rng: np.random.Generator
) -> tuple[int, StateVector, float]:
    """X-basis measurement of the ancilla: outcome, collapsed visible state,
    and the outcome's Born probability."""
    plus_state, p_plus = project_hidden_outcome(state, 1)
    minus_state, p_minus = project_hidden_outcome(state, -1)
    if abs(p_plus + p_minus - 1.0) > _PROB_SUM_TOL:
        raise NumericalIntegrityError(
            f"measurement probabilities sum to {p_plus + p_minus!r}"
        )
    if rng.random() < p_plus:
        return 1, plus_state, p_plus
    return -1, minus_state, p_minus


def run_recycle_protocol(
    params: RbmParams,
    rng: np.random.Generator,
    shots: int = 0,
    cap: int = DEFAULT_STATEVECTOR_CAP,
) -> EnsembleSample:
    """Execute one full protocol run: visible preparation, then for each
    hidden unit attach a fresh ancilla, entangle, measure, recycle."""
    if not params.unitary_coupled:
        raise ValueError(
            "the sampling path requires unitary couplings; unrestricted Re(w) "
            "is supported only by the deterministic branch enumeration"
        )
    check_cap(params.n_visible + 1, cap)
    state = prepare_visible_product(params)
    outcomes = np.empty(params.n_hidden, dtype=np.int8)
    branch_prob = 1.0
    for j in range(params.n_hidden):
        blocked, _ = apply_hidden_block(state.with_plus_ancilla(), params, j)
        s, state, p_j = sample_hidden_outcome(blocked, rng)
        outcomes[j] = s
        branch_prob *= p_j
    weight = 1.0
    for j in range(params.n_hidden):
        weight *= r_factor(params.m[j].real, int(outcomes[j])) ** 2
    z_shots = measure_visible(state, shots, rng) if shots else None
    return EnsembleSample(
        s=outcomes,
        branch_prob=branch_prob,
        weight=weight,
        visible_state=state,
        z_shots=z_shots,
    )


def enumerate_branches(
    params: RbmParams,
    hidden_cap: int = DEFAULT_HIDDEN_CAP,
    cap: int = DEFAULT_STATEVECTOR_CAP,
) -> BranchTable:
    """Deterministically replay the protocol for all 2^M forced outcome
    histories, reusing shared prefixes of the gate path."""
    m_hidden = params.n_hidden
    if m_hidden > hidden_cap:
        raise SizeCapError(
            f"{m_hidden} hidden units exceed the branch cap of {hidden_cap}"
        )
    check_cap(params.n_visible + 1, cap)

    rows: list[tuple[np.ndarray, float, float, StateVector, float]] = []

    def walk(j: int, state: StateVector, prefix, prob: float, nonunit: float):
        if j == m_hidden:
            s_vec = np.array(prefix, dtype=np.int8)
            weight = 1.0
            for jj in range(m_hidden):
                weight *= r_factor(params.m[jj].real, int(s_vec[jj])) ** 2
            rows.append((s_vec, prob, weight, state, nonunit))
            return
        if prob == 0.0:
            # unreachable subtree: emit zero rows for all completions
            dim = 1 << params.n_visible
            zero = StateVector(params.n_visible, np.zeros(dim, dtype=np.complex128))
            for tail in all_spin_configs(m_hidden - j):
                s_vec = np.array(list(prefix) + list(tail), dtype=np.int8)
                weight = 1.0
                for jj in range(m_hidden):
                    weight *= r_factor(params.m[jj].real, int(s_vec[jj])) ** 2
                rows.append((s_vec, 0.0, weight, zero, nonunit))
            return
        blocked, norm_sq = apply_hidden_block(state.with_plus_ancilla(), params, j)
        for s in (1, -1):
            collapsed, p_j = project_hidden_outcome(blocked, s)
            walk(j + 1, collapsed, prefix + [s], prob * p_j, nonunit * norm_sq)

    walk(0, prepare_visible_product(params), [], 1.0, 1.0)
    rows.sort(key=lambda row: tuple(-row[0]))  # (+,...,+) first, index order
    return BranchTable(
        s=np.array([r[0] for r in rows], dtype=np.int8),
        branch_probs=np.array([r[1] for r in rows]),
        weights=np.array([r[2] for r in rows]),
        states=tuple(r[3] for r in rows),
        nonunitary_norms=np.array([r[4] for r in rows]),
    )


def recombined_statevector(params: RbmParams, table: BranchTable) -> StateVector:
    """Reassemble the closed-form state from the branch decomposition:
    sum_s R-product * sqrt(branch amplitude norm) * |Psi_v^s>, normalized."""
    dim = 1 << params.n_visible
    acc = np.zeros(dim, dtype=np.complex128)
    for row in range(table.s.shape[0]):
        if table.branch_probs[row] == 0.0:
            continue
        r_prod = 1.0
        for j in range(params.n_hidden):
            r_prod *= r_factor(params.m[j].real, int(table.s[row, j]))
        scale = np.sqrt(table.branch_probs[row] * table.nonunitary_norms[row])
        acc += r_prod * scale * table.states[row].amplitudes
    return StateVector(params.n_visible, acc).normalized()


def measure_visible(
    state: StateVector, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Born-rule samples from |amplitude|^2, returned as (shots, N) spins."""
    if abs(state.norm - 1.0) > 1e-8:
        raise ValueError("measure_visible expects a normalized state")
    probs = state.probabilities()
    probs = probs / probs.sum()
    idx = rng.choice(probs.shape[0], size=shots, p=probs)
    zmat = all_spin_configs(state.n_qubits)
    return zmat[idx]


# ---------------------------------------------------------------------------
# ensemble identity verification


def _extended_amplitudes(params: RbmParams) -> np.ndarray:
    """(2^N, 2^M) amplitudes of the unnormalized (N+M)-qubit state built by
    applying exp of the coupled-bias operator to |+...+> on all qubits."""
    n, m = params.n_visible, params.n_hidden
    zv = all_spin_configs(n).astype(np.float64)
    zh = all_spin_configs(m).astype(np.float64)
    expo = (zv @ params.b)[:, None] + (zh @ params.m)[None, :] + zv @ params.w @ zh.T
    return np.exp(expo) / np.sqrt(2.0 ** (n + m))


def verify_ensemble_identities(
    params: RbmParams,
    hidden_cap: int = 8,
    cap: int = DEFAULT_STATEVECTOR_CAP,
) -> EnsembleIdentityReport:
    """Dense checks of the branch-ensemble identities.

    (a) for outcome histories differing in an odd number of slots, the
        symmetrized per-configuration cross term vanishes;
    (b) for an even number K >= 2 of differing slots, the cross term cancels
        against the partner pair obtained by flipping the first differing
        slot in both histories;
    (c) the post-selection success probability of the extended state equals
        sum_s branch_prob * weight (computed on completely independent
        routes: brute-force (N+M)-qubit construction vs protocol replay).
    """
    if not params.unitary_coupled:
        raise ValueError("ensemble identities hold for unitary couplings only")
    table = enumerate_branches(params, hidden_cap=hidden_cap, cap=cap)
    m_hidden = params.n_hidden
    n_branches = table.s.shape[0]

    # branch amplitudes relative to the normalized visible preparation
    amp = np.stack(
        [
            np.sqrt(table.branch_probs[r] * table.nonunitary_norms[r])
            * table.states[r].amplitudes
            for r in range(n_branches)
        ]
    )

    odd_max = 0.0
    even_max = 0.0
    row_of = {tuple(int(v) for v in table.s[r]): r for r in range(n_branches)}
    for r1 in range(n_branches):
        for r2 in range(n_branches):
            if r1 == r2:
                continue
            diff = np.nonzero(table.s[r1] != table.s[r2])[0]
            k = diff.shape[0]
            cross = np.conj(amp[r2]) * amp[r1]
            if k % 2 == 1:
                odd_max = max(odd_max, float(np.max(np.abs(2.0 * cross.real))))
            else:
                q = int(diff[0])
                t1 = list(int(v) for v in table.s[r1])
                t2 = list(int(v) for v in table.s[r2])
                t1[q] = -t1[q]
                t2[q] = -t2[q]
                partner = np.conj(amp[row_of[tuple(t2)]]) * amp[row_of[tuple(t1)]]
                even_max = max(even_max, float(np.max(np.abs(cross + partner))))

    # (c) success-probability decomposition
    prep_norm_sq = float(np.prod(np.cosh(2.0 * params.b.real)))
    lhs = prep_norm_sq * float(np.sum(table.branch_probs * table.weights))
    ext = _extended_amplitudes(params)
    projected = ext.sum(axis=1) / np.sqrt(2.0**m_hidden)
    rhs = float(np.sum(np.abs(projected) ** 2))

    return EnsembleIdentityReport(
        branch_prob_sum_error=abs(float(table.branch_probs.sum()) - 1.0),
        odd_cross_max=odd_max,
        even_pair_max=even_max,
        success_prob_lhs=lhs,
        success_prob_rhs=rhs,
        success_prob_error=abs(lhs - rhs),
    )


# ---------------------------------------------------------------------------
# batched sampling front-end used by the estimators


def protocol_sampling_tables(params: RbmParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precomputed (psi0, cos phi, sin phi) tables for the batch sampler."""
    psi0 = prepare_visible_product(params).amplitudes
    zmat = all_spin_configs(params.n_visible).astype(np.float64)
    phi = params.m.imag[:, None] + (zmat @ params.w.imag).T
    return psi0, np.cos(phi), np.sin(phi)


def sample_protocol_batch(
    params: RbmParams,
    n_runs: int,
    rng: np.random.Generator,
    tables=None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw n_runs protocol runs, one visible measurement each.

    Returns (outcomes (n_runs, M) int8, measured spins (n_runs, N) int8,
    weights (n_runs,)).  Uniform variates are drawn up front so the numba
    and numpy kernel lanes see identical randomness.
    """
    if not params.unitary_coupled:
        raise ValueError("batched protocol sampling requires unitary couplings")
    check_cap(params.n_visible + 1, DEFAULT_STATEVECTOR_CAP)
    psi0, cosphi, sinphi = tables if tables is not None else protocol_sampling_tables(params)
    u_block = rng.random((n_runs, params.n_hidden))
    u_meas = rng.random(n_runs)
    s_out, z_idx, _ = _kernels.recycle_sample_batch(psi0, cosphi, sinphi, u_block, u_meas)
    zmat = all_spin_configs(params.n_visible)[z_idx]
    r_vals = np.where(
        s_out == 1, np.cosh(params.m.real)[None, :], np.sinh(params.m.real)[None, :]
    )
    weights = np.prod(r_vals**2, axis=1)
    return s_out, zmat, weights
