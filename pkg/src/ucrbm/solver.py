"""Imaginary-time ground-state solver (stochastic reconfiguration).

Each step builds the SR system in the configured estimation mode, solves
the regularized linear system (A + lambda*I) delta = C, and advances the
flattened parameter vector by dtau * delta.  The two-stage initialization
first optimizes a bias-only product ansatz, then re-seeds the hidden
structure at the random-init scale.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateWeightError
from .estimators import (
    C_SIGN,
    SrSystem,
    compute_a_c_exact,
    compute_a_c_sampled,
    expectation_exact,
)
from .hamiltonians import PauliHamiltonian
from .rbm import RbmParams, VariationalIndex

MODES = ("exact", "vmc", "ensemble")


@dataclass(frozen=True)
class IteConfig:
    dtau: float = 0.01
    n_steps: int = 1000
    regularization: float = 1e-3
    mode: str = "exact"
    n_samples: int = 4096
    seed: int = 0
    mean_field_stage: bool = False
    mean_field_steps: int = 400
    convergence_window: int = 50
    convergence_threshold: float = 1e-8  # 0 disables early stopping
    n_threads: int = 1

    def __post_init__(self):
        if self.dtau <= 0:
            raise ValueError("dtau must be positive")
        if self.regularization < 0:
            raise ValueError("regularization must be non-negative")
        if self.n_steps < 1:
            raise ValueError("need at least one step")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class IteTrace:
    steps: np.ndarray
    taus: np.ndarray
    energies: np.ndarray
    std_errors: np.ndarray
    thetas: np.ndarray  # (n_steps, n_var) snapshot at which each energy was measured
    min_eig_a: np.ndarray
    max_eig_a: np.ndarray
    residuals: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.steps.shape[0]

    @property
    def final_energy(self) -> float:
        return float(self.energies[-1])


@dataclass(frozen=True)
class GradCheckReport:
    max_abs_deviation: float
    inferred_sign: float
    c: np.ndarray
    fd_gradient: np.ndarray


def sr_update(system: SrSystem, lam: float, dtau: float) -> tuple[np.ndarray, float]:
    """dtau * solve(A + lam*I, C) with an eigenvalue-truncated pseudo-inverse
    fallback (relative cutoff 1e-10) when the shifted matrix is not positive
    definite.  Returns (delta_theta, solve residual)."""
    a, c = system.a, system.c
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(c))):
        raise ValueError("non-finite stochastic-reconfiguration system")
    shifted = a + lam * np.eye(a.shape[0])
    try:
        np.linalg.cholesky(shifted)  # certify positive definiteness
        delta = np.linalg.solve(shifted, c)
    except np.linalg.LinAlgError:
        evals, evecs = np.linalg.eigh(shifted)
        cutoff = 1e-10 * max(float(np.abs(evals).max()), np.finfo(float).tiny)
        inv = np.where(evals > cutoff, 1.0 / np.where(evals > cutoff, evals, 1.0), 0.0)
        delta = evecs @ (inv * (evecs.T @ c))
    residual = float(np.linalg.norm(shifted @ delta - c))
    return dtau * delta, residual


def _build_system(params, h, cfg: IteConfig, step: int) -> SrSystem:
    if cfg.mode == "exact":
        return compute_a_c_exact(params, h)
    rng = np.random.default_rng([cfg.seed, step])
    try:
        return compute_a_c_sampled(
            params,
            h,
            cfg.n_samples,
            rng,
            mode=cfg.mode,
            n_threads=cfg.n_threads,
        )
    except DegenerateWeightError as exc:
        raise DegenerateWeightError(f"step {step}: {exc}") from exc


def ite_run(
    params0: RbmParams, h: PauliHamiltonian, cfg: IteConfig
) -> tuple[RbmParams, IteTrace]:
    """Run the imaginary-time loop; returns the final parameters and the
    per-step trace.  Stops early when the energy spread over the trailing
    convergence window falls below the threshold."""
    if params0.n_visible != h.n_qubits:
        raise ValueError("parameter count does not match the Hamiltonian")
    index = VariationalIndex.for_params(params0)
    theta = index.flatten(params0)
    params = params0

    records = {key: [] for key in (
        "step", "tau", "energy", "std_error", "theta", "min_eig", "max_eig", "residual"
    )}
    for step in range(cfg.n_steps):
        system = _build_system(params, h, cfg, step)
        evals = np.linalg.eigvalsh(system.a)
        delta, residual = sr_update(system, cfg.regularization, cfg.dtau)

        records["step"].append(step)
        records["tau"].append(step * cfg.dtau)
        records["energy"].append(system.energy.mean)
        records["std_error"].append(system.energy.std_error)
        records["theta"].append(theta.copy())
        records["min_eig"].append(float(evals[0]))
        records["max_eig"].append(float(evals[-1]))
        records["residual"].append(residual)

        theta = theta + delta
        params = index.unflatten(theta)

        window = cfg.convergence_window
        if cfg.convergence_threshold > 0 and len(records["energy"]) >= window:
            tail = records["energy"][-window:]
            if max(tail) - min(tail) < cfg.convergence_threshold:
                break

    trace = IteTrace(
        steps=np.array(records["step"], dtype=np.int64),
        taus=np.array(records["tau"]),
        energies=np.array(records["energy"]),
        std_errors=np.array(records["std_error"]),
        thetas=np.array(records["theta"]),
        min_eig_a=np.array(records["min_eig"]),
        max_eig_a=np.array(records["max_eig"]),
        residuals=np.array(records["residual"]),
    )
    return params, trace


def mean_field_stage(
    h: PauliHamiltonian,
    cfg: IteConfig,
    n_hidden: int | None = None,
    init_stddev: float = 0.1,
    unitary_coupled: bool = True,
) -> RbmParams:
    """Stage-one initialization: optimize a product state (biases only, no
    hidden units), then return parameters with the optimized biases, zero
    hidden biases, and freshly seeded couplings for the full stage-two run.

    The bias flow starts from the unbiased product state, so models without
    on-site fields keep their spin-flip symmetry instead of polarizing; a
    symmetry-broken product start would strand the stage-two run in a
    variational basin whose energy sits above the convergence band.
    """
    n = h.n_qubits
    m = n if n_hidden is None else n_hidden
    stage_cfg = replace(cfg, n_steps=cfg.mean_field_steps, mode="exact")
    start = RbmParams(
        b=np.zeros(n, dtype=np.complex128),
        m=np.zeros(0, dtype=np.complex128),
        w=np.zeros((n, 0), dtype=np.complex128),
        unitary_coupled=True,
    )
    product_params, _ = ite_run(start, h, stage_cfg)

    reseed = np.random.default_rng([cfg.seed, 0x5EED])
    index = VariationalIndex(n, m, unitary_coupled)
    vec = reseed.normal(0.0, init_stddev, size=index.size)
    fresh = index.unflatten(vec)
    return RbmParams(
        b=product_params.b,
        m=np.zeros(m, dtype=np.complex128),
        w=fresh.w,
        unitary_coupled=unitary_coupled,
    )


def grad_check(
    params: RbmParams, h: PauliHamiltonian, fd_step: float = 1e-5
) -> GradCheckReport:
    """Compare C against -1/2 the central finite-difference energy gradient
    and report the sign that turns the raw covariance into a descent update."""
    index = VariationalIndex.for_params(params)
    theta0 = index.flatten(params)
    system = compute_a_c_exact(params, h)

    grad = np.empty(index.size)
    for slot in range(index.size):
        bump = np.zeros(index.size)
        bump[slot] = fd_step
        e_plus = expectation_exact(index.unflatten(theta0 + bump), h).mean
        e_minus = expectation_exact(index.unflatten(theta0 - bump), h).mean
        grad[slot] = (e_plus - e_minus) / (2.0 * fd_step)

    deviation = float(np.max(np.abs(system.c - (-0.5) * grad)))
    raw_c = system.c / C_SIGN
    dot = float(raw_c @ grad)
    inferred = -1.0 if dot > 0 else (1.0 if dot < 0 else 0.0)
    return GradCheckReport(
        max_abs_deviation=deviation,
        inferred_sign=inferred,
        c=system.c,
        fd_gradient=grad,
    )


TRACE_HEADER = ("step", "tau", "energy", "std_error", "min_eig_A", "residual")


def export_trace_csv(trace: IteTrace, path) -> None:
    """CSV trace with floats at 17 significant digits (byte-stable reruns)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for k in range(trace.n_steps):
            writer.writerow(
                [
                    int(trace.steps[k]),
                    format(trace.taus[k], ".17g"),
                    format(trace.energies[k], ".17g"),
                    format(trace.std_errors[k], ".17g"),
                    format(trace.min_eig_a[k], ".17g"),
                    format(trace.residuals[k], ".17g"),
                ]
            )


def export_theta_snapshots(trace: IteTrace, path) -> None:
    """Sidecar parameter file: one flattened parameter vector per line."""
    with open(path, "w") as fh:
        for row in trace.thetas:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
