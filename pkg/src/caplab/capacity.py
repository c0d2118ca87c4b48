"""Capacity optimizers.

``compute_ce`` maximizes the channel mutual information over input states
parameterized as ``rho(H) = exp(H) / Tr exp(H)``. The objective is concave in
``rho``, so every restart should land on the same value; disagreement is
reported through ``CapacityResult.converged`` rather than raised.

``compute_one_shot_c1`` searches pure-state ensembles for the largest Holevo
quantity of the channel outputs. That problem is not concave and the result
is only ever a lower bound.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from caplab._pool import parallel_map
from caplab.channels import QuantumChannel, apply, complementary, standard_channel
from caplab.entropy import (
    Ensemble,
    holevo_chi,
    holevo_chi_arrays,
    mutual_information,
    mutual_information_array,
    pure_vectors,
    von_neumann_entropy,
)
from caplab.qmat import DensityMatrix

log = logging.getLogger(__name__)

RESTART_AGREEMENT = 1e-6
ARMIJO = 1e-4


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 2000
    step_tolerance: float = 1e-9
    seed: int = 0
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if not self.step_tolerance > 0 or not self.fd_step > 0:
            raise ValueError("step_tolerance and fd_step must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True, eq=False)
class CapacityResult:
    value_bits: float
    optimizer_state: DensityMatrix | Ensemble
    iterations: int
    restarts_used: int
    converged: bool
    gradient_norm_final: float
    lower_bound_only: bool = False
    restart_values: tuple[float, ...] = ()
    restart_states: tuple = field(default=(), repr=False)


class AscentResult(NamedTuple):
    x: np.ndarray
    value: float
    iterations: int
    gradient_norm: float
    stopped: bool  # stopping rule met before max_iters


def fd_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def gradient_ascent(f: Callable[[np.ndarray], float], x0: np.ndarray,
                    cfg: OptimizerConfig, patience: int = 3) -> AscentResult:
    """Finite-difference gradient ascent with Armijo backtracking.

    Trial step lengths come from the Barzilai-Borwein formula; backtracking
    keeps the iteration monotone. Stops once ``patience`` consecutive steps
    each gain less than ``cfg.step_tolerance``.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    g = fd_gradient(f, x, cfg.fd_step)
    t = 1.0
    quiet = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        gg = float(g @ g)
        if gg < 1e-24:
            return AscentResult(x, fx, it - 1, float(np.sqrt(gg)), True)
        while True:
            x_new = x + t * g
            f_new = f(x_new)
            if f_new >= fx + ARMIJO * t * gg:
                break
            t *= 0.5
            if t < 1e-14:
                break
        if not f_new > fx:
            # no ascent direction is left at this resolution
            return AscentResult(x, fx, it, float(np.sqrt(gg)), True)
        g_new = fd_gradient(f, x_new, cfg.fd_step)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        gain = f_new - fx
        x, fx, g = x_new, f_new, g_new
        t = float(s @ s) / -sy if sy < 0 else 2.0 * t
        t = min(max(t, 1e-8), 1e4)
        quiet = quiet + 1 if gain < cfg.step_tolerance else 0
        if quiet >= patience:
            return AscentResult(x, fx, it, float(np.linalg.norm(g)), True)
    return AscentResult(x, fx, it, float(np.linalg.norm(g)), False)


# --- C_E -----------------------------------------------------------------

def hermitian_from_params(x: np.ndarray, d: int) -> np.ndarray:
    """Hermitian matrix from d^2 reals: diagonal, then real and imaginary upper parts."""
    h = np.diag(x[:d]).astype(complex)
    iu = np.triu_indices(d, 1)
    n = len(iu[0])
    upper = x[d:d + n] + 1j * x[d + n:d + 2 * n]
    h[iu] = upper
    h[(iu[1], iu[0])] = upper.conj()
    return h


def state_from_params(x: np.ndarray, d: int) -> np.ndarray:
    """``exp(H) / Tr exp(H)`` via the eigendecomposition of H."""
    e, u = np.linalg.eigh(hermitian_from_params(x, d))
    w = np.exp(e - e.max())
    w /= w.sum()
    return (u * w) @ u.conj().T


def _ce_restart(kraus: np.ndarray, d: int, cfg: OptimizerConfig, index: int) -> AscentResult:
    rng = np.random.default_rng(cfg.seed + index)
    # restart 0 starts at the maximally mixed input
    x0 = np.zeros(d * d) if index == 0 else rng.normal(size=d * d)
    return gradient_ascent(lambda x: mutual_information_array(kraus, state_from_params(x, d)),
                           x0, cfg)


def compute_ce(ch: QuantumChannel, cfg: OptimizerConfig | None = None) -> CapacityResult:
    """Entanglement-assisted classical capacity in bits."""
    cfg = cfg or OptimizerConfig()
    d = ch.dim_in
    runs = [_ce_restart(ch.kraus, d, cfg, i) for i in range(cfg.restarts)]
    values = [r.value for r in runs]
    best = int(np.argmax(values))
    states = tuple(DensityMatrix(state_from_params(r.x, d)) for r in runs)
    rho = states[best]
    value = mutual_information(ch, rho)
    spread = max(values) - min(values)
    converged = spread <= RESTART_AGREEMENT and runs[best].stopped
    if not converged:
        log.warning("C_E restarts disagree by %.3e bits for %r", spread, ch)
    return CapacityResult(
        value_bits=value,
        optimizer_state=rho,
        iterations=sum(r.iterations for r in runs),
        restarts_used=cfg.restarts,
        converged=converged,
        gradient_norm_final=runs[best].gradient_norm,
        restart_values=tuple(values),
        restart_states=states,
    )


# --- C_1 -----------------------------------------------------------------

def _ensemble_from_params(x: np.ndarray, d: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    n = 2 * d * m
    v = (x[:n:2] + 1j * x[1:n:2]).reshape(m, d)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    w = x[n:] ** 2
    return w / w.sum(), v


def _c1_objective(kraus: np.ndarray, d: int, m: int) -> Callable[[np.ndarray], float]:
    def f(x: np.ndarray) -> float:
        p, v = _ensemble_from_params(x, d, m)
        rhos = np.einsum("ia,ib->iab", v, v.conj())
        outs = np.einsum("kab,ibc,kdc->iad", kraus, rhos, kraus.conj())
        return holevo_chi_arrays(p, outs)
    return f


def compute_one_shot_c1(ch: QuantumChannel, cfg: OptimizerConfig | None = None) -> CapacityResult:
    """Lower bound on the one-shot unassisted (Holevo) capacity, in bits.

    Searches ensembles of ``dim_in**2`` pure inputs with a local ascent from
    ``cfg.restarts`` random starts.
    """
    cfg = cfg or OptimizerConfig()
    d = ch.dim_in
    m = d * d
    f = _c1_objective(ch.kraus, d, m)
    runs = []
    for i in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + i)
        x0 = np.concatenate([rng.normal(size=2 * d * m), 1.0 + 0.1 * rng.normal(size=m)])
        runs.append(gradient_ascent(f, x0, cfg))
    best = max(range(len(runs)), key=lambda i: runs[i].value)
    p, v = _ensemble_from_params(runs[best].x, d, m)
    inputs = Ensemble.from_vectors(p / p.sum(), v)
    value = holevo_chi(inputs.map(lambda s: apply(ch, s)))
    return CapacityResult(
        value_bits=value,
        optimizer_state=inputs,
        iterations=sum(r.iterations for r in runs),
        restarts_used=cfg.restarts,
        converged=runs[best].stopped,
        gradient_norm_final=runs[best].gradient_norm,
        lower_bound_only=True,
        restart_values=tuple(r.value for r in runs),
    )


# --- decomposition ---------------------------------------------------------

class DecompositionReport(NamedTuple):
    input_entropy: float
    chi_output: float
    chi_environment: float
    mutual_information_bits: float


def decomposition_report(ch: QuantumChannel, ens: Ensemble) -> DecompositionReport:
    """Split the mutual information of ``sum_i p_i |phi_i><phi_i|`` into
    input entropy, output Holevo quantity and environment Holevo quantity."""
    pure_vectors(ens)  # rejects mixed members
    if ens.dim != ch.dim_in:
        raise ValueError(f"ensemble dimension {ens.dim} != channel input {ch.dim_in}")
    s_in = von_neumann_entropy(ens.average())
    chi_out = holevo_chi(ens.map(lambda s: apply(ch, s)))
    chi_env = holevo_chi(ens.map(lambda s: complementary(ch, s)))
    return DecompositionReport(s_in, chi_out, chi_env, s_in + chi_out - chi_env)


# --- sweeps --------------------------------------------------------------

PRIMARY_PARAM = {
    "identity": "d",
    "depolarizing": "p",
    "dephasing": "lambda",
    "amplitude_damping": "gamma",
    "erasure": "p",
}


def _sweep_point(args):
    family, key, value, fixed, cfg = args
    ch = standard_channel(family, **{**fixed, key: value})
    return compute_ce(ch, cfg).value_bits


def capacity_sweep(family: str, param_grid: Sequence[float], cfg: OptimizerConfig | None = None,
                   param: str | None = None, **fixed) -> list[tuple[float, float]]:
    """C_E along a one-parameter slice of a catalog family, sorted by parameter."""
    cfg = cfg or OptimizerConfig()
    key = param or PRIMARY_PARAM.get(family)
    if key is None:
        raise ValueError(f"unknown channel family {family!r}")
    grid = sorted(float(v) for v in param_grid)
    # validate every point up front so errors surface before any optimization
    for v in grid:
        standard_channel(family, **{**fixed, key: v})
    values = parallel_map(_sweep_point, [(family, key, v, fixed, cfg) for v in grid])
    return list(zip(grid, values))
