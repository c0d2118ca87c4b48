"""Seeded random instances and the named inequality suites.

Every trial ``i`` of a suite run with seed ``s`` draws all of its randomness
from ``numpy.random.default_rng(s + i)``, so a witness is replayed from its
seed alone. Margins are signed so that a negative value means the inequality
is violated; a trial fails when its margin drops below ``-tolerance``.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from caplab._pool import parallel_map
from caplab.capacity import OptimizerConfig, compute_ce, compute_one_shot_c1, decomposition_report
from caplab.channels import QuantumChannel, apply, compose, mix, tensor
from caplab.entropy import (
    Ensemble,
    entropy_array,
    entropy_exchange,
    environment_entropy,
    mutual_information,
    mutual_information_relative,
    relative_entropy,
    von_neumann_entropy,
)
from caplab.qmat import DensityMatrix, partial_trace

ENTROPY_TOL = 1e-9
IDENTITY_TOL = 1e-8
CAPACITY_TOL = 1e-3

# capacity-level suites trade restarts for trials; the objective is concave
SUITE_CE = dict(restarts=3)
SUITE_C1 = dict(restarts=4)


# --- generators ------------------------------------------------------------

def _complex_gaussian(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = _complex_gaussian(rng, dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, seed: int) -> DensityMatrix:
    """Reduction of a Haar-random pure state on ``dim x dim``."""
    rng = np.random.default_rng(seed)
    g = _complex_gaussian(rng, dim, dim)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed isometry (QR of a Ginibre matrix with the phase fix)."""
    if rows < cols:
        raise ValueError(f"no isometry from dimension {cols} into {rows}")
    q, r = np.linalg.qr(_complex_gaussian(rng, rows, cols))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return random_isometry(dim, dim, rng)


def random_channel(dim_in: int, dim_out: int, kraus_rank: int, seed: int) -> QuantumChannel:
    """Channel whose Stinespring isometry ``dim_in -> dim_out x kraus_rank`` is Haar random."""
    if kraus_rank < 1:
        raise ValueError("kraus_rank must be at least 1")
    rng = np.random.default_rng(seed)
    v = random_isometry(dim_out * kraus_rank, dim_in, rng)
    kraus = v.reshape(dim_out, kraus_rank, dim_in).transpose(1, 0, 2)
    return QuantumChannel(dim_in, dim_out, kraus, f"random({dim_in},{dim_out},{kraus_rank},{seed})")


def pure_decomposition(rho: DensityMatrix, mixing: np.ndarray) -> Ensemble:
    """Pure-state decomposition of ``rho`` obtained by rotating its eigen-ensemble.

    ``mixing`` is an ``m x m`` unitary with ``m >= rho.dim``; member j is
    ``sum_i mixing[j, i] sqrt(l_i) |e_i>`` (normalized, weight = squared norm).
    """
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    m = mixing.shape[0]
    scaled = np.zeros((m, rho.dim), dtype=complex)
    scaled[: rho.dim] = (v * np.sqrt(w)).T
    vecs = mixing @ scaled
    probs = np.sum(np.abs(vecs) ** 2, axis=1)
    keep = probs > 1e-14
    probs = probs[keep] / probs[keep].sum()
    return Ensemble.from_vectors(probs, vecs[keep])


def random_decomposition(rho: DensityMatrix, size: int, seed: int) -> Ensemble:
    rng = np.random.default_rng(seed)
    return pure_decomposition(rho, random_unitary(size, rng))


# --- reports ---------------------------------------------------------------

@dataclass(frozen=True)
class SuiteReport:
    suite: str
    trials: int
    failures: int
    worst_slack_bits: float
    worst_witness: dict
    elapsed_seconds: float

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d["elapsed_seconds"] = 0.0
        return d


@dataclass(frozen=True)
class Trial:
    margin: float
    params: dict


# --- suites ------------------------------------------------------------------

def _sub_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def _qubit_channel(rng: np.random.Generator, name: str, params: dict,
                   max_rank: int = 4) -> QuantumChannel:
    rank = int(rng.integers(1, max_rank + 1))
    seed = _sub_seed(rng)
    params[name] = {"dim_in": 2, "dim_out": 2, "kraus_rank": rank, "seed": seed}
    return random_channel(2, 2, rank, seed)


def _entropy_channel(rng: np.random.Generator, params: dict, dim_in: int | None = None):
    d_in = dim_in or int(rng.choice([2, 3, 4]))
    d_out = int(rng.choice([2, 3, 4]))
    rank = int(rng.integers(-(-d_in // d_out), 5))
    seed = _sub_seed(rng)
    params["channel"] = {"dim_in": d_in, "dim_out": d_out, "kraus_rank": rank, "seed": seed}
    return random_channel(d_in, d_out, rank, seed)


def _state(rng: np.random.Generator, dim: int, name: str, params: dict) -> DensityMatrix:
    seed = _sub_seed(rng)
    params[name] = {"dim": dim, "seed": seed}
    return random_density(dim, seed)


def trial_ssa(seed: int) -> Trial:
    rng = np.random.default_rng(seed)
    psi = random_pure_vector(16, rng)
    rho = partial_trace(np.outer(psi, psi.conj()), [2, 2, 2, 2], [0, 1, 2])
    dims = [2, 2, 2]
    s = lambda keep: entropy_array(partial_trace(rho, dims, keep))
    margin = s([0, 1]) + s([1, 2]) - entropy_array(rho) - s([1])
    return Trial(margin, {"state": "haar_pure", "local_dims": [2, 2, 2, 2]})


def trial_jsa(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    rho = _state(rng, 16, "state", params).matrix
    dims = [2, 2, 2, 2]
    s = lambda keep: entropy_array(partial_trace(rho, dims, keep))
    a, b, c, d = range(4)
    margin = s([a, c]) + s([b, d]) + s([c, d]) - entropy_array(rho) - s([c]) - s([d])
    return Trial(margin, params)


def trial_monotonicity(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _entropy_channel(rng, params)
    rho = _state(rng, ch.dim_in, "rho", params)
    sigma = _state(rng, ch.dim_in, "sigma", params)
    before = relative_entropy(rho, sigma)
    if math.isinf(before):
        return Trial(math.inf, params)
    return Trial(before - relative_entropy(apply(ch, rho), apply(ch, sigma)), params)


def trial_exchange_bound(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _entropy_channel(rng, params)
    m = int(rng.integers(2, 5))
    probs = rng.dirichlet(np.ones(m))
    ens = Ensemble.from_vectors(probs, [random_pure_vector(ch.dim_in, rng) for _ in range(m)])
    params["ensemble"] = {"size": m}
    lhs = entropy_exchange(ch, ens.average())
    rhs = sum(p * von_neumann_entropy(apply(ch, s)) for p, s in zip(ens.probs, ens.states))
    return Trial(lhs - rhs, params)


def trial_concavity(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _entropy_channel(rng, params)
    r1 = _state(rng, ch.dim_in, "rho1", params)
    r2 = _state(rng, ch.dim_in, "rho2", params)
    lam = float(rng.uniform())
    params["lambda"] = lam
    mixed = DensityMatrix(lam * r1.matrix + (1 - lam) * r2.matrix)
    margin = (mutual_information(ch, mixed) - lam * mutual_information(ch, r1)
              - (1 - lam) * mutual_information(ch, r2))
    return Trial(margin, params)


def trial_eq3(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _entropy_channel(rng, params)
    rho = _state(rng, ch.dim_in, "rho", params)
    return Trial(-abs(mutual_information(ch, rho) - mutual_information_relative(ch, rho)), params)


def trial_exchange_equivalence(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _entropy_channel(rng, params)
    rho = _state(rng, ch.dim_in, "rho", params)
    return Trial(-abs(entropy_exchange(ch, rho) - environment_entropy(ch, rho)), params)


def trial_decomp(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _entropy_channel(rng, params, dim_in=2)
    rho = _state(rng, ch.dim_in, "rho", params)
    sizes = [int(rng.integers(ch.dim_in, ch.dim_in + 3)) for _ in range(2)]
    seeds = [_sub_seed(rng) for _ in range(2)]
    params["decompositions"] = [{"size": n, "seed": s} for n, s in zip(sizes, seeds)]
    reports = [decomposition_report(ch, random_decomposition(rho, n, s))
               for n, s in zip(sizes, seeds)]
    mi = mutual_information(ch, rho)
    diffs = [r.chi_output - r.chi_environment for r in reports]
    dev = max([abs(diffs[0] - diffs[1])] + [abs(r.mutual_information_bits - mi) for r in reports])
    return Trial(-dev, params)


def _ce(ch: QuantumChannel, seed: int) -> float:
    return compute_ce(ch, OptimizerConfig(seed=seed, **SUITE_CE)).value_bits


def trial_dp(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    n1 = _qubit_channel(rng, "first", params)
    n2 = _qubit_channel(rng, "second", params)
    margin = min(_ce(n1, seed), _ce(n2, seed)) - _ce(compose(n2, n1), seed)
    return Trial(margin, params)


def trial_convexity(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    n1 = _qubit_channel(rng, "first", params)
    n2 = _qubit_channel(rng, "second", params)
    lam = float(rng.uniform())
    params["lambda"] = lam
    avg = lam * _ce(n1, seed) + (1 - lam) * _ce(n2, seed)
    return Trial(avg - _ce(mix([n1, n2], [lam, 1 - lam]), seed), params)


def trial_additivity(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    n1 = _qubit_channel(rng, "first", params, max_rank=2)
    n2 = _qubit_channel(rng, "second", params, max_rank=2)
    gap = _ce(tensor(n1, n2), seed) - _ce(n1, seed) - _ce(n2, seed)
    return Trial(-abs(gap), params)


def trial_bound(seed: int) -> Trial:
    params: dict = {}
    rng = np.random.default_rng(seed)
    ch = _qubit_channel(rng, "channel", params)
    ce = _ce(ch, seed)
    c1 = compute_one_shot_c1(ch, OptimizerConfig(seed=seed, **SUITE_C1)).value_bits
    params["c1_lower_bound_only"] = True
    return Trial(min(ce - c1, math.log2(ch.dim_in) + c1 - ce), params)


SUITES: dict[str, tuple[Callable[[int], Trial], float]] = {
    "dp": (trial_dp, CAPACITY_TOL),
    "convexity": (trial_convexity, CAPACITY_TOL),
    "additivity": (trial_additivity, CAPACITY_TOL),
    "ssa": (trial_ssa, ENTROPY_TOL),
    "jsa": (trial_jsa, ENTROPY_TOL),
    "monotonicity": (trial_monotonicity, ENTROPY_TOL),
    "exchange-bound": (trial_exchange_bound, ENTROPY_TOL),
    "concavity": (trial_concavity, ENTROPY_TOL),
    "decomp": (trial_decomp, IDENTITY_TOL),
    "bound": (trial_bound, CAPACITY_TOL),
    "eq3": (trial_eq3, IDENTITY_TOL),
    "exchange-equiv": (trial_exchange_equivalence, IDENTITY_TOL),
}


def _run_trial(args) -> Trial:
    suite_id, seed = args
    return SUITES[suite_id][0](seed)


def run_suite(suite_id: str, trials: int, seed: int) -> SuiteReport:
    if suite_id not in SUITES:
        raise KeyError(f"unknown suite {suite_id!r}; known: {', '.join(SUITES)}")
    if trials < 1:
        raise ValueError("trials must be positive")
    tol = SUITES[suite_id][1]
    start = time.perf_counter()
    results = parallel_map(_run_trial, [(suite_id, seed + i) for i in range(trials)])
    failures = sum(1 for t in results if t.margin < -tol)
    worst_i = min(range(trials), key=lambda i: results[i].margin)
    worst = results[worst_i].margin
    return SuiteReport(
        suite=suite_id,
        trials=trials,
        failures=failures,
        worst_slack_bits=worst if math.isfinite(worst) else 0.0,
        worst_witness={"seed": seed + worst_i, "params": results[worst_i].params},
        elapsed_seconds=time.perf_counter() - start,
    )


def replay(suite_id: str, witness_seed: int) -> Trial:
    """Recompute a single trial from a report's ``worst_witness`` seed."""
    return SUITES[suite_id][0](witness_seed)
