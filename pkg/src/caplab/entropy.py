"""Entropy functionals, all in bits.

The public functions take validated ``DensityMatrix`` / ``QuantumChannel``
values. The underscore-free ``*_array`` helpers work on raw numpy arrays and
skip validation; the capacity optimizers call them in their inner loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from caplab.channels import (
    QuantumChannel,
    act,
    apply,
    apply_extended,
    check_probs,
    complementary,
    environment_output,
    extended_output,
)
from caplab.qmat import (
    DensityMatrix,
    DimensionError,
    InvalidStateError,
    PureBipartiteState,
    hermitian_spectrum,
    partial_trace,
    purify,
)

ZERO_EIGENVALUE = 1e-12
NEGATIVE_TOL = 1e-9
SUPPORT_SIGMA = 1e-12
SUPPORT_RHO = 1e-10
EXCHANGE_CROSSCHECK_TOL = 1e-8

# set to False to skip the complementary-channel cross-check in entropy_exchange
CROSSCHECK = __debug__


class EntropyError(ArithmeticError):
    pass


def clamp_bits(x: float) -> float:
    """Clamp round-off negatives to zero; reject genuinely negative values."""
    if math.isnan(x):
        raise EntropyError("entropy evaluated to NaN")
    if x < -NEGATIVE_TOL:
        raise EntropyError(f"negative entropy-like quantity {x:.3e}")
    return max(x, 0.0)


def entropy_of_spectrum(w: np.ndarray) -> float:
    w = w[w > ZERO_EIGENVALUE]
    return float(-np.sum(w * np.log2(w)))


def entropy_array(m: np.ndarray) -> float:
    return entropy_of_spectrum(np.linalg.eigvalsh(m))


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    states: tuple[DensityMatrix, ...]

    def __post_init__(self):
        states = tuple(self.states)
        p = check_probs(self.probs, len(states))
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionError(f"ensemble states have mixed dimensions {sorted(dims)}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_vectors(cls, probs, vectors) -> "Ensemble":
        return cls(probs, tuple(DensityMatrix.from_vector(v) for v in vectors))

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)

    def average(self) -> DensityMatrix:
        m = sum(p * s.matrix for p, s in zip(self.probs, self.states))
        return DensityMatrix(m)

    def map(self, f) -> "Ensemble":
        return Ensemble(self.probs, tuple(f(s) for s in self.states))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return clamp_bits(entropy_array(rho.matrix))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``Tr rho (log2 rho - log2 sigma)``; ``math.inf`` when supp(rho) is not inside supp(sigma)."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    return clamp_bits(relative_entropy_array(rho.matrix, sigma.matrix))


def relative_entropy_array(rho: np.ndarray, sigma: np.ndarray) -> float:
    mu, w = np.linalg.eigh(sigma)
    # weight of rho along each eigenvector of sigma
    weights = np.einsum("ij,ik,kj->j", w.conj(), rho, w).real
    null = mu < SUPPORT_SIGMA
    if np.any(weights[null] > SUPPORT_RHO):
        return math.inf
    cross = float(np.sum(weights[~null] * np.log2(mu[~null])))
    return -entropy_array(rho) - cross


def entropy_exchange(ch: QuantumChannel, rho: DensityMatrix) -> float:
    """Entropy of ``(N x I)(|Phi><Phi|)`` for the canonical purification of ``rho``."""
    out = apply_extended(ch, purify(rho))
    s = von_neumann_entropy(out)
    if CROSSCHECK:
        s_env = von_neumann_entropy(complementary(ch, rho))
        if abs(s - s_env) > EXCHANGE_CROSSCHECK_TOL:
            raise EntropyError(
                f"entropy exchange routes disagree: {s!r} vs environment {s_env!r}"
            )
    return s


def mutual_information(ch: QuantumChannel, rho: DensityMatrix) -> float:
    """``S(rho) + S(N(rho)) - S((N x I)(Phi))``."""
    if rho.dim != ch.dim_in:
        raise DimensionError(f"channel expects input dimension {ch.dim_in}, got {rho.dim}")
    s_in = von_neumann_entropy(rho)
    s_out = von_neumann_entropy(apply(ch, rho))
    return clamp_bits(s_in + s_out - entropy_exchange(ch, rho))


def mutual_information_array(kraus: np.ndarray, rho: np.ndarray) -> float:
    """Unvalidated mutual information for the optimizer's inner loop."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    psi = v * np.sqrt(w)
    return (
        entropy_of_spectrum(w)
        + entropy_array(act(kraus, rho))
        - entropy_array(extended_output(kraus, psi))
    )


def mutual_information_relative(ch: QuantumChannel, rho: DensityMatrix) -> float:
    """Same quantity as :func:`mutual_information`, computed as
    ``S((N x I)(Phi) || N(rho) x rho_B)``."""
    phi = purify(rho)
    joint = apply_extended(ch, phi)
    product = DensityMatrix(np.kron(apply(ch, rho).matrix, phi.reduced_b().matrix))
    return relative_entropy(joint, product)


def holevo_chi(ens: Ensemble) -> float:
    avg = sum(p * s.matrix for p, s in zip(ens.probs, ens.states))
    mean_s = sum(p * entropy_array(s.matrix) for p, s in zip(ens.probs, ens.states))
    return clamp_bits(entropy_array(avg) - mean_s)


def holevo_chi_arrays(probs: np.ndarray, states: np.ndarray) -> float:
    """Holevo quantity for a stack of (unvalidated) states of shape ``(m, d, d)``."""
    avg = np.einsum("i,iab->ab", probs, states)
    spectra = np.linalg.eigvalsh(states)
    mean_s = sum(p * entropy_of_spectrum(w) for p, w in zip(probs, spectra))
    return entropy_array(avg) - mean_s


def coherent_information(ch: QuantumChannel, rho: DensityMatrix) -> float:
    """``S(N(rho))`` minus the entropy exchange; may be negative."""
    return von_neumann_entropy(apply(ch, rho)) - entropy_exchange(ch, rho)


def _pure_vector(state: DensityMatrix) -> np.ndarray:
    w, v = hermitian_spectrum(state.matrix)
    if w[0] < 1.0 - 1e-9:
        raise InvalidStateError(
            f"ensemble member is not pure (largest eigenvalue {w[0]:.12f})"
        )
    return v[:, 0]


def pure_vectors(ens: Ensemble) -> list[np.ndarray]:
    return [_pure_vector(s) for s in ens.states]


def purify_ensemble(ens: Ensemble) -> PureBipartiteState:
    """``sum_i sqrt(p_i) |Phi^i_AB>|i>_D`` over ``A x (B x D)``.

    Each ``|Phi^i_AB>`` is the canonical purification of the i-th pure member,
    i.e. ``|phi_i>|0>_B``; B has the input dimension and D the ensemble size.
    """
    vecs = pure_vectors(ens)
    d, m = ens.dim, len(ens)
    psi = np.zeros((d, d, m), dtype=complex)
    for i, (p, phi) in enumerate(zip(ens.probs, vecs)):
        psi[:, 0, i] = np.sqrt(p) * phi
    return PureBipartiteState(d, d * m, psi.ravel())


def conditional_entropy(rho: np.ndarray, dims: Sequence[int], system: Sequence[int],
                        given: Sequence[int]) -> float:
    """``S(system, given) - S(given)`` for subsystems of a multipartite state."""
    joint = entropy_array(partial_trace(rho, dims, list(system) + list(given)))
    return joint - entropy_array(partial_trace(rho, dims, given))


def environment_entropy(ch: QuantumChannel, rho: DensityMatrix) -> float:
    """Entropy exchange by the complementary-channel route only."""
    return clamp_bits(entropy_array(environment_output(ch.kraus, rho.matrix)))
