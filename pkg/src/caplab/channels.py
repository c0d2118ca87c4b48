"""CPTP maps in Kraus form and their algebra.

A channel is stored as a stack of Kraus operators of shape
``(rank, dim_out, dim_in)``. Two channels are considered equal when they act
identically on the operator basis ``|i><j|``; Kraus lists themselves are only
defined up to a unitary mixing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from caplab.qmat import (
    DensityMatrix,
    DimensionError,
    PureBipartiteState,
    hermitian_spectrum,
    partial_trace,
)

CPTP_TOL = 1e-8
CHOI_CUTOFF = 1e-10


class ChannelError(ValueError):
    """Invalid channel construction: bad parameters or broken trace preservation."""


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    deviation: float


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    dim_in: int
    dim_out: int
    kraus: np.ndarray
    name: str | None = None

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] < 1:
            raise DimensionError("kraus must be a nonempty list of matrices")
        if k.shape[1:] != (self.dim_out, self.dim_in):
            raise DimensionError(
                f"Kraus operators have shape {k.shape[1:]}, "
                f"expected ({self.dim_out}, {self.dim_in})"
            )
        if not np.all(np.isfinite(k)):
            raise ChannelError("Kraus operators have non-finite entries")
        k = k.copy()
        k.flags.writeable = False
        object.__setattr__(self, "kraus", k)

    @classmethod
    def from_kraus(cls, kraus: Sequence, name: str | None = None, check: bool = True):
        k = np.asarray(kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        ch = cls(k.shape[2], k.shape[1], k, name)
        if check:
            report = validate_cptp(ch)
            if not report.passed:
                raise ChannelError(
                    f"trace preservation violated, deviation {report.deviation:g}"
                )
        return ch

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    def __repr__(self) -> str:
        label = f"{self.name!r}, " if self.name else ""
        return f"QuantumChannel({label}{self.dim_in}->{self.dim_out}, rank={self.rank})"


@dataclass(frozen=True)
class ChoiMatrix:
    """Normalized Choi state ``(N x I)(|W><W|)``, output factor first."""

    dim_in: int
    dim_out: int
    state: DensityMatrix

    def __post_init__(self):
        if self.state.dim != self.dim_in * self.dim_out:
            raise DimensionError("Choi state dimension must equal dim_out * dim_in")
        red = partial_trace(self.state.matrix, [self.dim_out, self.dim_in], [1])
        dev = float(np.max(np.abs(red - np.eye(self.dim_in) / self.dim_in)))
        if dev > CPTP_TOL:
            raise ChannelError(f"Choi matrix is not trace preserving, deviation {dev:g}")


@dataclass(frozen=True)
class StinespringDilation:
    dim_in: int
    dim_out: int
    dim_env: int
    isometry: np.ndarray = field(repr=False)

    def apply(self, rho: DensityMatrix) -> np.ndarray:
        """Joint output ``V rho V^dagger`` on ``out x env``."""
        v = self.isometry
        return v @ rho.matrix @ v.conj().T

    def output(self, rho: DensityMatrix) -> DensityMatrix:
        joint = self.apply(rho)
        return DensityMatrix(partial_trace(joint, [self.dim_out, self.dim_env], [0]))

    def environment(self, rho: DensityMatrix) -> DensityMatrix:
        joint = self.apply(rho)
        return DensityMatrix(partial_trace(joint, [self.dim_out, self.dim_env], [1]))


def tp_deviation(kraus: np.ndarray) -> float:
    s = np.einsum("kai,kaj->ij", kraus.conj(), kraus)
    return float(np.max(np.abs(s - np.eye(kraus.shape[2]))))


def validate_cptp(ch: QuantumChannel) -> ValidationReport:
    dev = tp_deviation(ch.kraus)
    return ValidationReport(dev <= CPTP_TOL, dev)


def act(kraus: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Linear action ``sum_k E_k X E_k^dagger`` on an arbitrary operator."""
    return np.einsum("kab,bc,kdc->ad", kraus, x, kraus.conj())


def _check_input(ch: QuantumChannel, dim: int) -> None:
    if dim != ch.dim_in:
        raise DimensionError(f"channel expects input dimension {ch.dim_in}, got {dim}")


def apply(ch: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    _check_input(ch, rho.dim)
    return DensityMatrix(act(ch.kraus, rho.matrix))


def extended_output(kraus: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """``(N x I)(|psi><psi|)`` for amplitudes ``psi`` shaped ``dim_in x dim_ref``."""
    w = np.matmul(kraus, psi).reshape(kraus.shape[0], -1)
    return w.T @ w.conj()


def apply_extended(ch: QuantumChannel, state: PureBipartiteState) -> DensityMatrix:
    """Apply the channel to the A factor of a pure bipartite state, identity on B."""
    _check_input(ch, state.dim_a)
    return DensityMatrix(extended_output(ch.kraus, state.as_matrix()))


def dilation(ch: QuantumChannel) -> StinespringDilation:
    """Isometry ``V|psi> = sum_k (E_k|psi>) x |k>`` into ``out x env``."""
    k = ch.kraus
    v = np.transpose(k, (1, 0, 2)).reshape(ch.dim_out * ch.rank, ch.dim_in)
    return StinespringDilation(ch.dim_in, ch.dim_out, ch.rank, v)


def environment_output(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Matrix with entries ``Tr(E_k rho E_l^dagger)``."""
    return np.einsum("kab,bc,lac->kl", kraus, rho, kraus.conj())


def complementary(ch: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    _check_input(ch, rho.dim)
    return DensityMatrix(environment_output(ch.kraus, rho.matrix))


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """``second`` after ``first``; Kraus family of all products ``F_j E_k``."""
    if first.dim_out != second.dim_in:
        raise DimensionError(
            f"cannot compose: first outputs {first.dim_out}, second expects {second.dim_in}"
        )
    k = np.einsum("jab,kbc->jkac", second.kraus, first.kraus)
    k = k.reshape(-1, second.dim_out, first.dim_in)
    return QuantumChannel(first.dim_in, second.dim_out, k)


def tensor(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    k = np.einsum("jab,kcd->jkacbd", a.kraus, b.kraus)
    k = k.reshape(a.rank * b.rank, a.dim_out * b.dim_out, a.dim_in * b.dim_in)
    return QuantumChannel(a.dim_in * b.dim_in, a.dim_out * b.dim_out, k)


def check_probs(probs, n: int | None = None) -> np.ndarray:
    p = np.asarray(probs, dtype=float).ravel()
    if n is not None and p.size != n:
        raise ValueError(f"expected {n} probabilities, got {p.size}")
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"invalid probability vector {p.tolist()}")
    return p


def mix(channels: Sequence[QuantumChannel], probs) -> QuantumChannel:
    """Convex combination; Kraus family ``sqrt(p_i) E^(i)_k``."""
    channels = list(channels)
    p = check_probs(probs, len(channels))
    d_in, d_out = channels[0].dim_in, channels[0].dim_out
    for ch in channels[1:]:
        if (ch.dim_in, ch.dim_out) != (d_in, d_out):
            raise DimensionError("all mixed channels must share input and output dimensions")
    k = np.concatenate([np.sqrt(pi) * ch.kraus for pi, ch in zip(p, channels)])
    return QuantumChannel(d_in, d_out, k)


def choi_of(ch: QuantumChannel) -> ChoiMatrix:
    d = ch.dim_in
    omega = np.eye(d, dtype=complex) / np.sqrt(d)
    return ChoiMatrix(d, ch.dim_out, DensityMatrix(extended_output(ch.kraus, omega)))


def kraus_from_choi(c: ChoiMatrix) -> QuantumChannel:
    w, v = hermitian_spectrum(c.state.matrix)
    keep = w > CHOI_CUTOFF
    k = (v[:, keep] * np.sqrt(c.dim_in * w[keep])).T
    k = k.reshape(-1, c.dim_out, c.dim_in)
    ch = QuantumChannel(c.dim_in, c.dim_out, k)
    report = validate_cptp(ch)
    if not report.passed:
        raise ChannelError(f"trace preservation violated, deviation {report.deviation:g}")
    return ch


def canonicalize(ch: QuantumChannel) -> QuantumChannel:
    """Minimal Kraus family via the Choi eigendecomposition."""
    out = kraus_from_choi(choi_of(ch))
    return QuantumChannel(out.dim_in, out.dim_out, out.kraus, ch.name)


def same_action(a: QuantumChannel, b: QuantumChannel, tol: float = 1e-8) -> bool:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        return False
    d = a.dim_in
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            if np.max(np.abs(act(a.kraus, e) - act(b.kraus, e))) > tol:
                return False
    return True


# --- catalog -------------------------------------------------------------

def _weyl_operators(d: int) -> list[np.ndarray]:
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


def _unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ChannelError(f"{name} must lie in [0, 1], got {value}")
    return value


def _dim(d) -> int:
    if float(d) != int(d) or int(d) < 1:
        raise ChannelError(f"dimension must be a positive integer, got {d}")
    return int(d)


def identity(d: int = 2) -> QuantumChannel:
    d = _dim(d)
    return QuantumChannel(d, d, np.eye(d)[None], f"identity({d})")


def depolarizing(p: float, d: int = 2) -> QuantumChannel:
    """``rho -> (1-p) rho + p I/d`` via the d^2 Weyl operators."""
    p, d = _unit("p", p), _dim(d)
    ops = _weyl_operators(d)
    weights = np.full(d * d, p / d**2)
    weights[0] += 1.0 - p
    k = [np.sqrt(w) * u for w, u in zip(weights, ops) if w > 0]
    return QuantumChannel(d, d, np.array(k), f"depolarizing({p:g},{d})")


def dephasing(lam: float, d: int = 2) -> QuantumChannel:
    """Off-diagonal elements scaled by ``1 - lam``; ``lam = 1`` is complete dephasing."""
    lam, d = _unit("lambda", lam), _dim(d)
    k = []
    if lam < 1:
        k.append(np.sqrt(1 - lam) * np.eye(d))
    if lam > 0:
        for i in range(d):
            proj = np.zeros((d, d))
            proj[i, i] = np.sqrt(lam)
            k.append(proj)
    return QuantumChannel(d, d, np.array(k), f"dephasing({lam:g})")


def amplitude_damping(gamma: float) -> QuantumChannel:
    g = _unit("gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    k1 = np.array([[0, np.sqrt(g)], [0, 0]])
    return QuantumChannel(2, 2, np.array([k0, k1]), f"amplitude_damping({g:g})")


def erasure(p: float, d: int = 2) -> QuantumChannel:
    """Input survives with probability ``1 - p``; otherwise replaced by the flag ``|d>``."""
    p, d = _unit("p", p), _dim(d)
    k = []
    if p < 1:
        keep = np.zeros((d + 1, d))
        keep[:d, :d] = np.sqrt(1 - p) * np.eye(d)
        k.append(keep)
    if p > 0:
        for i in range(d):
            flag = np.zeros((d + 1, d))
            flag[d, i] = np.sqrt(p)
            k.append(flag)
    return QuantumChannel(d, d + 1, np.array(k), f"erasure({p:g},{d})")


FAMILIES = {
    "identity": (identity, ("d",)),
    "depolarizing": (depolarizing, ("p", "d")),
    "dephasing": (dephasing, ("lambda", "d")),
    "amplitude_damping": (amplitude_damping, ("gamma",)),
    "erasure": (erasure, ("p", "d")),
}

_ALIASES = {"lam": "lambda", "λ": "lambda", "γ": "gamma"}


def standard_channel(family: str, **params) -> QuantumChannel:
    """Build a catalog channel by family name.

    Recognized families and parameters: ``identity(d)``, ``depolarizing(p, d)``,
    ``dephasing(lambda, d)``, ``amplitude_damping(gamma)``, ``erasure(p, d)``.
    ``d`` defaults to 2 everywhere.
    """
    if family not in FAMILIES:
        raise ChannelError(f"unknown channel family {family!r}")
    ctor, names = FAMILIES[family]
    args = {}
    for key, value in params.items():
        key = _ALIASES.get(key, key)
        if key not in names:
            raise ChannelError(f"{family} takes parameters {names}, got {key!r}")
        args[key] = value
    missing = [n for n in names if n != "d" and n not in args]
    if missing:
        raise ChannelError(f"{family} is missing parameter(s) {missing}")
    if "lambda" in args:
        args["lam"] = args.pop("lambda")
    return ctor(**args)
