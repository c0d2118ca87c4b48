"""Dense complex-matrix kernel: spectra, tensor products, partial traces, purifications.

Index convention throughout the package: multipartite matrices are stored
row-major with the first subsystem as the slowest index, which is what
``np.kron`` produces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_CLIP_TOL = 1e-8


class DimensionError(ValueError):
    """Operand shapes are inconsistent with the declared subsystem dimensions."""


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    """Matrix or vector fails the density-matrix / pure-state invariants."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; the left factor is the slow index."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on the space ``dims[0] x dims[1] x ...``.
    dims : sequence of int
        Local dimensions, slowest first.
    keep : sequence of int
        Indices of the subsystems to keep. Their relative order is preserved
        regardless of the order given here.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionError(f"dims {dims} give size {total}, matrix is {m.shape}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep {keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    t = m.reshape(dims + dims)
    # einsum labels: row index i, column index j; traced systems share a label
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise ValueError("too many subsystems")
    row = list(letters[:n])
    col = [row[i] if i not in keep else letters[n + i] for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    r = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    kd = int(np.prod([dims[i] for i in keep]))
    return r.reshape(kd, kd)


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> float:
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return dev


def hermitian_spectrum(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching orthonormal eigenvectors (columns)."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got {m.shape}")
    check_hermitian(m)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    # stable sort keeps degenerate eigenvectors in eigh's order
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


class DensityMatrix:
    """Unit-trace positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-8, 0)`` are clipped to zero and the matrix is
    renormalized; anything more negative is rejected.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = as_matrix(matrix)
        if m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        check_hermitian(m)
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        w, v = np.linalg.eigh(m)
        if w[0] < -PSD_CLIP_TOL:
            raise InvalidStateError(f"negative eigenvalue {w[0]:.3e}")
        if w[0] < 0:
            w = np.clip(w, 0.0, None)
            m = (v * (w / w.sum())) @ v.conj().T
        self._m = _frozen(m)

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    @classmethod
    def basis(cls, dim: int, index: int) -> "DensityMatrix":
        m = np.zeros((dim, dim), dtype=complex)
        m[index, index] = 1.0
        return cls(m)

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self._m)[::-1], 0.0, None)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return float(np.linalg.eigvalsh(self._m)[-1]) >= 1.0 - tol

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._m, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class PureBipartiteState:
    """Unit vector on ``A x B``, amplitudes ordered with A as the slow index."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amp.size != self.dim_a * self.dim_b:
            raise DimensionError(
                f"{amp.size} amplitudes for dims {self.dim_a} x {self.dim_b}"
            )
        norm2 = float(np.vdot(amp, amp).real)
        if abs(norm2 - 1.0) > 1e-10:
            raise InvalidStateError(f"squared norm {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amp))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``dim_a x dim_b``."""
        return self.amplitudes.reshape(self.dim_a, self.dim_b)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def reduced_a(self) -> DensityMatrix:
        psi = self.as_matrix()
        return DensityMatrix(psi @ psi.conj().T)

    def reduced_b(self) -> DensityMatrix:
        psi = self.as_matrix()
        return DensityMatrix(psi.T @ psi.conj())


def purify(rho: DensityMatrix) -> PureBipartiteState:
    """Canonical purification ``sum_i sqrt(l_i) |e_i>|i>`` with reference dimension ``rho.dim``.

    Eigenpairs are taken in descending eigenvalue order.
    """
    w, v = hermitian_spectrum(rho.matrix)
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    psi = v * np.sqrt(w)
    return PureBipartiteState(rho.dim, rho.dim, psi.ravel())
