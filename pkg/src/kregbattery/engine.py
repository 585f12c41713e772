"""Exact state-vector / density-matrix dynamics.

Basis convention: site ``s`` is bit ``s`` of the basis index (site 0 is the
least significant bit), and bit value 0 is the Z = +1 ("up") state.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, NumericalError, ResourceError, ValidationError
from .pauli import CliffordCircuit, PauliString, PauliSum, check_pairwise_commuting

DENSE_CAP = 14
PRODUCT_CAP = 20
STATE_TOL = 1e-12

_AXIS_STATES = {
    ("X", 1): np.array([1, 1]) / np.sqrt(2),
    ("X", -1): np.array([1, -1]) / np.sqrt(2),
    ("Y", 1): np.array([1, 1j]) / np.sqrt(2),
    ("Y", -1): np.array([1, -1j]) / np.sqrt(2),
    ("Z", 1): np.array([1, 0]),
    ("Z", -1): np.array([0, 1]),
}


@lru_cache(maxsize=32)
def _indices(n: int) -> np.ndarray:
    idx = np.arange(2 ** n, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def _parity(values: np.ndarray, mask: int) -> np.ndarray:
    return (np.bitwise_count(values & mask) & 1).astype(np.int64)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure vector (``kind='pure'``) or density matrix (``kind='density'``)."""

    kind: str
    n_sites: int
    data: np.ndarray

    def __post_init__(self):
        if self.kind not in ("pure", "density"):
            raise ValidationError(f"unknown state kind {self.kind!r}")
        dim = 2 ** self.n_sites
        shape = (dim,) if self.kind == "pure" else (dim, dim)
        arr = np.array(self.data, dtype=complex)
        if arr.shape != shape:
            raise DimensionError(f"{self.kind} state on {self.n_sites} sites needs shape {shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def pure(cls, vec, normalize: bool = False) -> "QuantumState":
        vec = np.asarray(vec, dtype=complex)
        n = int(round(np.log2(vec.size)))
        if 2 ** n != vec.size:
            raise DimensionError("vector length is not a power of two")
        norm = np.linalg.norm(vec)
        if normalize:
            vec = vec / norm
        elif abs(norm - 1) > STATE_TOL:
            raise ValidationError(f"state norm {norm!r} deviates from 1")
        return cls("pure", n, vec)

    @classmethod
    def density(cls, mat, check: bool = True) -> "QuantumState":
        mat = np.asarray(mat, dtype=complex)
        n = int(round(np.log2(mat.shape[0])))
        if check:
            if np.abs(mat - mat.conj().T).max() > STATE_TOL:
                raise ValidationError("density matrix not Hermitian")
            if abs(np.trace(mat) - 1) > STATE_TOL:
                raise ValidationError("density matrix trace deviates from 1")
            if np.linalg.eigvalsh(mat).min() < -STATE_TOL:
                raise ValidationError("density matrix has negative eigenvalues")
        return cls("density", n, mat)

    @classmethod
    def product(cls, site_vectors: Sequence) -> "QuantumState":
        """Product state; ``site_vectors[0]`` is site 0."""
        vec = np.array([1.0 + 0j])
        for v in site_vectors:
            v = np.asarray(v, dtype=complex)
            vec = np.kron(v / np.linalg.norm(v), vec)
        return cls.pure(vec)

    @classmethod
    def axis_product(cls, n: int, axis: str, sign: int = -1) -> "QuantumState":
        """Every site in the ``sign`` eigenstate of ``axis``."""
        return cls.product([_AXIS_STATES[(axis.upper(), sign)]] * n)

    @classmethod
    def basis(cls, n: int, index: int) -> "QuantumState":
        vec = np.zeros(2 ** n, dtype=complex)
        vec[index] = 1
        return cls("pure", n, vec)

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites

    def to_density(self) -> "QuantumState":
        if self.kind == "density":
            return self
        return QuantumState("density", self.n_sites, np.outer(self.data, self.data.conj()))

    def trace(self) -> float:
        if self.kind == "pure":
            return float(np.vdot(self.data, self.data).real)
        return float(np.trace(self.data).real)

    def purity(self) -> float:
        if self.kind == "pure":
            return self.trace() ** 2
        return float(np.vdot(self.data, self.data).real)

    def overlap(self, other: "QuantumState") -> complex:
        """<self|other> for pure states."""
        if self.kind != "pure" or other.kind != "pure":
            raise ValidationError("overlap needs pure states")
        if self.n_sites != other.n_sites:
            raise DimensionError("states on different numbers of sites")
        return complex(np.vdot(self.data, other.data))

    def fidelity(self, other: "QuantumState") -> float:
        if self.kind == "pure" and other.kind == "pure":
            return abs(self.overlap(other)) ** 2
        a, b = self.to_density().data, other.to_density().data
        w, v = np.linalg.eigh(a)
        sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
        return float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(sq @ b @ sq), 0, None))) ** 2)


# --- sparse Pauli action ---------------------------------------------------

def apply_pauli(p: PauliString, vec: np.ndarray) -> np.ndarray:
    """``P @ vec`` without building a matrix; ``vec`` may carry extra trailing axes."""
    idx = _indices(p.n_sites)
    if vec.shape[0] != idx.size:
        raise DimensionError("state and operator sizes differ")
    coef = 1j ** ((p.phase + int(np.bitwise_count(p.x & p.z))) % 4)
    src = idx ^ p.x
    sign = 1 - 2 * _parity(src, p.z)
    out = vec[src]
    if vec.ndim > 1:
        sign = sign.reshape((-1,) + (1,) * (vec.ndim - 1))
    return coef * sign * out


def apply_pauli_sum(op: PauliSum, vec: np.ndarray) -> np.ndarray:
    out = np.zeros(vec.shape, dtype=complex)
    for p, c in op:
        out += c * apply_pauli(p, vec)
    return out


def apply_circuit(circuit: CliffordCircuit, state: QuantumState) -> QuantumState:
    """Apply the circuit's unitary (``gates[0]`` first) to a pure state."""
    if state.kind != "pure":
        raise ValidationError("apply_circuit needs a pure state")
    n = state.n_sites
    if circuit.max_site() >= n:
        raise ValidationError("gate site outside the register")
    idx = _indices(n)
    vec = state.data.copy()
    hd = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for gate in circuit.gates:
        if gate.name == "CZ":
            i, j = gate.sites
            vec = vec * (1 - 2 * ((idx >> i) & (idx >> j) & 1))
        else:
            (s,) = gate.sites
            if gate.name == "H":
                t = vec.reshape(2 ** (n - s - 1), 2, 2 ** s)
                vec = np.einsum("ab,ibj->iaj", hd, t).reshape(-1)
            else:  # S = exp(-i pi Z / 4)
                bit = (idx >> s) & 1
                vec = vec * np.where(bit, np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4))
    return QuantumState("pure", n, vec)


# --- dense operators -------------------------------------------------------

def pauli_sum_matrix(op: PauliSum) -> np.ndarray:
    """Dense matrix of a PauliSum built from sparse Pauli action (no Kronecker products)."""
    n = op.n_sites
    idx = _indices(n)
    real = all(abs(c.imag) == 0 for c in op.terms.values()) and all(
        bin(x & z).count("1") % 2 == 0 for x, z in op.terms)
    mat = np.zeros((idx.size, idx.size), dtype=float if real else complex)
    for p, c in op:
        coef = c * 1j ** (bin(p.x & p.z).count("1") % 4)
        vals = coef * (1 - 2 * _parity(idx, p.z))
        mat[idx ^ p.x, idx] += vals.real if real else vals
    return mat


class HermitianOperator:
    """Dense Hermitian matrix with a lazily cached, thread-safe eigendecomposition."""

    def __init__(self, matrix: np.ndarray, n_sites: int | None = None, tol: float = STATE_TOL):
        matrix = np.asarray(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError("operator must be a square matrix")
        n = int(round(np.log2(matrix.shape[0]))) if n_sites is None else n_sites
        if 2 ** n != matrix.shape[0]:
            raise DimensionError("matrix size is not 2**n_sites")
        if matrix.size and np.abs(matrix - matrix.conj().T).max() > tol:
            raise ValidationError("operator is not Hermitian")
        if np.iscomplexobj(matrix) and not np.any(matrix.imag):
            matrix = matrix.real
        self.n_sites = n
        self.matrix = matrix
        self.matrix.setflags(write=False)
        self._spectrum = None
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """(ascending eigenvalues, eigenvector columns), computed once."""
        if self._spectrum is None:
            with self._lock:
                if self._spectrum is None:
                    try:
                        evals, evecs = np.linalg.eigh(self.matrix)
                    except np.linalg.LinAlgError as exc:
                        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
                    evals.setflags(write=False)
                    evecs.setflags(write=False)
                    self._spectrum = (evals, evecs)
        return self._spectrum

    def eigenvalues(self) -> np.ndarray:
        if self._spectrum is not None:
            return self._spectrum[0]
        return np.linalg.eigvalsh(self.matrix)


def to_dense(op: PauliSum, cap: int = DENSE_CAP) -> HermitianOperator:
    if op.n_sites > cap:
        raise ResourceError(f"{op.n_sites} sites exceeds the dense cap of {cap}")
    if not op.is_hermitian(tol=1e-14):
        raise ValidationError("PauliSum is not Hermitian")
    return HermitianOperator(pauli_sum_matrix(op), op.n_sites)


# --- time evolution --------------------------------------------------------

def _check_pair(H: HermitianOperator, state: QuantumState):
    if H.n_sites != state.n_sites:
        raise DimensionError(f"operator on {H.n_sites} sites, state on {state.n_sites}")


def evolve_spectral(H: HermitianOperator, psi0: QuantumState, ts: Sequence[float]) -> list[QuantumState]:
    """``exp(-iHt)`` applied to ``psi0`` for every ``t``, from one eigendecomposition."""
    _check_pair(H, psi0)
    evals, evecs = H.spectrum()
    out = []
    if psi0.kind == "pure":
        coeffs = evecs.conj().T @ psi0.data
        for t in ts:
            out.append(QuantumState("pure", psi0.n_sites, evecs @ (np.exp(-1j * evals * t) * coeffs)))
    else:
        rho_eig = evecs.conj().T @ psi0.data @ evecs
        for t in ts:
            ph = np.exp(-1j * evals * t)
            out.append(QuantumState("density", psi0.n_sites,
                                    evecs @ (ph[:, None] * rho_eig * ph.conj()[None, :]) @ evecs.conj().T))
    return out


class SpectralPropagator:
    """``exp(-iHt)|psi0>`` restricted to the energy levels ``psi0`` actually populates.

    Degenerate eigenvectors are merged into one projected vector per level,
    so dense time grids cost O(levels**2) per point rather than O(dim**2).
    """

    def __init__(self, H: HermitianOperator, psi0: QuantumState, degeneracy_tol: float = 1e-9,
                 weight_tol: float = 1e-14):
        _check_pair(H, psi0)
        if psi0.kind != "pure":
            raise ValidationError("SpectralPropagator needs a pure initial state")
        evals, evecs = H.spectrum()
        coeffs = evecs.conj().T @ psi0.data
        breaks = np.flatnonzero(np.diff(evals) > degeneracy_tol) + 1
        levels, vectors = [], []
        for block in np.split(np.arange(evals.size), breaks):
            vec = evecs[:, block] @ coeffs[block]
            if np.linalg.norm(vec) > weight_tol:
                levels.append(evals[block].mean())
                vectors.append(vec)
        self.n_sites = psi0.n_sites
        self.levels = np.array(levels)
        self.vectors = np.array(vectors).T

    @classmethod
    def from_stabilizer_product(cls, generators: Sequence[PauliString], psi0: QuantumState,
                                weight_tol: float = 1e-14) -> "SpectralPropagator":
        """Level decomposition for a sum of commuting +-1 generators, without diagonalising.

        The spectrum is ``{n - 2w}``, so ``exp(i n t) psi(t)`` is a trigonometric
        polynomial of degree ``n`` in ``exp(2it)``; sampling it at ``n + 1``
        equispaced times with the product formula and taking a DFT yields the
        projection of ``psi0`` on every level exactly.
        """
        generators = list(generators)
        check_pairwise_commuting(generators)
        n = len(generators)
        samples = []
        for j in range(n + 1):
            t = np.pi * j / (n + 1)
            psi = evolve_stabilizer_product(generators, psi0, t, check=False)
            samples.append(np.exp(1j * n * t) * psi.data)
        coeffs = np.fft.fft(np.array(samples), axis=0) / (n + 1)
        self = cls.__new__(cls)
        keep = [w for w in range(n + 1) if np.linalg.norm(coeffs[w]) > weight_tol]
        self.n_sites = psi0.n_sites
        self.levels = np.array([n - 2.0 * w for w in keep])
        self.vectors = coeffs[keep].T.copy()
        return self

    def state(self, t: float) -> QuantumState:
        return QuantumState("pure", self.n_sites, self.vectors @ np.exp(-1j * self.levels * t))

    def expectation_series(self, op, ts, chunk: int = 4096) -> np.ndarray:
        """<psi(t)|op|psi(t)> on an array of times; ``op`` is a PauliSum or matrix."""
        if isinstance(op, PauliSum):
            applied = apply_pauli_sum(op, self.vectors)
        else:
            mat = op.matrix if isinstance(op, HermitianOperator) else np.asarray(op)
            applied = mat @ self.vectors
        gram = self.vectors.conj().T @ applied
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.empty(ts.size)
        for start in range(0, ts.size, chunk):
            ph = np.exp(-1j * np.outer(ts[start:start + chunk], self.levels))
            out[start:start + chunk] = np.einsum("ta,ab,tb->t", ph.conj(), gram, ph).real
        return out


def evolve_stabilizer_product(generators: Sequence[PauliString], psi0: QuantumState, t: float,
                              check: bool = True) -> QuantumState:
    """``prod_g (cos t - i sin t g)|psi0>`` for commuting Hermitian generators."""
    if psi0.kind != "pure":
        raise ValidationError("product-formula evolution needs a pure state")
    if psi0.n_sites > PRODUCT_CAP:
        raise ResourceError(f"{psi0.n_sites} sites exceeds the product-formula cap of {PRODUCT_CAP}")
    generators = list(generators)
    if check:
        for g in generators:
            if g.n_sites != psi0.n_sites:
                raise DimensionError("generator and state sizes differ")
            if not g.is_hermitian():
                raise ValidationError("generators must be Hermitian")
        check_pairwise_commuting(generators)
    c, s = np.cos(t), np.sin(t)
    vec = psi0.data
    for g in generators:
        vec = c * vec - 1j * s * apply_pauli(g, vec)
    return QuantumState("pure", psi0.n_sites, vec)


# --- measurements ------------------------------------------------------------

def expectation(op: Union[PauliSum, HermitianOperator], state: QuantumState,
                imag_tol: float = 1e-10) -> float:
    if op.n_sites != state.n_sites:
        raise DimensionError(f"operator on {op.n_sites} sites, state on {state.n_sites}")
    if isinstance(op, PauliSum):
        if state.kind == "pure":
            val = np.vdot(state.data, apply_pauli_sum(op, state.data))
        else:
            idx = _indices(state.n_sites)
            val = 0j
            for p, c in op:
                coef = 1j ** ((p.phase + int(np.bitwise_count(p.x & p.z))) % 4)
                sign = 1 - 2 * _parity(idx, p.z)
                val += c * coef * np.sum(sign * state.data[idx, idx ^ p.x])
    else:
        if state.kind == "pure":
            val = np.vdot(state.data, op.matrix @ state.data)
        else:
            val = np.einsum("ij,ji->", op.matrix, state.data)
    if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
        raise NumericalError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def _check_block(state: QuantumState, m: int):
    if not 1 <= m <= state.n_sites:
        raise ValidationError(f"block size m={m} outside [1, {state.n_sites}]")


def partial_trace_block(state: QuantumState, m: int) -> QuantumState:
    """Reduced density matrix of sites ``0 .. m-1``."""
    _check_block(state, m)
    n = state.n_sites
    lo, hi = 2 ** m, 2 ** (n - m)
    if state.kind == "pure":
        mat = state.data.reshape(hi, lo)
        rho = mat.T @ mat.conj()
    else:
        rho = np.einsum("rarb->ab", state.data.reshape(hi, lo, hi, lo))
    return QuantumState("density", m, rho)


def block_spectrum(state: QuantumState, m: int) -> np.ndarray:
    """Descending eigenvalues of the block's reduced state.

    For pure states this is the Schmidt spectrum, obtained from an SVD of the
    smaller bipartition side; only the non-trivial part is returned.
    """
    _check_block(state, m)
    if state.kind == "pure":
        mat = state.data.reshape(2 ** (state.n_sites - m), 2 ** m)
        vals = np.linalg.svd(mat, compute_uv=False) ** 2
    else:
        vals = np.linalg.eigvalsh(partial_trace_block(state, m).data)
    return np.sort(vals)[::-1]


def save_state(path, state: QuantumState) -> None:
    """Debug dump: ``.npy`` file (shape header + little-endian complex128)."""
    np.save(path, state.data.astype("<c16"), allow_pickle=False)


def load_state(path) -> QuantumState:
    data = np.load(path, allow_pickle=False)
    if data.ndim == 1:
        return QuantumState.pure(data)
    return QuantumState.density(data)
