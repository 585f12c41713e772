"""Phase-exact Pauli string algebra.

An n-site Pauli string is stored as two integer bit masks plus a phase
exponent::

    P = i**phase * sigma(x_0, z_0) (x) ... (x) sigma(x_{n-1}, z_{n-1})

with sigma(0, 0) = I, sigma(1, 0) = X, sigma(1, 1) = Y, sigma(0, 1) = Z.
Bit ``s`` of a mask refers to site ``s``.  Clifford conjugations and products
are carried out with integer arithmetic only; the trigonometric coefficients
produced by Heisenberg rotations live in :class:`PauliSum` amplitudes.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import DimensionError, PreconditionError, ValidationError

PRUNE_TOL = 1e-15

_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_PHASE_PREFIX = {0: "", 1: "i*", 2: "-", 3: "-i*"}
_MATRIX = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _check_same_size(a, b):
    if a.n_sites != b.n_sites:
        raise DimensionError(f"operands act on {a.n_sites} and {b.n_sites} sites")


@dataclass(frozen=True)
class PauliString:
    """A single tensor product of Paulis with a phase in {1, i, -1, -i}."""

    n_sites: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValidationError("n_sites must be positive")
        full = (1 << self.n_sites) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise ValidationError(f"mask exceeds {self.n_sites} sites")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_sites: int) -> "PauliString":
        return cls(n_sites)

    @classmethod
    def single(cls, n_sites: int, site: int, axis: str) -> "PauliString":
        """``axis`` on ``site`` (taken mod n_sites), identity elsewhere."""
        xb, zb = _BITS[axis.upper()]
        s = site % n_sites
        return cls(n_sites, xb << s, zb << s)

    @classmethod
    def from_sites(cls, n_sites: int, ops: Mapping[int, str], phase: int = 0) -> "PauliString":
        x = z = 0
        for site, axis in ops.items():
            xb, zb = _BITS[axis.upper()]
            s = site % n_sites
            if (x | z) >> s & 1:
                raise ValidationError(f"site {s} given twice")
            x |= xb << s
            z |= zb << s
        return cls(n_sites, x, z, phase)

    @classmethod
    def from_label(cls, label: str, n_sites: int | None = None) -> "PauliString":
        """Parse ``"Z0 X1 Z2"`` (sparse) or ``"ZXZ"`` (dense, site 0 first).

        A leading ``-``, ``i*`` or ``-i*`` sets the phase.
        """
        label = label.strip()
        phase = 0
        for k, prefix in sorted(_PHASE_PREFIX.items(), key=lambda kv: -len(kv[1])):
            if prefix and label.startswith(prefix):
                phase, label = k, label[len(prefix):].strip()
                break
        if label.startswith("+"):
            label = label[1:].strip()
        if re.search(r"\d", label) or label == "I" and n_sites is not None:
            ops = {}
            for tok in label.split():
                if tok == "I":
                    continue
                m = re.fullmatch(r"([XYZI])(\d+)", tok)
                if not m:
                    raise ValidationError(f"bad Pauli token {tok!r}")
                if m.group(1) != "I":
                    ops[int(m.group(2))] = m.group(1)
            if n_sites is None:
                n_sites = max(ops, default=0) + 1
            if any(s >= n_sites for s in ops):
                raise ValidationError(f"site index out of range in {label!r}")
            return cls.from_sites(n_sites, ops, phase)
        chars = label.replace(" ", "")
        if n_sites is not None and len(chars) != n_sites:
            raise DimensionError(f"label {label!r} does not have {n_sites} sites")
        if any(c not in _BITS for c in chars):
            raise ValidationError(f"bad Pauli label {label!r}")
        return cls.from_sites(len(chars), {s: c for s, c in enumerate(chars) if c != "I"}, phase)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    @property
    def coefficient(self) -> complex:
        return 1j ** self.phase

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def letter(self, site: int) -> str:
        return _LETTER[(self.x >> site & 1, self.z >> site & 1)]

    def support(self) -> list[int]:
        return [s for s in range(self.n_sites) if (self.x | self.z) >> s & 1]

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def without_phase(self) -> "PauliString":
        return PauliString(self.n_sites, self.x, self.z)

    def label(self, with_phase: bool = False) -> str:
        body = " ".join(f"{self.letter(s)}{s}" for s in self.support()) or "I"
        return _PHASE_PREFIX[self.phase] + body if with_phase else body

    def __str__(self):
        return self.label(with_phase=True)

    def __neg__(self):
        return PauliString(self.n_sites, self.x, self.z, self.phase + 2)

    def __mul__(self, other):
        if isinstance(other, PauliString):
            return pauli_mul(self, other)
        return NotImplemented

    def commutes(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix via Kronecker products (site 0 is the least significant bit)."""
        m = np.array([[1.0 + 0j]])
        for s in reversed(range(self.n_sites)):
            m = np.kron(m, _MATRIX[self.letter(s)])
        return self.coefficient * m


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Group product ``a @ b`` with exact phase."""
    _check_same_size(a, b)
    x, z = a.x ^ b.x, a.z ^ b.z
    # sigma(x,z) = i^|x&z| X^x Z^z, and Z^z1 X^x2 = (-1)^|z1&x2| X^x2 Z^z1
    k = (a.phase + b.phase + _popcount(a.x & a.z) + _popcount(b.x & b.z)
         + 2 * _popcount(a.z & b.x) - _popcount(x & z))
    return PauliString(a.n_sites, x, z, k)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff ``ab == ba``; parity of the symplectic product of the masks."""
    _check_same_size(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


Scalar = Union[int, float, complex]


class PauliSum:
    """Linear combination of phase-free Pauli strings with complex amplitudes.

    Term keys are ``(x_mask, z_mask)``; any string phase is folded into the
    amplitude on construction.  Instances are treated as immutable.
    """

    __slots__ = ("n_sites", "_terms")

    def __init__(self, n_sites: int, terms: Mapping[tuple[int, int], Scalar] | None = None,
                 prune: bool = True):
        if n_sites < 1:
            raise ValidationError("n_sites must be positive")
        self.n_sites = n_sites
        data = {k: complex(v) for k, v in (terms or {}).items()}
        self._terms = _pruned(data) if prune else data

    @classmethod
    def from_strings(cls, strings: Iterable[PauliString],
                     coeffs: Iterable[Scalar] | None = None,
                     n_sites: int | None = None) -> "PauliSum":
        strings = list(strings)
        if n_sites is None:
            if not strings:
                raise ValidationError("n_sites required for an empty sum")
            n_sites = strings[0].n_sites
        coeffs = [1.0] * len(strings) if coeffs is None else list(coeffs)
        if len(coeffs) != len(strings):
            raise ValidationError("one coefficient per string required")
        acc: dict[tuple[int, int], complex] = {}
        for p, c in zip(strings, coeffs):
            if p.n_sites != n_sites:
                raise DimensionError("strings act on different numbers of sites")
            acc[p.key] = acc.get(p.key, 0) + complex(c) * p.coefficient
        return cls(n_sites, acc)

    @classmethod
    def zero(cls, n_sites: int) -> "PauliSum":
        return cls(n_sites)

    @property
    def terms(self) -> Mapping[tuple[int, int], complex]:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliString(self.n_sites, x, z), c

    def strings(self) -> list[PauliString]:
        return [p for p, _ in self]

    def coefficient(self, p: PauliString) -> complex:
        return self._terms.get(p.key, 0j) * p.coefficient.conjugate()

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_sites == other.n_sites and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_sites, frozenset(self._terms.items())))

    def allclose(self, other: "PauliSum", atol: float = 1e-12) -> bool:
        _check_same_size(self, other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= atol for k in keys)

    def __add__(self, other):
        if isinstance(other, PauliString):
            other = PauliSum.from_strings([other])
        if not isinstance(other, PauliSum):
            return NotImplemented
        _check_same_size(self, other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return PauliSum(self.n_sites, acc)

    def __neg__(self):
        return PauliSum(self.n_sites, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum(self.n_sites, {k: v * other for k, v in self._terms.items()})
        if isinstance(other, PauliString):
            other = PauliSum.from_strings([other])
        if not isinstance(other, PauliSum):
            return NotImplemented
        _check_same_size(self, other)
        acc: dict[tuple[int, int], complex] = {}
        for pa, ca in self:
            for pb, cb in other:
                p = pauli_mul(pa, pb)
                acc[p.key] = acc.get(p.key, 0) + ca * cb * p.coefficient
        return PauliSum(self.n_sites, acc)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def is_hermitian(self, tol: float = 0.0) -> bool:
        # phase-free keys are Hermitian strings, so only the amplitudes matter
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def commutator(self, other: "PauliSum") -> "PauliSum":
        return pauli_sum_commutator(self, other)

    def to_text(self) -> str:
        lines = [f"# n_sites {self.n_sites}"]
        for p, c in sorted(self, key=lambda pc: (pc[0].support(), pc[0].key)):
            lines.append(f"{c.real!r} {c.imag!r} {p.label()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n_sites: int | None = None) -> "PauliSum":
        strings, coeffs = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.fullmatch(r"#\s*n_sites\s+(\d+)", line)
                if m and n_sites is None:
                    n_sites = int(m.group(1))
                continue
            parts = line.split(maxsplit=2)
            if len(parts) != 3:
                raise ValidationError(f"line {lineno}: expected 're im label'")
            if n_sites is None:
                raise ValidationError("n_sites missing (no header and no argument)")
            coeffs.append(complex(float(parts[0]), float(parts[1])))
            strings.append(PauliString.from_label(parts[2], n_sites))
        if n_sites is None:
            raise ValidationError("n_sites missing (no header and no argument)")
        return cls.from_strings(strings, coeffs, n_sites=n_sites)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix via Kronecker products; test-oracle path, small n only."""
        dim = 2 ** self.n_sites
        out = np.zeros((dim, dim), dtype=complex)
        for p, c in self:
            out += c * p.to_matrix()
        return out

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*[{p.label()}]" for p, c in self) or "0"
        return f"PauliSum(n_sites={self.n_sites}: {body})"


def _pruned(terms: dict) -> dict:
    if not terms:
        return {}
    scale = max(abs(v) for v in terms.values())
    if scale == 0:
        return {}
    cut = PRUNE_TOL * scale
    return {k: v for k, v in terms.items() if abs(v) > cut}


def pauli_sum_commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """``ab - ba``; only anticommuting pairs contribute (as ``2ab``)."""
    _check_same_size(a, b)
    acc: dict[tuple[int, int], complex] = {}
    for pa, ca in a:
        for pb, cb in b:
            if commutes(pa, pb):
                continue
            p = pauli_mul(pa, pb)
            acc[p.key] = acc.get(p.key, 0) + 2 * ca * cb * p.coefficient
    return PauliSum(a.n_sites, acc)


# --- Clifford conjugation -------------------------------------------------

GATE_ARITY = {"CZ": 2, "H": 1, "S": 1}


@dataclass(frozen=True)
class Gate:
    """``CZ(i, j)``, Hadamard ``H(i)`` or quarter z-rotation ``S(i) = exp(-i pi Z/4)``."""

    name: str
    sites: tuple[int, ...]

    def __post_init__(self):
        if self.name not in GATE_ARITY:
            raise ValidationError(f"unknown gate {self.name!r}")
        if len(self.sites) != GATE_ARITY[self.name]:
            raise ValidationError(f"{self.name} takes {GATE_ARITY[self.name]} site(s)")
        if len(set(self.sites)) != len(self.sites):
            raise ValidationError(f"{self.name} on repeated site {self.sites}")


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list; ``gates[0]`` acts first."""

    gates: tuple[Gate, ...] = field(default_factory=tuple)

    @classmethod
    def from_gates(cls, gates: Iterable[tuple]) -> "CliffordCircuit":
        return cls(tuple(Gate(name, tuple(sites)) for name, *sites in gates))

    def __add__(self, other: "CliffordCircuit") -> "CliffordCircuit":
        return CliffordCircuit(self.gates + other.gates)

    def __len__(self):
        return len(self.gates)

    def max_site(self) -> int:
        return max((s for g in self.gates for s in g.sites), default=-1)


def _gate_image(n: int, gate: Gate, site: int, axis: str) -> PauliString:
    """Image of the single-site ``axis`` (X or Z) on ``site`` under ``gate``."""
    if gate.name == "H":
        return PauliString.single(n, site, "Z" if axis == "X" else "X")
    if gate.name == "S":
        return PauliString.single(n, site, "Y" if axis == "X" else "Z")
    i, j = gate.sites
    if axis == "Z":
        return PauliString.single(n, site, "Z")
    other = j if site == i else i
    return PauliString.from_sites(n, {site: "X", other: "Z"})


def _conjugate_gate(p: PauliString, gate: Gate) -> PauliString:
    n = p.n_sites
    local = 0
    for s in gate.sites:
        local |= 1 << s
    if not (p.x | p.z) & local:
        return p
    out = PauliString(n, p.x & ~local, p.z & ~local, p.phase)
    for s in gate.sites:
        xb, zb = p.x >> s & 1, p.z >> s & 1
        if xb and zb:  # Y = i X Z
            img = pauli_mul(_gate_image(n, gate, s, "X"), _gate_image(n, gate, s, "Z"))
            img = PauliString(n, img.x, img.z, img.phase + 1)
        elif xb:
            img = _gate_image(n, gate, s, "X")
        elif zb:
            img = _gate_image(n, gate, s, "Z")
        else:
            continue
        out = pauli_mul(out, img)
    return out


def conjugate_by_clifford(p, circuit: CliffordCircuit):
    """``C p C^dagger`` for a PauliString (exact) or PauliSum (termwise)."""
    if circuit.max_site() >= p.n_sites:
        raise ValidationError(f"gate site {circuit.max_site()} outside {p.n_sites} sites")
    if isinstance(p, PauliSum):
        images = []
        coeffs = []
        for q, c in p:
            images.append(conjugate_by_clifford(q, circuit))
            coeffs.append(c)
        return PauliSum.from_strings(images, coeffs, n_sites=p.n_sites)
    for gate in circuit.gates:
        p = _conjugate_gate(p, gate)
    return p


# --- Heisenberg picture ---------------------------------------------------

def heisenberg_rotate(p: PauliString, g: PauliString, theta: float) -> PauliSum:
    """``exp(i theta g) p exp(-i theta g)`` for a Hermitian Pauli string ``g``."""
    _check_same_size(p, g)
    if not g.is_hermitian():
        raise ValidationError("rotation generator must be Hermitian (phase +-1)")
    if commutes(p, g):
        return PauliSum.from_strings([p])
    gp = pauli_mul(g, p)
    return PauliSum.from_strings([p, gp], [math.cos(2 * theta), 1j * math.sin(2 * theta)])


def check_pairwise_commuting(generators: Sequence[PauliString]) -> None:
    for a, b in itertools.combinations(generators, 2):
        if not commutes(a, b):
            raise PreconditionError(f"generators {a} and {b} do not commute")


def heisenberg_evolve_commuting(p, generators: Sequence[PauliString], t: float) -> PauliSum:
    """``U^dagger p U`` with ``U = exp(-i t sum(generators))``.

    The generators must pairwise commute, so the propagator factorises and the
    rotations may be applied one at a time.
    """
    generators = list(generators)
    check_pairwise_commuting(generators)
    current = p if isinstance(p, PauliSum) else PauliSum.from_strings([p])
    c2, s2 = math.cos(2 * t), math.sin(2 * t)
    for g in generators:
        _check_same_size(current, g)
        if not g.is_hermitian():
            raise ValidationError("rotation generator must be Hermitian (phase +-1)")
        acc: dict[tuple[int, int], complex] = {}
        for q, c in current:
            if commutes(q, g):
                acc[q.key] = acc.get(q.key, 0) + c
                continue
            acc[q.key] = acc.get(q.key, 0) + c * c2
            gq = pauli_mul(g, q)
            acc[gq.key] = acc.get(gq.key, 0) + c * 1j * s2 * gq.coefficient
        current = PauliSum(current.n_sites, acc)
    return current
