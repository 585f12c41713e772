"""Circulant graphs, stabilizer Hamiltonians, batteries and chargers."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Union

import numpy as np

from .errors import ValidationError
from .pauli import CliffordCircuit, Gate, PauliString, PauliSum

AXES = ("X", "Y", "Z")


def k_max(n: int) -> int:
    """Largest admissible even regularity: N-2 for even N, N-1 for odd N."""
    return n - 2 if n % 2 == 0 else n - 1


def validate_nk(n: int, k: int) -> None:
    if int(n) != n or n <= 2:
        raise ValidationError(f"N must be an integer > 2, got {n}")
    if int(k) != k or k % 2:
        raise ValidationError(f"K must be an even integer, got {k}")
    if not 0 <= k <= k_max(n):
        raise ValidationError(f"K={k} outside [0, {k_max(n)}] for N={n}")


def _axis(axis: str) -> str:
    a = str(axis).upper()
    if a not in AXES:
        raise ValidationError(f"axis must be one of X, Y, Z; got {axis!r}")
    return a


@dataclass(frozen=True)
class CirculantGraph:
    n_nodes: int
    regularity: int
    edges: frozenset

    def neighbors(self, i: int) -> list[int]:
        i %= self.n_nodes
        half = self.regularity // 2
        return sorted({(i + j) % self.n_nodes for j in range(1, half + 1)}
                      | {(i - j) % self.n_nodes for j in range(1, half + 1)})

    def degree(self, i: int) -> int:
        return sum(1 for e in self.edges if i % self.n_nodes in e)

    def is_connected(self) -> bool:
        seen, stack = {0}, [0]
        while stack:
            for v in self.neighbors(stack.pop()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n_nodes


def build_graph(n: int, k: int) -> CirculantGraph:
    """Circulant graph linking each node to its K/2 nearest neighbours on each side."""
    validate_nk(n, k)
    edges = set()
    for i in range(n):
        for j in range(1, k // 2 + 1):
            a, b = i, (i + j) % n
            edges.add((min(a, b), max(a, b)))
    return CirculantGraph(n, k, frozenset(edges))


def stabilizer_generator(n: int, k: int, i: int) -> PauliString:
    """``X_i`` dressed with ``Z`` on every graph neighbour of node ``i``."""
    validate_nk(n, k)
    if not 0 <= i < n:
        raise ValidationError(f"site {i} outside [0, {n})")
    z = 0
    for j in range(1, k // 2 + 1):
        z |= 1 << ((i + j) % n)
        z |= 1 << ((i - j) % n)
    return PauliString(n, 1 << i, z)


def stabilizer_generators(n: int, k: int) -> list[PauliString]:
    return [stabilizer_generator(n, k, i) for i in range(n)]


def stabilizer_hamiltonian(n: int, k: int) -> PauliSum:
    return PauliSum.from_strings(stabilizer_generators(n, k))


def stabilizer_spectrum(n: int) -> np.ndarray:
    """Ascending spectrum of any N-site stabilizer (or local) Hamiltonian.

    N commuting, independent, +-1-valued generators: eigenvalue N - 2w with
    multiplicity C(N, w).
    """
    return np.repeat(np.arange(-n, n + 1, 2, dtype=float), [comb(n, w) for w in range(n + 1)])


def local_battery(n: int, axis: str) -> PauliSum:
    axis = _axis(axis)
    if n < 1:
        raise ValidationError("N must be positive")
    return PauliSum.from_strings([PauliString.single(n, i, axis) for i in range(n)])


def local_rotation_circuit(n: int, axis: str) -> CliffordCircuit:
    """Site-wise unitary taking the X battery to the ``axis`` battery.

    Identity for X, quarter z-rotations for Y, Hadamards for Z.
    """
    axis = _axis(axis)
    name = {"X": None, "Y": "S", "Z": "H"}[axis]
    if name is None:
        return CliffordCircuit()
    return CliffordCircuit(tuple(Gate(name, (i,)) for i in range(n)))


def cz_equivalence_circuit(n: int, k_from: int, k_to: int) -> CliffordCircuit:
    """CZ layers mapping ``H_(N,k_from)`` onto ``H_(N,k_to)`` by conjugation."""
    validate_nk(n, k_from)
    validate_nk(n, k_to)
    if k_from >= k_to:
        raise ValidationError(f"need k_from < k_to, got {k_from} >= {k_to}")
    gates = []
    for j in range(k_from + 2, k_to + 1, 2):
        for i in range(n):
            gates.append(Gate("CZ", (i, (i + j // 2) % n)))
    return CliffordCircuit(tuple(gates))


@dataclass(frozen=True)
class WeightVector:
    """Couplings ``J_K`` of the collective charger for K = 2, 4, ..., K_max."""

    ks: tuple[int, ...]
    weights: tuple[float, ...]
    alpha: float
    normalized: bool = True

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.ks, self.weights))


def collective_weights(n: int, alpha: float, normalized: bool = True) -> WeightVector:
    """Power-law couplings ``J_K ~ (K/2)**-alpha``.

    With ``normalized`` the weights sum to one; otherwise every J_K is the bare
    ``(K/2)**-alpha`` (unit weights at alpha = 0).
    """
    if int(n) != n or n <= 2:
        raise ValidationError(f"N must be an integer > 2, got {n}")
    if alpha < 0:
        raise ValidationError("alpha must be >= 0")
    ks = tuple(range(2, k_max(n) + 1, 2))
    raw = np.array([(k / 2) ** (-alpha) for k in ks])
    if normalized:
        raw = raw / raw.sum()
    return WeightVector(ks, tuple(float(w) for w in raw), float(alpha), normalized)


def collective_charger(n: int, alpha: float, normalized: bool = True) -> tuple[PauliSum, WeightVector]:
    wv = collective_weights(n, alpha, normalized)
    total = PauliSum.zero(n)
    for k, w in zip(wv.ks, wv.weights):
        total = total + stabilizer_hamiltonian(n, k) * w
    return total, wv


# --- battery / charger descriptors ----------------------------------------

@dataclass(frozen=True)
class LocalBattery:
    axis: str

    def __post_init__(self):
        object.__setattr__(self, "axis", _axis(self.axis))

    def describe(self) -> str:
        return f"Local{self.axis}"


@dataclass(frozen=True)
class RegularBattery:
    k: int

    def describe(self) -> str:
        return f"Regular({self.k})"


@dataclass(frozen=True)
class RegularCharger:
    k: int

    def describe(self) -> str:
        return f"Regular({self.k})"


@dataclass(frozen=True)
class CollectiveCharger:
    alpha: float
    normalized: bool = True

    def describe(self) -> str:
        return f"Collective({self.alpha:g}{'' if self.normalized else ', unnormalized'})"


Battery = Union[LocalBattery, RegularBattery]
Charger = Union[RegularCharger, CollectiveCharger]


def battery_hamiltonian(battery: Battery, n: int) -> PauliSum:
    if isinstance(battery, LocalBattery):
        return local_battery(n, battery.axis)
    return stabilizer_hamiltonian(n, battery.k)


def charger_hamiltonian(charger: Charger, n: int) -> PauliSum:
    if isinstance(charger, RegularCharger):
        return stabilizer_hamiltonian(n, charger.k)
    return collective_charger(n, charger.alpha, charger.normalized)[0]


def ground_state(battery: Battery, n: int):
    """Ground state of the battery Hamiltonian (energy -N in every case).

    Regular batteries are built from the X-battery ground state by the CZ
    equivalence circuit, not by diagonalisation.
    """
    from .engine import QuantumState, apply_circuit

    if isinstance(battery, LocalBattery):
        return QuantumState.axis_product(n, battery.axis, -1)
    validate_nk(n, battery.k)
    psi = QuantumState.axis_product(n, "X", -1)
    if battery.k == 0:
        return psi
    return apply_circuit(cz_equivalence_circuit(n, 0, battery.k), psi)


@dataclass(frozen=True)
class ModelSpec:
    """Battery/charger pair on N sites plus the time grid to sample."""

    n_sites: int
    battery: Battery
    charger: Charger
    t_min: float = 0.0
    t_max: float = float(np.pi)
    t_points: int = 101

    def __post_init__(self):
        n = self.n_sites
        if isinstance(self.battery, RegularBattery):
            validate_nk(n, self.battery.k)
        elif int(n) != n or n <= 2:
            raise ValidationError(f"N must be an integer > 2, got {n}")
        if isinstance(self.charger, RegularCharger):
            validate_nk(n, self.charger.k)
            if isinstance(self.battery, RegularBattery) and self.battery.k == self.charger.k:
                raise ValidationError("battery and charger regularities must differ")
            if isinstance(self.battery, LocalBattery) and self.battery.axis == "X" and self.charger.k == 0:
                raise ValidationError("battery and charger are both H_(N,0)")
        elif self.charger.alpha < 0:
            raise ValidationError("alpha must be >= 0")
        if self.t_points < 2 and not (self.t_points == 1 and self.t_min == self.t_max):
            raise ValidationError("t_points must be >= 2")
        if self.t_max < self.t_min:
            raise ValidationError("t_max < t_min")

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_points)

    def battery_hamiltonian(self) -> PauliSum:
        return battery_hamiltonian(self.battery, self.n_sites)

    def charger_hamiltonian(self) -> PauliSum:
        return charger_hamiltonian(self.charger, self.n_sites)

    @classmethod
    def from_config(cls, cfg: Mapping[str, object]) -> "ModelSpec":
        """Build from a parsed config mapping (see :mod:`kregbattery.config`)."""
        def need(key):
            if key not in cfg:
                raise ValidationError(f"missing key {key!r}")
            return cfg[key]

        n = int(need("n_sites"))
        if "battery_axis" in cfg and "battery_k" in cfg:
            raise ValidationError("give only one of battery_axis / battery_k")
        if "battery_k" in cfg:
            battery: Battery = RegularBattery(int(cfg["battery_k"]))
        else:
            battery = LocalBattery(str(need("battery_axis")))
        if "charger_k" in cfg and "charger_alpha" in cfg:
            raise ValidationError("give only one of charger_k / charger_alpha")
        if "charger_alpha" in cfg:
            charger: Charger = CollectiveCharger(float(cfg["charger_alpha"]),
                                                 not bool(cfg.get("unnormalized_weights", False)))
        else:
            charger = RegularCharger(int(need("charger_k")))
        return cls(n, battery, charger,
                   float(cfg.get("t_min", 0.0)), float(cfg.get("t_max", np.pi)),
                   int(cfg.get("t_points", 101)))
