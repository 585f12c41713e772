"""Named consistency checks between the engines and the analytic results.

Every check returns a measured error and its tolerance; failures are data.
Known discrepancies between published formulas and exact simulation are
reported with status ``expected-discrepancy`` rather than ``fail``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closed_form import (
    PERIOD,
    closed_form_average_work,
    closed_form_work,
    integrated_average_work,
    special_case_work,
)
from .engine import (
    QuantumState,
    evolve_spectral,
    evolve_stabilizer_product,
    expectation,
    partial_trace_block,
    to_dense,
)
from .errors import ValidationError
from .metrics import (
    average_work,
    block_energy_and_ergotropy,
    ergotropy,
    general_work,
    max_average_power,
    stored_work,
    work_function,
    work_series,
)
from .models import (
    LocalBattery,
    ModelSpec,
    RegularBattery,
    RegularCharger,
    collective_weights,
    cz_equivalence_circuit,
    ground_state,
    k_max,
    stabilizer_generators,
)
from .pauli import (
    PauliString,
    PauliSum,
    commutes,
    conjugate_by_clifford,
    heisenberg_evolve_commuting,
    pauli_mul,
    pauli_sum_commutator,
)

GROUPS = ("pauli_algebra", "model_builder", "dense_engine", "metrics", "oracles")
FAULTS = ("sign_flip",)


@dataclass
class Outcome:
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""
    expected_discrepancy: bool = False


@dataclass
class Context:
    max_n: int
    rng: np.random.Generator
    fault: str | None

    def generators(self, n: int, k: int) -> list[PauliString]:
        gens = stabilizer_generators(n, k)
        if self.fault == "sign_flip":
            gens[0] = -gens[0]
        return gens

    def hamiltonian(self, n: int, k: int) -> PauliSum:
        return PauliSum.from_strings(self.generators(n, k))

    def ns(self, lo: int = 3) -> range:
        return range(lo, self.max_n + 1)


def _pairs(n):
    ks = range(0, k_max(n) + 1, 2)
    return [(a, b) for a in ks for b in ks if a < b]


def _outcome(err: float, tol: float, detail: str = "") -> Outcome:
    return Outcome(float(err), tol, bool(err <= tol), detail)


# --- pauli_algebra --------------------------------------------------------------

def check_mul_vs_dense(ctx: Context) -> Outcome:
    worst = 0.0
    for _ in range(200):
        n = int(ctx.rng.integers(1, 5))
        a = PauliString(n, int(ctx.rng.integers(2 ** n)), int(ctx.rng.integers(2 ** n)), int(ctx.rng.integers(4)))
        b = PauliString(n, int(ctx.rng.integers(2 ** n)), int(ctx.rng.integers(2 ** n)), int(ctx.rng.integers(4)))
        ma, mb = a.to_matrix(), b.to_matrix()
        worst = max(worst, np.abs(pauli_mul(a, b).to_matrix() - ma @ mb).max())
        dense_commute = np.allclose(ma @ mb, mb @ ma)
        worst = max(worst, float(dense_commute != commutes(a, b)))
    return _outcome(worst, 0.0, "200 random pairs, n <= 4")


def check_commutation_within_k(ctx: Context) -> Outcome:
    bad = 0
    for n in ctx.ns():
        for k in range(0, k_max(n) + 1, 2):
            gens = ctx.generators(n, k)
            bad += sum(not commutes(a, b) for a, b in itertools.combinations(gens, 2))
            bad += len(pauli_sum_commutator(PauliSum.from_strings(gens), PauliSum.from_strings(gens[:1])))
    return _outcome(bad, 0, "non-commuting pairs within one K")


def check_commutator_across_k(ctx: Context) -> Outcome:
    comm = pauli_sum_commutator(ctx.hamiltonian(8, 2), ctx.hamiltonian(8, 4))
    return Outcome(len(comm), 1, len(comm) >= 1, "terms in [H_(8,2), H_(8,4)] (needs >= 1)")


def check_clifford_equivalence(ctx: Context) -> Outcome:
    bad = 0
    for n in ctx.ns():
        for a, b in _pairs(n):
            image = conjugate_by_clifford(PauliSum.from_strings(stabilizer_generators(n, a)),
                                          cz_equivalence_circuit(n, a, b))
            if image != ctx.hamiltonian(n, b):
                bad += 1
    return _outcome(bad, 0, "(N, K', K) pairs whose CZ image differs from H_(N,K)")


def check_cz_involution(ctx: Context) -> Outcome:
    bad = 0
    for n in ctx.ns():
        for a, b in _pairs(n):
            circ = cz_equivalence_circuit(n, a, b)
            for _ in range(5):
                p = PauliString(n, int(ctx.rng.integers(2 ** n)), int(ctx.rng.integers(2 ** n)))
                bad += conjugate_by_clifford(conjugate_by_clifford(p, circ), circ) != p
    return _outcome(bad, 0, "random strings not restored by applying the circuit twice")


def check_heisenberg_vs_dense(ctx: Context) -> Outcome:
    n, t = 5, 0.37
    gens = ctx.generators(n, 2)
    U = evolve_matrix(PauliSum.from_strings(gens), t)
    worst = 0.0
    for axis in "XYZ":
        p = PauliString.single(n, 2, axis)
        op = heisenberg_evolve_commuting(p, gens, t)
        worst = max(worst, np.abs(op.to_matrix() - U.conj().T @ p.to_matrix() @ U).max())
    return _outcome(worst, 1e-12, "U^dag A_k U at N=5, K=2, t=0.37")


def evolve_matrix(op: PauliSum, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(op.to_matrix())
    return (v * np.exp(-1j * w * t)) @ v.conj().T


# --- model_builder ----------------------------------------------------------------

def check_hamiltonian_spectrum(ctx: Context) -> Outcome:
    from .models import stabilizer_spectrum

    worst = 0.0
    for n in range(3, min(ctx.max_n, 9) + 1):
        for k in range(0, k_max(n) + 1, 2):
            ev = to_dense(ctx.hamiltonian(n, k)).eigenvalues()
            worst = max(worst, np.abs(np.sort(ev) - stabilizer_spectrum(n)).max())
    return _outcome(worst, 1e-9, "dense spectrum vs {N - 2w} with binomial multiplicity")


def check_ground_state_stabilized(ctx: Context) -> Outcome:
    worst = 0.0
    for n in ctx.ns():
        for k in range(2, k_max(n) + 1, 2):
            psi = ground_state(RegularBattery(k), n)
            for g in ctx.generators(n, k):
                worst = max(worst, abs(expectation(PauliSum.from_strings([g]), psi) + 1))
    return _outcome(worst, 1e-12, "max |<g_i> + 1| over generators")


def check_generator_product(ctx: Context) -> Outcome:
    bad = 0
    for n in ctx.ns():
        for k in range(0, k_max(n) + 1, 2):
            prod = PauliString.identity(n)
            for g in ctx.generators(n, k):
                prod = pauli_mul(prod, g)
            bad += prod.without_phase() != PauliString(n, (1 << n) - 1, 0) or prod.phase % 2 != 0
    return _outcome(bad, 0, "(N, K) where prod_i H_(i,K) != +-prod_i X_i")


def check_collective_weights(ctx: Context) -> Outcome:
    w = collective_weights(8, 1.0).weights
    return _outcome(max(abs(a - b) for a, b in zip(w, (6 / 11, 3 / 11, 2 / 11))), 1e-12, "N=8, alpha=1")


# --- dense_engine -------------------------------------------------------------------

def check_cross_engine(ctx: Context) -> Outcome:
    worst = 0.0
    for n in ctx.ns():
        for k in range(0, k_max(n) + 1, 2):
            gens = ctx.generators(n, k)
            H = to_dense(PauliSum.from_strings(gens))
            for _ in range(3):
                psi = QuantumState.product([ctx.rng.normal(size=2) + 1j * ctx.rng.normal(size=2)
                                            for _ in range(n)])
                t = float(ctx.rng.uniform(0, 2 * math.pi))
                a = evolve_stabilizer_product(gens, psi, t).data
                b = evolve_spectral(H, psi, [t])[0].data
                worst = max(worst, np.abs(a - b).max())
    return _outcome(worst, 1e-10, "product formula vs spectral, random product states")


def check_decorrelation(ctx: Context) -> Outcome:
    worst = 0.0
    for n in ctx.ns(4):
        up = QuantumState.axis_product(n, "Z", 1)
        for k in range(2, k_max(n) + 1, 2):
            psi = evolve_stabilizer_product(ctx.generators(n, k), ground_state(LocalBattery("Z"), n), math.pi / 2)
            worst = max(worst, abs(abs(up.overlap(psi)) - 1))
    return _outcome(worst, 1e-10, "| |<all up|Psi(pi/2)>| - 1 |")


def check_partial_trace(ctx: Context) -> Outcome:
    n = 6
    psi = QuantumState.pure(ctx.rng.normal(size=2 ** n) + 1j * ctx.rng.normal(size=2 ** n), normalize=True)
    worst = np.abs(partial_trace_block(psi, n).data - psi.to_density().data).max()
    for m in range(1, n + 1):
        rho = partial_trace_block(psi, m)
        worst = max(worst, abs(rho.trace() - 1), np.abs(rho.data - rho.data.conj().T).max())
        worst = max(worst, max(0.0, -np.linalg.eigvalsh(rho.data).min()))
        a = partial_trace_block(psi.to_density(), m).data
        worst = max(worst, np.abs(a - rho.data).max())
    return _outcome(worst, 1e-12, "trace/Hermiticity/PSD and pure-vs-density agreement, N=6")


# --- metrics & oracles ------------------------------------------------------------

def check_closed_form_work(ctx: Context) -> Outcome:
    worst = 0.0
    ts = np.linspace(0, math.pi, 101)
    for n in ctx.ns(4):
        for k in range(2, k_max(n) + 1, 2):
            for axis in "XYZ":
                if axis != "Z" and k == k_max(n):
                    continue
                w = work_function(ModelSpec(n, LocalBattery(axis), RegularCharger(k)))(ts)
                worst = max(worst, np.abs(w - closed_form_work(axis, n, k, ts)).max())
    return _outcome(worst, 1e-9, "simulated W vs N(1 - cos^(K+r) 2t)")


def check_interchange(ctx: Context) -> Outcome:
    worst = 0.0
    ts = np.linspace(0, math.pi, 61)
    for n in ctx.ns(5):
        for a, b in _pairs(n):
            if a == 0:
                continue
            worst = max(worst, general_work(n, a, b, ts).max_abs_diff(general_work(n, b, a, ts)))
    return _outcome(worst, 1e-9, "|W_(N,K',K) - W_(N,K,K')| over all K' < K")


def check_ergotropy_equals_work(ctx: Context) -> Outcome:
    worst = 0.0
    for n in (4, 5, 6):
        for axis in "XYZ":
            H_B = PauliSum.from_strings([PauliString.single(n, i, axis) for i in range(n)])
            dense = to_dense(H_B)
            psi0 = ground_state(LocalBattery(axis), n)
            gens = stabilizer_generators(n, 2)
            for t in ctx.rng.uniform(0, math.pi, 4):
                psi = evolve_stabilizer_product(gens, psi0, t)
                worst = max(worst, abs(ergotropy(psi, dense) - stored_work(H_B, psi0, psi)))
    return _outcome(worst, 1e-9, "full-system ergotropy vs stored work")


def check_block_ergotropy(ctx: Context) -> Outcome:
    """Schmidt-spectrum ergotropy against direct diagonalisation."""
    worst = 0.0
    n = 6
    for axis in "XYZ":
        psi = evolve_stabilizer_product(stabilizer_generators(n, 2), ground_state(LocalBattery(axis), n), 0.61)
        for m in range(1, n + 1):
            energy, erg = block_energy_and_ergotropy(psi, m, axis)
            H_m = PauliSum.from_strings([PauliString.single(m, i, axis) for i in range(m)])
            worst = max(worst, abs(erg - ergotropy(partial_trace_block(psi, m), H_m)))
    return _outcome(worst, 1e-10, "N=6, all m, t=0.61")


def check_decorrelation_block(ctx: Context) -> Outcome:
    worst = 0.0
    for n in ctx.ns(4):
        psi = evolve_stabilizer_product(ctx.generators(n, 2), ground_state(LocalBattery("Z"), n), math.pi / 2)
        for m in range(1, n + 1):
            energy, erg = block_energy_and_ergotropy(psi, m, "Z")
            worst = max(worst, abs(erg - (energy + m)))
    return _outcome(worst, 1e-9, "block ergotropy vs block work at t = pi/2, Z battery")


def check_average_work_law(ctx: Context) -> Outcome:
    worst = 0.0
    n = 8
    for axis in "XYZ":
        for k in (2, 4):
            period = PERIOD[axis]
            spec = ModelSpec(n, LocalBattery(axis), RegularCharger(k), 0.0, period, 401)
            worst = max(worst, abs(average_work(work_series(spec), period, n) - integrated_average_work(axis, k)))
    return _outcome(worst, 1e-6, "Simpson average of simulated W vs exact average of the law")


def check_average_work_printed(ctx: Context) -> Outcome:
    n, k = 8, 2
    spec = ModelSpec(n, LocalBattery("X"), RegularCharger(k), 0.0, PERIOD["X"], 401)
    err = abs(average_work(work_series(spec), PERIOD["X"], n) - closed_form_average_work("X", k))
    out = _outcome(err, 1e-6, "published Gamma expression averages cos^(2K), not cos^K")
    out.expected_discrepancy = not out.passed
    return out


def check_special_y3(ctx: Context) -> Outcome:
    ts = np.linspace(0, math.pi, 101)
    w = work_function(ModelSpec(3, LocalBattery("Y"), RegularCharger(2)))(ts)
    return _outcome(np.abs(w - special_case_work("Y_N3_K2", ts)).max(), 1e-9, "W^Y_(3,2) = 6 sin^2 3t")


def check_special_x4(ctx: Context) -> Outcome:
    ts = np.linspace(0, math.pi, 101)
    w = work_function(ModelSpec(4, LocalBattery("X"), RegularCharger(2)))(ts)
    out = _outcome(np.abs(w - special_case_work("X_N4_K2", ts)).max(), 1e-9,
                   "published W^X_(4,2) vs simulation (simulation: 8 sin^2 2t)")
    out.expected_discrepancy = not out.passed
    return out


def check_prop3_printed(ctx: Context) -> Outcome:
    n = 6
    ts = np.linspace(0, math.pi, 101)
    w = work_function(ModelSpec(n, LocalBattery("Z"), RegularCharger(2)))(ts)
    out = _outcome(np.abs(w - 2 * n * np.sin(2 * ts) ** 2).max(), 1e-9,
                   "published 2N sin^2 2t vs simulation (simulation: N(1 - cos 2t))")
    out.expected_discrepancy = not out.passed
    return out


def check_period_anomaly(ctx: Context) -> Outcome:
    def halving_dev(n, k):
        w = work_function(ModelSpec(n, LocalBattery("X"), RegularCharger(k)))
        ts = np.linspace(0, PERIOD["X"] / 2, 101)
        return float(np.abs(w(ts) - w(ts + PERIOD["X"] / 2)).max() / n)

    halved = halving_dev(6, 4)
    not_halved = halving_dev(8, 6)
    ok = halved < 1e-9 and not_halved > 0.1
    return Outcome(halved, 1e-9, ok, f"N=6,K=4 dev {halved:.2e}; N=8,K=6 dev {not_halved:.3f} (needs > 0.1)")


def check_power_linear(ctx: Context) -> Outcome:
    ps = []
    for n in (5, 10):
        w = work_function(ModelSpec(n, LocalBattery("Z"), RegularCharger(2)))
        ps.append(max_average_power(w)[0])
    return _outcome(abs(ps[1] / ps[0] - 2), 1e-9, "P(Z, N=10) / P(Z, N=5) = 2")


CHECKS: list[tuple[str, str, Callable[[Context], Outcome]]] = [
    ("mul_vs_dense", "pauli_algebra", check_mul_vs_dense),
    ("commutation_within_k", "pauli_algebra", check_commutation_within_k),
    ("commutator_across_k", "pauli_algebra", check_commutator_across_k),
    ("clifford_equivalence", "pauli_algebra", check_clifford_equivalence),
    ("cz_involution", "pauli_algebra", check_cz_involution),
    ("heisenberg_vs_dense", "pauli_algebra", check_heisenberg_vs_dense),
    ("hamiltonian_spectrum", "model_builder", check_hamiltonian_spectrum),
    ("ground_state_stabilized", "model_builder", check_ground_state_stabilized),
    ("generator_product", "model_builder", check_generator_product),
    ("collective_weights", "model_builder", check_collective_weights),
    ("cross_engine", "dense_engine", check_cross_engine),
    ("decorrelation_pi_half", "dense_engine", check_decorrelation),
    ("partial_trace", "dense_engine", check_partial_trace),
    ("closed_form_work", "metrics", check_closed_form_work),
    ("interchange", "metrics", check_interchange),
    ("ergotropy_equals_work", "metrics", check_ergotropy_equals_work),
    ("block_ergotropy", "metrics", check_block_ergotropy),
    ("block_decorrelation", "metrics", check_decorrelation_block),
    ("average_work_law", "oracles", check_average_work_law),
    ("average_work_printed_gamma", "oracles", check_average_work_printed),
    ("special_Y_N3_K2", "oracles", check_special_y3),
    ("special_X_N4_K2", "oracles", check_special_x4),
    ("printed_Z_work_2N_sin2_2t", "oracles", check_prop3_printed),
    ("period_anomaly", "oracles", check_period_anomaly),
    ("power_linear_in_N", "oracles", check_power_linear),
]


def run_checks(groups=None, max_n: int = 10, seed: int = 0, fault: str | None = None):
    from .experiments import ResultTable

    if groups is not None:
        unknown = set(groups) - set(GROUPS) - {name for name, _, _ in CHECKS}
        if unknown:
            raise ValidationError(f"unknown check group(s): {sorted(unknown)}")
    if fault is not None and fault not in FAULTS:
        raise ValidationError(f"unknown fault {fault!r}; choose from {FAULTS}")
    if max_n < 8:
        raise ValidationError("max_n must be >= 8 (several checks use N = 8)")
    table = ResultTable(["check", "group", "status", "measured", "tolerance", "detail"])
    for name, group, fn in CHECKS:
        if groups is not None and group not in groups and name not in groups:
            continue
        ctx = Context(max_n, np.random.default_rng(seed), fault)
        out = fn(ctx)
        status = "pass" if out.passed else "expected-discrepancy" if out.expected_discrepancy else "fail"
        table.add(name, group, status, out.measured, out.tolerance, out.detail)
    return table


def failed(table) -> bool:
    return any(s == "fail" for s in table.column("status"))
