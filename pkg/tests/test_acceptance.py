"""Acceptance criteria, each checked at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line.  Run directly for a summary:

    python3 tests/test_acceptance.py

Where a criterion fails, the informational lines printed alongside it show
the corresponding quantity measured on a range where the underlying law holds.
"""
from __future__ import annotations

import functools
import itertools
import math
import sys

import numpy as np

from kregbattery.closed_form import (
    PERIOD,
    closed_form_average_work,
    closed_form_power_per_site,
    closed_form_work,
    integrated_average_work,
    special_case_work,
)
from kregbattery.engine import (
    QuantumState,
    evolve_spectral,
    evolve_stabilizer_product,
    to_dense,
)
from kregbattery.metrics import (
    average_work,
    block_energy_and_ergotropy,
    ergotropy,
    fraction_extractable,
    general_work,
    max_average_power,
    scaling_exponent,
    stored_work,
    work_function,
    work_series,
)
from kregbattery.models import (
    CollectiveCharger,
    LocalBattery,
    ModelSpec,
    RegularCharger,
    cz_equivalence_circuit,
    ground_state,
    k_max,
    local_battery,
    stabilizer_generators,
    stabilizer_hamiltonian,
)
from kregbattery.pauli import PauliSum, commutes, conjugate_by_clifford, pauli_sum_commutator
from kregbattery.verify import run_checks

RESULTS: dict[str, bool] = {}


def report(name: str, ok: bool, detail: str) -> bool:
    RESULTS[name] = bool(ok)
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line, file=sys.__stdout__, flush=True)
    return bool(ok)


def info(text: str) -> None:
    print(f"     info: {text}", file=sys.__stdout__, flush=True)


def even_ks(n, lo=0):
    return range(lo, k_max(n) + 1, 2)


# 1 ---------------------------------------------------------------------------------

def test_c01_closed_form_work():
    ts = np.linspace(0, math.pi, 101)
    worst, cases = 0.0, 0
    for n in range(4, 13):
        for k in even_ks(n, 2):
            for axis in "XYZ":
                if axis != "Z" and k >= k_max(n):
                    continue
                w = work_series(ModelSpec(n, LocalBattery(axis), RegularCharger(k), 0.0, math.pi, 101),
                                engine="product")
                worst = max(worst, np.abs(w.values - closed_form_work(axis, n, k, ts)).max())
                cases += 1
    assert report("C1 closed-form work", worst < 1e-9, f"{cases} cases, max abs err {worst:.2e} (< 1e-9)")


# 2 ---------------------------------------------------------------------------------

def test_c02_interchange():
    ts = np.linspace(0, math.pi, 201)
    worst = 0.0
    for n, a, b in [(6, 2, 4), (8, 2, 4), (8, 2, 6), (8, 4, 6)]:
        worst = max(worst, general_work(n, a, b, ts).max_abs_diff(general_work(n, b, a, ts)))
    assert report("C2 battery/charger interchange", worst < 1e-9, f"max |dW| {worst:.2e} (< 1e-9)")


# 3 ---------------------------------------------------------------------------------

def test_c03_clifford_equivalence():
    bad, pairs = 0, 0
    for n in range(3, 13):
        for a, b in itertools.combinations(even_ks(n), 2):
            img = conjugate_by_clifford(stabilizer_hamiltonian(n, a), cz_equivalence_circuit(n, a, b))
            target = stabilizer_hamiltonian(n, b)
            same_terms = set(p.key for p in img.strings()) == set(p.key for p in target.strings())
            unit_phases = all(c == 1 for _, c in img)
            bad += not (same_terms and unit_phases and img == target)
            pairs += 1
    assert report("C3 Clifford equivalence", bad == 0, f"{pairs} (N, K', K) pairs, {bad} mismatches (exact)")


# 4 ---------------------------------------------------------------------------------

def test_c04_commutation_structure():
    bad = 0
    for n in range(3, 13):
        for k in even_ks(n):
            gens = stabilizer_generators(n, k)
            bad += sum(not commutes(a, b) for a, b in itertools.combinations(gens, 2))
            H = PauliSum.from_strings(gens)
            bad += len(pauli_sum_commutator(H, H))
    cross = len(pauli_sum_commutator(stabilizer_hamiltonian(8, 2), stabilizer_hamiltonian(8, 4)))
    ok = bad == 0 and cross > 0
    assert report("C4 commutation structure", ok,
                  f"non-commuting within-K pairs {bad}; [H_(8,2), H_(8,4)] has {cross} terms")


# 5 ---------------------------------------------------------------------------------

def _simpson_average(axis, n, k, points=401):
    period = PERIOD[axis]
    spec = ModelSpec(n, LocalBattery(axis), RegularCharger(k), 0.0, period, points)
    return average_work(work_series(spec), period, n)


def test_c05_average_work():
    n = 12
    rows, ok = [], True
    for k in (2, 4, 6, 8):
        sim = _simpson_average("X", n, k)
        ref = closed_form_average_work("X", k)
        ok &= abs(sim - ref) < 1e-6
        rows.append((k, sim, ref, integrated_average_work("X", k)))
    yz = [_simpson_average(a, n, k) for a in "YZ" for k in (2, 4, 6, 8)]
    yz_ok = max(abs(v - 1) for v in yz) < 1e-6
    k2_ok = abs(closed_form_average_work("X", 2) - 0.625) < 1e-12 and abs(rows[0][1] - 0.625) < 1e-6
    detail = ", ".join(f"K={k}: sim {s:.6f} vs Gamma {g:.6f}" for k, s, g, _ in rows)
    report("C5 average work X vs Gamma closed form", ok, detail + " (|d| < 1e-6)")
    report("C5 average work Y, Z = 1", yz_ok, f"max |W_bar - 1| {max(abs(v - 1) for v in yz):.2e} (< 1e-6)")
    report("C5 average work K=2 equals 0.625", k2_ok, f"Gamma expression {closed_form_average_work('X', 2):.6f}, "
                                                     f"simulation {rows[0][1]:.6f}")
    info("exact average of 1 - cos^K 2t: " + ", ".join(f"K={k}: {law:.6f} (|d| {abs(s - law):.1e})"
                                                       for k, s, _, law in rows))
    assert ok and yz_ok and k2_ok


# 6 ---------------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _power(axis, n, k):
    return max_average_power(work_function(ModelSpec(n, LocalBattery(axis), RegularCharger(k))))[0]


def test_c06_power_scaling():
    ns = list(range(4, 13))
    results = {}
    for axis in "XYZ":
        beta = scaling_exponent(ns, [_power(axis, n, 2) for n in ns]).beta
        results[axis] = beta
        report(f"C6 N-fit beta, axis {axis}", abs(beta - 1) <= 0.01, f"beta {beta:.4f} over N=4..12 (1.00 +- 0.01)")
    beta_x5 = scaling_exponent(ns[1:], [_power("X", n, 2) for n in ns[1:]]).beta
    info(f"X over N=5..12 (K=2 below K_max): beta {beta_x5:.4f}")

    ks = list(range(8, 41, 2))
    sqrt_ok = True
    for axis in "XY":
        p = [closed_form_power_per_site(axis, k)[0] for k in ks]
        beta = scaling_exponent(ks, p).beta
        ok = abs(beta - 0.5) <= 0.03
        sqrt_ok &= ok
        report(f"C6 sqrt(K) fit, axis {axis}", ok, f"exponent {beta:.4f} over K=8..40 (0.5 +- 0.03)")
    pz = [closed_form_power_per_site("Z", k)[0] for k in ks]
    spread = max(pz) - min(pz)
    report("C6 Z power independent of K", spread < 1e-9, f"spread {spread:.2e} (< 1e-9)")
    assert all(abs(b - 1) <= 0.01 for b in results.values()) and sqrt_ok and spread < 1e-9


# 7 ---------------------------------------------------------------------------------

def test_c07_decorrelation():
    worst_overlap, worst_block = 0.0, 0.0
    for n in range(3, 13):
        up = QuantumState.axis_product(n, "Z", 1)
        psi0 = ground_state(LocalBattery("Z"), n)
        for k in even_ks(n):
            psi = evolve_stabilizer_product(stabilizer_generators(n, k), psi0, math.pi / 2)
            worst_overlap = max(worst_overlap, abs(abs(up.overlap(psi)) - 1))
            for m in range(1, n + 1):
                energy, erg = block_energy_and_ergotropy(psi, m, "Z")
                worst_block = max(worst_block, abs(erg - (energy + m)))
    ok = worst_overlap < 1e-10 and worst_block < 1e-9
    assert report("C7 decorrelation at t = pi/2", ok,
                  f"max ||<up|Psi>| - 1| {worst_overlap:.1e} (< 1e-10); max |E_m - W_m| {worst_block:.1e} (< 1e-9)")


# 8 ---------------------------------------------------------------------------------

def test_c08_fraction():
    ns = (6, 8, 10, 12)
    full = [fraction_extractable(n, 2, "Z", n) for n in ns]
    full_dev = max(abs(r - 1) for r in full)
    full_ok = full_dev < 1e-12
    ms = (1, 2, 3, 4)
    spread = 0.0
    for m in ms:
        vals = [fraction_extractable(n, 2, "Z", m) for n in ns]
        spread = max(spread, max(vals) - min(vals))
    rz, rx, ry = (fraction_extractable(8, 2, a, 4) for a in "ZXY")
    order_ok = rz > max(rx, ry)
    report("C8 R_N = 1", full_ok, f"max |R_N - 1| {full_dev:.1e} over N={ns} (floating-point exact, < 1e-12)")
    report("C8 R_m^Z independent of N", spread < 1e-3, f"max spread over N for m={ms}: {spread:.1e} (< 1e-3)")
    info(f"tight tolerance 1e-6: {'met' if spread < 1e-6 else 'not met'}")
    report("C8 Z above X, Y at m/N = 0.5", order_ok, f"N=8, m=4: Z {rz:.4f}, X {rx:.4f}, Y {ry:.4f}")
    assert full_ok and spread < 1e-3 and order_ok


# 9 ---------------------------------------------------------------------------------

ALPHAS = (0.0, 1.0, 2.0, 4.0, 6.0, 8.0)


@functools.lru_cache(maxsize=None)
def _collective_power(alpha, n):
    return max_average_power(work_function(ModelSpec(n, LocalBattery("X"), CollectiveCharger(alpha))))[0]


def _betas(ns):
    return {a: scaling_exponent(ns, [_collective_power(a, n) for n in ns]).beta for a in ALPHAS}


def test_c09_collective_charger():
    slack = 0.05
    betas = _betas((4, 6, 8, 10, 12))
    sub_ok = all(betas[a] < 1 + slack for a in (0.0, 1.0, 2.0))
    lin_ok = all(betas[a] >= 0.97 - slack for a in (6.0, 8.0))
    min_ok = betas[1.0] <= min(betas.values()) + slack
    shown = ", ".join(f"a={a:g}: {b:.3f}" for a, b in betas.items())
    report("C9 beta < 1 for alpha 0, 1, 2", sub_ok, f"N=4..12 even; {shown}")
    report("C9 beta >= 0.97 for alpha 6, 8", lin_ok, f"beta(6) {betas[6.0]:.3f}, beta(8) {betas[8.0]:.3f} (slack 0.05)")
    report("C9 beta(1) minimal", min_ok, f"beta(1) {betas[1.0]:.3f}, min {min(betas.values()):.3f} (slack 0.05)")
    alt = _betas((6, 8, 10, 12))
    info("N=6..12 even: " + ", ".join(f"a={a:g}: {b:.3f}" for a, b in alt.items()))
    assert sub_ok and lin_ok and min_ok


# 10 --------------------------------------------------------------------------------

def test_c10_period_anomaly():
    T = PERIOD["X"]

    def halving(n, k):
        w = work_function(ModelSpec(n, LocalBattery("X"), RegularCharger(k)))
        ts = np.linspace(0, T, 201)
        return float(np.abs(w(ts + T / 2) - w(ts)).max() / n)

    d6, d8 = halving(6, 4), halving(8, 6)
    ok_period = d6 * 6 < 1e-9 and d8 > 0.1
    report("C10 period halves at N=6, K=4 only", ok_period,
           f"N=6: max |W(t+T/2) - W(t)| {d6 * 6:.1e} (< 1e-9); N=8, K=6 per-site {d8:.3f} (> 0.1)")
    ts = np.linspace(0, math.pi, 201)
    y3 = work_function(ModelSpec(3, LocalBattery("Y"), RegularCharger(2)))(ts)
    err = float(np.abs(y3 - special_case_work("Y_N3_K2", ts)).max())
    report("C10 W^Y_(3,2) = 6 sin^2 3t", err < 1e-9, f"max err {err:.1e} (< 1e-9)")
    table = run_checks(groups=["special_X_N4_K2"])
    status = table.column("status")[0]
    report("C10 printed W^X_(4,2) flagged as expected discrepancy", status == "expected-discrepancy",
           f"verify status {status!r}, measured {table.column('measured')[0]:.3f}")
    assert ok_period and err < 1e-9 and status == "expected-discrepancy"


# 11 --------------------------------------------------------------------------------

def test_c11_cross_engine():
    rng = np.random.default_rng(2024)
    worst, samples = 0.0, 0
    for n in range(3, 11):
        for k in even_ks(n):
            gens = stabilizer_generators(n, k)
            H = to_dense(PauliSum.from_strings(gens))
            for _ in range(50):
                psi = QuantumState.product([rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(n)])
                t = float(rng.uniform(0, 2 * math.pi))
                a = evolve_stabilizer_product(gens, psi, t).data
                b = evolve_spectral(H, psi, [t])[0].data
                worst = max(worst, float(np.abs(a - b).max()))
                samples += 1
    erg_worst = 0.0
    for n in range(3, 9):
        for axis in "XYZ":
            H_B = local_battery(n, axis)
            dense = to_dense(H_B)
            psi0 = ground_state(LocalBattery(axis), n)
            for k in even_ks(n, 2):
                for t in rng.uniform(0, math.pi, 5):
                    psi = evolve_stabilizer_product(stabilizer_generators(n, k), psi0, t)
                    erg_worst = max(erg_worst, abs(ergotropy(psi, dense) - stored_work(H_B, psi0, psi)))
    ok = worst < 1e-10 and erg_worst < 1e-9
    assert report("C11 cross-engine equivalence", ok,
                  f"{samples} samples, max state diff {worst:.1e} (< 1e-10); "
                  f"max |ergotropy - work| {erg_worst:.1e} (< 1e-9)")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    print(f"\n{sum(RESULTS.values())}/{len(RESULTS)} acceptance lines pass")
