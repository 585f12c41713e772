"""Work, ergotropy, average work/power, subsystem fractions and scaling fits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import minimize_scalar

from .engine import (
    HermitianOperator,
    QuantumState,
    SpectralPropagator,
    block_spectrum,
    evolve_stabilizer_product,
    expectation,
    to_dense,
)
from .errors import NumericalError, ValidationError
from .models import (
    LocalBattery,
    ModelSpec,
    RegularBattery,
    RegularCharger,
    ground_state,
    stabilizer_generators,
    stabilizer_spectrum,
    validate_nk,
)
from .pauli import PauliString, PauliSum

ERGOTROPY_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class TimeSeries:
    ts: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        ts = np.array(self.ts, dtype=float)
        vals = np.array(self.values, dtype=float)
        if ts.shape != vals.shape or ts.ndim != 1:
            raise ValidationError("ts and values must be 1-d arrays of equal length")
        if ts.size > 1 and np.any(np.diff(ts) <= 0):
            raise ValidationError("ts must be strictly increasing")
        ts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.ts.size

    def scaled(self, factor: float, label: str | None = None) -> "TimeSeries":
        return TimeSeries(self.ts, self.values * factor, self.label if label is None else label)

    def max_abs_diff(self, other: Union["TimeSeries", np.ndarray]) -> float:
        other_vals = other.values if isinstance(other, TimeSeries) else np.asarray(other)
        return float(np.max(np.abs(self.values - other_vals)))


@dataclass(frozen=True)
class FitResult:
    beta: float
    prefactor: float
    residual: float


# --- work ---------------------------------------------------------------------

def stored_work(H_B: Union[PauliSum, HermitianOperator], state0: QuantumState,
                statet: QuantumState) -> float:
    return expectation(H_B, statet) - expectation(H_B, state0)


def _propagator(n, battery, charger) -> SpectralPropagator:
    psi0 = ground_state(battery, n)
    if isinstance(charger, RegularCharger):
        return SpectralPropagator.from_stabilizer_product(stabilizer_generators(n, charger.k), psi0)
    H = to_dense(ModelSpec(n, battery, charger).charger_hamiltonian())
    return SpectralPropagator(H, psi0)


def work_function(spec: ModelSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised ``t -> W(t)`` for the model's battery/charger pair.

    Regular chargers use the product-formula level decomposition; collective
    chargers need a dense eigendecomposition (capped at ``DENSE_CAP`` sites).
    """
    n = spec.n_sites
    H_B = spec.battery_hamiltonian()
    prop = _propagator(n, spec.battery, spec.charger)
    e0 = -float(n)

    def work(ts):
        return prop.expectation_series(H_B, ts) - e0

    return work


def work_series(spec: ModelSpec, engine: str = "auto") -> TimeSeries:
    """Stored work on the model's time grid.

    ``engine='auto'`` uses the product formula for regular chargers and the
    spectral path for collective ones; ``'spectral'`` forces diagonalisation.
    """
    ts = spec.ts
    n = spec.n_sites
    psi0 = ground_state(spec.battery, n)
    H_B = spec.battery_hamiltonian()
    e0 = expectation(H_B, psi0)
    if engine == "auto":
        engine = "product" if isinstance(spec.charger, RegularCharger) else "spectral"
    if engine == "product":
        if not isinstance(spec.charger, RegularCharger):
            raise ValidationError("product formula needs a commuting (regular) charger")
        gens = stabilizer_generators(n, spec.charger.k)
        vals = [expectation(H_B, evolve_stabilizer_product(gens, psi0, t, check=(i == 0))) - e0
                for i, t in enumerate(ts)]
    elif engine == "spectral":
        prop = SpectralPropagator(to_dense(spec.charger_hamiltonian()), psi0)
        vals = prop.expectation_series(H_B, ts) - e0
    else:
        raise ValidationError(f"unknown engine {engine!r}")
    label = f"W[N={n},{spec.battery.describe()},{spec.charger.describe()}]"
    return TimeSeries(ts, np.asarray(vals), label)


def general_work(n: int, k_batt: int, k_chg: int, ts: Sequence[float], engine: str = "auto") -> TimeSeries:
    """Work stored in an ``H_(N,k_batt)`` battery charged by ``H_(N,k_chg)``."""
    validate_nk(n, k_batt)
    validate_nk(n, k_chg)
    if k_batt == k_chg:
        raise ValidationError("battery and charger regularities must differ")
    ts = np.asarray(ts, dtype=float)
    spec = ModelSpec(n, RegularBattery(k_batt), RegularCharger(k_chg),
                     float(ts[0]), float(ts[-1]), len(ts))
    series = work_series(spec, engine)
    return TimeSeries(ts, series.values, series.label)


# --- ergotropy -----------------------------------------------------------------

def passive_energy(populations: np.ndarray, levels: np.ndarray) -> float:
    """Energy of the passive state: largest population on the lowest level."""
    r = np.sort(np.asarray(populations, dtype=float))[::-1]
    eps = np.sort(np.asarray(levels, dtype=float))
    if r.size > eps.size:
        raise ValidationError("more populations than energy levels")
    return float(np.dot(r, eps[: r.size]))


def _clamp(erg: float) -> float:
    if erg < -ERGOTROPY_CLAMP:
        raise NumericalError(f"negative ergotropy {erg:.3e}")
    return max(erg, 0.0)


def ergotropy(rho: QuantumState, H: Union[HermitianOperator, PauliSum]) -> float:
    """``Tr[rho H]`` minus the passive-state energy."""
    if isinstance(H, PauliSum):
        H = to_dense(H)
    dm = rho.to_density()
    pops = np.linalg.eigvalsh(dm.data)
    if pops.min() < -1e-10:
        raise ValidationError(f"density matrix has eigenvalue {pops.min():.3e}")
    return _clamp(expectation(H, dm) - passive_energy(pops, H.eigenvalues()))


def block_battery(n: int, axis: str, m: int) -> PauliSum:
    """Local battery restricted to sites ``0 .. m-1``, embedded in ``n`` sites."""
    return PauliSum.from_strings([PauliString.single(n, i, axis) for i in range(m)])


def block_energy_and_ergotropy(state: QuantumState, m: int, axis: str) -> tuple[float, float]:
    """Energy of the first ``m`` sites under the local battery, and their ergotropy.

    Uses the block's Schmidt spectrum and the known local-battery spectrum,
    so no ``2**m``-sized matrix is diagonalised.
    """
    energy = expectation(block_battery(state.n_sites, axis, m), state)
    pops = block_spectrum(state, m)
    return energy, _clamp(energy - passive_energy(pops, stabilizer_spectrum(m)))


# --- averages -------------------------------------------------------------------

def integrate(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, n_points: int = 201,
              rtol: float = 1e-8, max_points: int = 2 ** 20 + 1) -> float:
    """Composite Simpson on a uniform grid, doubling until successive estimates agree."""
    if n_points % 2 == 0:
        n_points += 1
    ts = np.linspace(a, b, n_points)
    prev = simpson(np.asarray(fn(ts), dtype=float), x=ts)
    while n_points < max_points:
        n_points = 2 * n_points - 1
        ts = np.linspace(a, b, n_points)
        cur = simpson(np.asarray(fn(ts), dtype=float), x=ts)
        if abs(cur - prev) < rtol:
            return float(cur)
        prev = cur
    raise NumericalError(f"Simpson refinement did not converge within {max_points} points")


def average_work(series: TimeSeries, period: float, n_sites: int = 1) -> float:
    """Per-site time average of a work series over one period.

    The series must sample ``[0, period]`` on a uniform grid with an odd
    number (>= 201) of points; later samples are ignored.
    """
    ts, vals = series.ts, series.values
    tol = 1e-9 * max(1.0, period)
    if period <= 0 or ts.size == 0 or abs(ts[0]) > tol or ts[-1] < period - tol:
        raise ValidationError(f"series does not cover [0, {period}]")
    sel = ts <= period + tol
    ts, vals = ts[sel], vals[sel]
    if abs(ts[-1] - period) > tol:
        raise ValidationError("no sample at t = period")
    if ts.size < 201 or ts.size % 2 == 0:
        raise ValidationError(f"need an odd number (>= 201) of samples in [0, period], got {ts.size}")
    steps = np.diff(ts)
    if np.ptp(steps) > 1e-9 * steps.mean():
        raise ValidationError("samples are not uniformly spaced")
    return float(simpson(vals, x=ts) / (n_sites * period))


# --- power ----------------------------------------------------------------------

def _evaluate(fn, ts: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(fn(ts), dtype=float)
        if out.shape == ts.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(t)) for t in ts])


def max_average_power(work_fn: Callable, t_max: float = math.pi, n_grid: int = 10001,
                      tol: float = 1e-10) -> tuple[float, float]:
    """Maximise ``W(t)/t`` over ``(0, t_max]``: dense grid, then golden-section refinement."""
    if n_grid < 10000:
        raise ValidationError("power search needs at least 1e4 grid points")
    ts = np.linspace(t_max / n_grid, t_max, n_grid)
    power = _evaluate(work_fn, ts) / ts
    i = int(np.argmax(power))
    best_t, best_p = float(ts[i]), float(power[i])
    if 0 < i < n_grid - 1:
        res = minimize_scalar(lambda t: -float(_evaluate(work_fn, np.array([t]))[0]) / t,
                              bracket=(ts[i - 1], ts[i], ts[i + 1]), method="golden",
                              tol=tol / max(best_t, 1e-300))
        if -res.fun >= best_p and ts[i - 1] <= res.x <= ts[i + 1]:
            best_t, best_p = float(res.x), float(-res.fun)
    return best_p, best_t


# --- subsystem fraction ---------------------------------------------------------

def fraction_extractable(n: int, k: int, axis: str, m: int, period: float = math.pi,
                         n_grid: int = 201) -> float:
    """Time-integrated block ergotropy over time-integrated block energy gain.

    The accessible block is sites ``0 .. m-1``; both integrals use Simpson's
    rule on a shared uniform grid.  Returns ``nan`` when the denominator
    vanishes.
    """
    validate_nk(n, k)
    if not 1 <= m <= n:
        raise ValidationError(f"block size m={m} outside [1, {n}]")
    if n_grid % 2 == 0:
        n_grid += 1
    ts = np.linspace(0.0, period, n_grid)
    psi0 = ground_state(LocalBattery(axis), n)
    gens = stabilizer_generators(n, k)
    work = np.empty(n_grid)
    erg = np.empty(n_grid)
    e0 = -float(m)
    for j, t in enumerate(ts):
        psi = evolve_stabilizer_product(gens, psi0, t, check=(j == 0))
        energy, erg[j] = block_energy_and_ergotropy(psi, m, axis)
        work[j] = energy - e0
    den = simpson(work, x=ts)
    if abs(den) < 1e-12:
        return math.nan
    return float(simpson(erg, x=ts) / den)


def block_series(n: int, k: int, axis: str, m: int, ts: Sequence[float]) -> tuple[TimeSeries, TimeSeries]:
    """Block work and block ergotropy time series (for plots and pointwise checks)."""
    validate_nk(n, k)
    ts = np.asarray(ts, dtype=float)
    psi0 = ground_state(LocalBattery(axis), n)
    gens = stabilizer_generators(n, k)
    work, erg = [], []
    for j, t in enumerate(ts):
        energy, e = block_energy_and_ergotropy(evolve_stabilizer_product(gens, psi0, t, check=(j == 0)), m, axis)
        work.append(energy + m)
        erg.append(e)
    return TimeSeries(ts, work, f"W_m[m={m}]"), TimeSeries(ts, erg, f"E_m[m={m}]")


# --- scaling ----------------------------------------------------------------------

def scaling_exponent(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    """Least-squares line through ``(ln x, ln y)``; ``beta`` is the slope."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 3:
        raise ValidationError("need at least three (x, y) pairs")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValidationError("scaling fit needs positive data")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return FitResult(float(slope), float(np.exp(intercept)), float(np.sqrt(np.mean(resid ** 2))))

