import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kregbattery.errors import PreconditionError, ValidationError
from kregbattery.models import cz_equivalence_circuit, stabilizer_generators, stabilizer_hamiltonian
from kregbattery.pauli import (
    CliffordCircuit,
    Gate,
    PauliString,
    PauliSum,
    commutes,
    conjugate_by_clifford,
    heisenberg_evolve_commuting,
    heisenberg_rotate,
    pauli_mul,
    pauli_sum_commutator,
)


@st.composite
def pauli_strings(draw, n=None):
    n = draw(st.integers(1, 4)) if n is None else n
    return PauliString(n, draw(st.integers(0, 2 ** n - 1)), draw(st.integers(0, 2 ** n - 1)),
                       draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 4))
    return draw(pauli_strings(n)), draw(pauli_strings(n))


def test_single_site_products():
    x, z = PauliString.from_label("X"), PauliString.from_label("Z")
    assert pauli_mul(x, z) == PauliString.from_label("-i*Y")
    assert pauli_mul(z, x) == PauliString.from_label("i*Y")


def test_identity_and_generator_square():
    g = PauliString.from_label("Z0 X1 Z2", 3)
    assert pauli_mul(g, g) == PauliString.identity(3)
    assert pauli_mul(PauliString.identity(3), g) == g


@given(pauli_pairs())
def test_product_matches_matrices(pair):
    a, b = pair
    np.testing.assert_allclose(pauli_mul(a, b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-14)


@given(pauli_pairs())
def test_commutes_matches_matrices(pair):
    a, b = pair
    ma, mb = a.to_matrix(), b.to_matrix()
    assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)


@given(pauli_strings(), st.integers(0, 3))
def test_label_roundtrip(p, _):
    assert PauliString.from_label(p.label(with_phase=True), p.n_sites) == p


def test_commutation_within_one_k():
    gens = stabilizer_generators(6, 2)
    assert commutes(gens[1], gens[2])
    assert len(pauli_sum_commutator(stabilizer_hamiltonian(6, 2), stabilizer_hamiltonian(6, 2))) == 0


def test_commutator_across_k_nonempty():
    comm = pauli_sum_commutator(stabilizer_hamiltonian(8, 2), stabilizer_hamiltonian(8, 4))
    assert len(comm) > 0
    a, b = stabilizer_hamiltonian(8, 2).to_matrix(), stabilizer_hamiltonian(8, 4).to_matrix()
    np.testing.assert_allclose(comm.to_matrix(), a @ b - b @ a, atol=1e-12)


def test_commutator_two_site_oracle():
    sx = PauliSum.from_strings([PauliString.single(2, i, "X") for i in range(2)])
    sz = PauliSum.from_strings([PauliString.single(2, i, "Z") for i in range(2)])
    expected = PauliSum.from_strings([PauliString.single(2, i, "Y") for i in range(2)], [-2j, -2j])
    assert pauli_sum_commutator(sx, sz) == expected


def test_clifford_rules():
    cz = CliffordCircuit.from_gates([("CZ", 0, 1)])
    assert conjugate_by_clifford(PauliString.from_label("X0", 2), cz) == PauliString.from_label("X0 Z1", 2)
    h = CliffordCircuit.from_gates([("H", 0)])
    assert conjugate_by_clifford(PauliString.from_label("Z"), h) == PauliString.from_label("X")


@pytest.mark.parametrize("name,sites", [("CZ", (0, 1)), ("H", (1,)), ("S", (0,))])
@given(p=pauli_strings(2))
def test_clifford_vs_dense(name, sites, p):
    mats = {"H": np.array([[1, 1], [1, -1]]) / math.sqrt(2), "S": np.diag([1, 1j])}
    if name == "CZ":
        U = np.diag([1, 1, 1, -1]).astype(complex)
    else:
        eye = np.eye(2)
        U = np.kron(mats[name], eye) if sites[0] == 1 else np.kron(eye, mats[name])
    image = conjugate_by_clifford(p, CliffordCircuit([Gate(name, sites)]))
    np.testing.assert_allclose(image.to_matrix(), U @ p.to_matrix() @ U.conj().T, atol=1e-12)


def test_cz_circuit_maps_x_to_generator():
    img = conjugate_by_clifford(PauliString.single(6, 3, "X"), cz_equivalence_circuit(6, 0, 2))
    assert img == PauliString.from_label("Z2 X3 Z4", 6)


def test_out_of_range_gate():
    with pytest.raises(ValidationError):
        conjugate_by_clifford(PauliString.single(2, 0, "X"), CliffordCircuit.from_gates([("CZ", 0, 5)]))


def test_heisenberg_rotate_coefficients():
    g = PauliString.from_label("Z0 X1 Z2", 3)
    p = PauliString.single(3, 1, "Z")
    t = 0.41
    out = heisenberg_rotate(p, g, t)
    assert out.coefficient(p) == pytest.approx(math.cos(2 * t))
    assert out.coefficient(PauliString.from_label("Z0 Y1 Z2", 3)) == pytest.approx(math.sin(2 * t))
    U = _expm(g.to_matrix(), t)
    np.testing.assert_allclose(out.to_matrix(), U @ p.to_matrix() @ U.conj().T, atol=1e-13)


def _expm(g, theta):
    return math.cos(theta) * np.eye(len(g)) + 1j * math.sin(theta) * g


def test_heisenberg_trivial_cases():
    g = PauliString.from_label("Z0 X1 Z2", 3)
    p = PauliString.single(3, 0, "Z")
    assert heisenberg_rotate(p, g, 0.7) == PauliSum.from_strings([p])
    q = PauliString.single(3, 1, "Y")
    assert heisenberg_rotate(q, g, 0.0) == PauliSum.from_strings([q])


@pytest.mark.parametrize("axis", "XYZ")
def test_heisenberg_evolve_vs_dense(axis):
    n, t = 5, 0.63
    gens = stabilizer_generators(n, 2)
    H = stabilizer_hamiltonian(n, 2).to_matrix()
    w, v = np.linalg.eigh(H)
    U = (v * np.exp(-1j * w * t)) @ v.conj().T
    p = PauliString.single(n, 2, axis)
    out = heisenberg_evolve_commuting(p, gens, t)
    np.testing.assert_allclose(out.to_matrix(), U.conj().T @ p.to_matrix() @ U, atol=1e-12)
    if axis == "X":
        assert out.coefficient(p) == pytest.approx(math.cos(2 * t) ** 2)
        # cos^2(2t) X_k plus three cross terms (dense oracle)
        assert len(out) == 4


def test_heisenberg_needs_commuting_generators():
    gens = [PauliString.single(2, 0, "X"), PauliString.single(2, 0, "Z")]
    with pytest.raises(PreconditionError):
        heisenberg_evolve_commuting(PauliString.single(2, 1, "Z"), gens, 0.3)


def test_pauli_sum_text_roundtrip():
    op = PauliSum.from_strings([PauliString.from_label("Z0 X1", 3), PauliString.from_label("Y2", 3)],
                               [0.5, -1.25 + 0.1j])
    assert PauliSum.from_text(op.to_text()) == op


def test_pauli_sum_hermiticity():
    assert stabilizer_hamiltonian(5, 2).is_hermitian()
    assert not PauliSum.from_strings([PauliString.single(1, 0, "X")], [1j]).is_hermitian()
