"""Density-matrix core: eigenvalues, validation, partial trace, distance, entropy."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmemory import (
    XState,
    embed_xstate,
    extract_xstate,
    hermitian_eigenvalues,
    hermiticity_defect,
    partial_trace_qubit2,
    trace_distance,
    validate_density_matrix,
    von_neumann_entropy,
)
from qmemory.errors import (
    DimensionMismatchError,
    InvariantViolation,
    NegativeEigenvalueError,
    NonHermitianError,
    NotXFormError,
)

from helpers import (
    random_density,
    random_hermitian,
    random_qubit_density,
    random_valid_xstate,
)


# --- independent eigenvalue oracle: characteristic polynomial + bisection ----

def _charpoly_coefficients(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(xI - A) by the Faddeev-LeVerrier recurrence."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    aux = np.zeros_like(a)
    c = 1.0
    for k in range(1, n + 1):
        aux = a @ aux + c * np.eye(n)
        c = -np.trace(a @ aux).real / k
        coeffs[k] = c
    return coeffs


def _poly(coeffs: np.ndarray, x: float) -> float:
    value = 0.0
    for c in coeffs:
        value = value * x + c
    return value


def charpoly_eigenvalue_oracle(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix with distinct spectrum, descending.

    Finds sign changes of the characteristic polynomial on a fine grid over
    the Gershgorin interval and bisects each to ~1e-12.  Raises if it cannot
    isolate a full set of simple roots (the caller must use matrices with
    distinct eigenvalues).
    """
    n = a.shape[0]
    coeffs = _charpoly_coefficients(a)
    radius = float(np.max(np.sum(np.abs(a), axis=1)))
    xs = np.linspace(-radius - 1.0, radius + 1.0, 40001)
    ys = np.array([_poly(coeffs, x) for x in xs])
    roots = []
    for i in range(xs.size - 1):
        if ys[i] == 0.0:
            roots.append(float(xs[i]))
            continue
        if np.sign(ys[i]) * np.sign(ys[i + 1]) < 0:
            lo, hi = float(xs[i]), float(xs[i + 1])
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if _poly(coeffs, lo) * _poly(coeffs, mid) <= 0:
                    hi = mid
                else:
                    lo = mid
            roots.append(0.5 * (lo + hi))
    if len(roots) != n:
        raise AssertionError(f"oracle isolated {len(roots)} of {n} roots")
    return np.sort(np.array(roots))[::-1]


class TestHermitianEigenvalues:
    def test_matches_charpoly_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            h = random_hermitian(rng, 4)
            got = hermitian_eigenvalues(h)
            expected = charpoly_eigenvalue_oracle(h)
            assert np.max(np.abs(got - expected)) < 1e-9

    def test_matches_lapack(self):
        rng = np.random.default_rng(12)
        for dim in (2, 4):
            for _ in range(100):
                h = random_hermitian(rng, dim)
                got = hermitian_eigenvalues(h)
                expected = np.sort(np.linalg.eigvalsh(h))[::-1]
                assert np.max(np.abs(got - expected)) < 1e-11

    def test_known_spectra(self):
        diag = np.diag([4.0, 1.0, 3.0, 2.0]).astype(complex)
        assert np.allclose(hermitian_eigenvalues(diag), [4, 3, 2, 1], atol=1e-14)

        mixed = np.eye(4, dtype=complex) / 4.0
        assert np.allclose(hermitian_eigenvalues(mixed), 0.25, atol=1e-14)

        pauli_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        assert np.allclose(hermitian_eigenvalues(pauli_x), [1.0, -1.0], atol=1e-14)

        # rank-1 projector with degenerate kernel
        bell = XState(a=0.5, b=0.0, c=0.0, d=0.5, w=0.5 + 0.0j)
        vals = hermitian_eigenvalues(embed_xstate(bell))
        assert np.allclose(vals, [1.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_descending_order_and_trace(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            h = random_hermitian(rng, 4)
            vals = hermitian_eigenvalues(h)
            assert np.all(np.diff(vals) <= 1e-13)
            assert abs(np.sum(vals) - np.trace(h).real) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            hermitian_eigenvalues(np.zeros((2, 3)))


class TestXState:
    def test_embed_extract_roundtrip(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            x = random_valid_xstate(rng)
            back = extract_xstate(embed_xstate(x))
            assert abs(back.a - x.a) < 1e-15
            assert abs(back.b - x.b) < 1e-15
            assert abs(back.c - x.c) < 1e-15
            assert abs(back.d - x.d) < 1e-15
            assert abs(back.z - x.z) < 1e-15
            assert abs(back.w - x.w) < 1e-15

    def test_embedded_state_is_valid_density_matrix(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            rho = embed_xstate(random_valid_xstate(rng))
            validate_density_matrix(rho, dim=4)

    def test_extract_rejects_off_pattern_entries(self):
        rho = embed_xstate(XState(0.25, 0.25, 0.25, 0.25))
        rho[0, 1] = 0.1
        rho[1, 0] = 0.1
        with pytest.raises(NotXFormError):
            extract_xstate(rho)

    def test_extract_wrong_shape(self):
        with pytest.raises(DimensionMismatchError):
            extract_xstate(np.eye(3) / 3.0)

    def test_validate_trace(self):
        with pytest.raises(InvariantViolation, match="sum"):
            XState(0.5, 0.5, 0.5, 0.5).validate()

    def test_validate_negative_population(self):
        with pytest.raises(InvariantViolation, match="population"):
            XState(-0.2, 0.5, 0.5, 0.2).validate()

    def test_validate_coherence_bounds(self):
        with pytest.raises(InvariantViolation, match="z"):
            XState(0.25, 0.25, 0.25, 0.25, z=0.3 + 0.0j).validate()
        with pytest.raises(InvariantViolation, match="w"):
            XState(0.25, 0.25, 0.25, 0.25, w=0.3j).validate()

    def test_validate_non_finite(self):
        with pytest.raises(InvariantViolation):
            XState(math.nan, 0.5, 0.25, 0.25).validate()

    def test_validate_returns_self(self):
        x = XState(0.25, 0.25, 0.25, 0.25)
        assert x.validate() is x


class TestValidateDensityMatrix:
    def test_accepts_random_states(self):
        rng = np.random.default_rng(31)
        for dim in (2, 4):
            for _ in range(20):
                rho = random_density(rng, dim)
                assert validate_density_matrix(rho, dim=dim) is not None

    def test_rejects_bad_trace(self):
        with pytest.raises(InvariantViolation, match="trace"):
            validate_density_matrix(np.eye(4, dtype=complex))

    def test_rejects_non_hermitian(self):
        rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
        rho[0, 1] = 0.1j
        with pytest.raises(InvariantViolation, match="Hermitian"):
            validate_density_matrix(rho)

    def test_rejects_negative_eigenvalue(self):
        rho = np.diag([1.2, -0.2]).astype(complex)
        with pytest.raises(InvariantViolation, match="eigenvalue"):
            validate_density_matrix(rho)

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            validate_density_matrix(np.eye(2, dtype=complex) / 2.0, dim=4)
        with pytest.raises(DimensionMismatchError):
            validate_density_matrix(np.zeros((4, 3)))

    def test_positivity_slack_is_configurable(self):
        rho = np.diag([1.0 + 5e-10, -5e-10, 0.0, 0.0]).astype(complex)
        with pytest.raises(InvariantViolation):
            validate_density_matrix(rho)  # default slack 1e-10
        validate_density_matrix(rho, positivity_tol=1e-9)


class TestPartialTrace:
    def test_product_state_recovers_first_factor(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            rho1 = random_qubit_density(rng)
            rho2 = random_qubit_density(rng)
            reduced = partial_trace_qubit2(np.kron(rho1, rho2))
            assert np.max(np.abs(reduced - rho1)) < 1e-14

    def test_xstate_reduces_to_diagonal(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            x = random_valid_xstate(rng)
            reduced = partial_trace_qubit2(embed_xstate(x))
            assert abs(reduced[0, 0].real - (x.a + x.b)) < 1e-14
            assert abs(reduced[1, 1].real - (x.c + x.d)) < 1e-14
            assert abs(reduced[0, 1]) < 1e-14

    def test_preserves_trace_and_hermiticity(self):
        rng = np.random.default_rng(43)
        for _ in range(50):
            rho = random_density(rng, 4)
            reduced = partial_trace_qubit2(rho)
            assert abs(np.trace(reduced).real - 1.0) < 1e-13
            assert hermiticity_defect(reduced) < 1e-14

    def test_wrong_shape(self):
        with pytest.raises(DimensionMismatchError):
            partial_trace_qubit2(np.eye(2, dtype=complex) / 2.0)


class TestTraceDistance:
    def test_frozen_diagonal_case(self):
        rho = np.diag([0.6, 0.4]).astype(complex)
        tau = np.diag([0.25, 0.75]).astype(complex)
        assert abs(trace_distance(rho, tau) - 0.35) < 1e-14

    def test_orthogonal_pure_states_have_distance_one(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        tau = np.diag([0.0, 1.0]).astype(complex)
        assert abs(trace_distance(rho, tau) - 1.0) < 1e-14

    @given(st.integers(0, 10**6))
    def test_metric_properties(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(rng, 2)
        tau = random_density(rng, 2)
        chi = random_density(rng, 2)
        d_rt = trace_distance(rho, tau)
        assert 0.0 <= d_rt <= 1.0 + 1e-12
        assert abs(d_rt - trace_distance(tau, rho)) < 1e-12
        assert abs(trace_distance(rho, rho)) < 1e-12
        assert d_rt <= trace_distance(rho, chi) + trace_distance(chi, tau) + 1e-12

    def test_validates_inputs(self):
        good = np.diag([0.5, 0.5]).astype(complex)
        with pytest.raises(InvariantViolation):
            trace_distance(good, np.diag([0.9, 0.9]).astype(complex))
        with pytest.raises(DimensionMismatchError):
            trace_distance(good, np.eye(4, dtype=complex) / 4.0)


class TestVonNeumannEntropy:
    def test_pure_state_zero(self):
        assert von_neumann_entropy(np.diag([1.0, 0.0]).astype(complex)) == 0.0

    def test_maximally_mixed(self):
        assert abs(von_neumann_entropy(np.eye(2, dtype=complex) / 2.0) - 1.0) < 1e-14
        assert abs(von_neumann_entropy(np.eye(4, dtype=complex) / 4.0) - 2.0) < 1e-13

    def test_frozen_binary_case(self):
        rho = np.diag([0.25, 0.75]).astype(complex)
        assert abs(von_neumann_entropy(rho) - 0.8112781244591328) < 1e-14

    def test_basis_independence(self):
        rng = np.random.default_rng(51)
        for _ in range(20):
            rho = random_density(rng, 2)
            mat = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            unitary, _ = np.linalg.qr(mat)
            rotated = unitary @ rho @ unitary.conj().T
            assert abs(von_neumann_entropy(rotated) - von_neumann_entropy(rho)) < 1e-10

    def test_clamps_round_off_negatives(self):
        rho = np.diag([1.0 + 5e-11, -5e-11]).astype(complex)
        assert abs(von_neumann_entropy(rho)) < 1e-9

    def test_rejects_genuinely_negative(self):
        with pytest.raises(NegativeEigenvalueError):
            von_neumann_entropy(np.diag([1.2, -0.2]).astype(complex))

    @given(st.integers(0, 10**6))
    def test_nonnegative_and_bounded(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.choice([2, 4]))
        rho = random_density(rng, dim)
        s = von_neumann_entropy(rho)
        assert -1e-12 <= s <= math.log2(dim) + 1e-12


class TestHermiticityDefect:
    def test_exact_values(self):
        assert hermiticity_defect(np.eye(3)) == 0.0
        mat = np.zeros((2, 2), dtype=complex)
        mat[0, 1] = 0.25
        assert abs(hermiticity_defect(mat) - 0.25) < 1e-15
