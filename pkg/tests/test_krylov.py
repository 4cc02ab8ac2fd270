import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qre.circuit import GateCount
from qre.hamlib import dense_eigh, hubbard
from qre.krylov import (
    Exact,
    KrylovMatrices,
    Threshold,
    Trotter,
    assemble_matrices,
    build_subspace,
    convergence_scan,
    default_time,
    epperly_bound,
    epperly_dimension,
    format_matrices,
    krylov_resources,
    linear_extrapolate,
    parse_matrices,
    read_scan_csv,
    solve_gevp,
)
from qre.pauli import PauliSum
from qre.sim import StateVector, expectation, prepare_overlap_state

from conftest import CORPUS

SMALL = [c for c in CORPUS if c[1].n <= 5]


def matrices(h, d, q=0.85, seed=3, evolution=Exact(), t=None):
    b = prepare_overlap_state(h, q, seed)
    return assemble_matrices(h, build_subspace(h, b, d, evolution, t))


class TestSubspace:
    def test_d1_is_rayleigh_quotient(self):
        h = hubbard(2, 2)
        b = prepare_overlap_state(h, 0.7, 1)
        res = solve_gevp(assemble_matrices(h, [b]))
        assert res.energy == pytest.approx(expectation(b, h), abs=1e-12)

    def test_eigenstate_reference(self):
        h = hubbard(1, 3)
        vals, vecs = dense_eigh(h)
        m = assemble_matrices(h, build_subspace(h, StateVector(3, vecs[:, 2]), 1))
        assert solve_gevp(m).energy == pytest.approx(vals[2], abs=1e-12)

    def test_first_vector_is_reference(self):
        h = hubbard(1, 2)
        b = prepare_overlap_state(h, 0.5, 0)
        basis = build_subspace(h, b, 3)
        np.testing.assert_array_equal(basis[0].amplitudes, b.amplitudes)

    def test_vectors_are_powers_of_propagator(self):
        h = hubbard(1, 3)
        vals, vecs = dense_eigh(h)
        b = prepare_overlap_state(h, 0.5, 0)
        t = 0.3
        basis = build_subspace(h, b, 4, Exact(), t)
        for j, v in enumerate(basis):
            u = (vecs * np.exp(-1j * vals * t * j)) @ vecs.conj().T
            np.testing.assert_allclose(v.amplitudes, u @ b.amplitudes, atol=1e-12)

    def test_trotter_close_to_exact(self):
        h = hubbard(1, 3)
        b = prepare_overlap_state(h, 0.5, 0)
        a = build_subspace(h, b, 3, Exact(), 0.2)
        c = build_subspace(h, b, 3, Trotter(200), 0.2)
        for x, y in zip(a, c):
            assert x.fidelity(y) > 1 - 1e-5

    def test_bad_d(self):
        with pytest.raises(ValueError):
            build_subspace(hubbard(1, 2), StateVector.zero(2), 0)

    def test_default_time(self):
        assert default_time(hubbard(1, 2)) == pytest.approx(math.pi / 16)


class TestMatrices:
    @pytest.mark.parametrize("name,h", SMALL, ids=[c[0] for c in SMALL])
    def test_hermitian_and_gram_psd(self, name, h):
        d = 5
        m = matrices(h, d)
        np.testing.assert_array_equal(m.H, m.H.conj().T)
        np.testing.assert_array_equal(m.S, m.S.conj().T)
        ev = np.linalg.eigvalsh(m.S)
        assert ev.min() >= -1e-10 and ev.max() <= d + 1e-10
        np.testing.assert_allclose(np.diag(m.S), 1.0, atol=1e-12)

    def test_eigenbasis_slice_is_diagonal(self):
        h = hubbard(2, 2)
        vals, vecs = dense_eigh(h)
        basis = [StateVector(4, vecs[:, k]) for k in range(4)]
        m = assemble_matrices(h, basis)
        np.testing.assert_allclose(m.H, np.diag(vals[:4]), atol=1e-12)
        np.testing.assert_allclose(m.S, np.eye(4), atol=1e-12)

    def test_toeplitz_under_exact_evolution(self):
        m = matrices(hubbard(1, 3), 4)
        # S_ij depends only on j - i
        for k in range(1, 4):
            diag = np.diagonal(m.S, k)
            np.testing.assert_allclose(diag, diag[0], atol=1e-12)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            assemble_matrices(hubbard(1, 2), [StateVector.zero(3)])
        with pytest.raises(ValueError):
            assemble_matrices(hubbard(1, 2), [])

    def test_round_trip(self, tmp_path):
        m = matrices(hubbard(1, 3), 4)
        back = parse_matrices(format_matrices(m))
        assert back.d == 4
        np.testing.assert_array_equal(back.H, m.H)
        np.testing.assert_array_equal(back.S, m.S)

    def test_bad_dump(self):
        with pytest.raises(ValueError):
            parse_matrices("XX 2\n")


class TestGevp:
    @pytest.mark.parametrize("name,h", SMALL, ids=[c[0] for c in SMALL])
    def test_variational(self, name, h):
        E0 = dense_eigh(h)[0][0]
        for d in range(1, 7):
            res = solve_gevp(matrices(h, 6).leading(d))
            if res.solved:
                assert res.energy >= E0 - 1e-8

    @pytest.mark.parametrize("name,h", SMALL, ids=[c[0] for c in SMALL])
    def test_non_increasing_without_threshold(self, name, h):
        m = matrices(h, 6)
        energies = [solve_gevp(m.leading(d)) for d in range(1, 7)]
        solved = [r.energy for r in energies if r.solved]
        assert all(b <= a + 1e-8 for a, b in zip(solved, solved[1:]))

    @pytest.mark.parametrize("delta", [1e-10, 1e-6, 1e-3])
    def test_positive_threshold_not_below_unthresholded(self, delta):
        h = hubbard(2, 2)
        m = matrices(h, 6)
        for d in range(1, 7):
            base = solve_gevp(m.leading(d))
            cut = solve_gevp(m.leading(d), Threshold(delta))
            if base.solved and cut.solved:
                assert cut.energy >= base.energy - 1e-8

    def test_singular_without_threshold(self):
        # an eigenstate reference makes every Krylov vector parallel
        h = hubbard(1, 2)
        _, vecs = dense_eigh(h)
        m = assemble_matrices(h, build_subspace(h, StateVector(2, vecs[:, 0]), 3))
        res = solve_gevp(m)
        assert not res.solved and res.status == "singular"
        cut = solve_gevp(m, Threshold(1e-8))
        assert cut.solved and cut.retained == 1
        assert cut.energy == pytest.approx(-1.0, abs=1e-10)

    def test_huge_threshold_empty(self):
        res = solve_gevp(matrices(hubbard(1, 2), 2), Threshold(10.0))
        assert res.status == "empty" and math.isnan(res.energy)

    def test_negative_threshold_on_singular(self):
        h = hubbard(1, 2)
        _, vecs = dense_eigh(h)
        m = assemble_matrices(h, build_subspace(h, StateVector(2, vecs[:, 0]), 3))
        assert solve_gevp(m, Threshold(-1e-3)).status == "not-positive-definite"

    def test_non_finite_threshold(self):
        with pytest.raises(ValueError):
            Threshold(float("nan"))

    def test_diagonal_problem(self):
        m = KrylovMatrices(2, np.diag([3.0, -1.0]).astype(complex), np.diag([1.0, 2.0]).astype(complex))
        assert solve_gevp(m).energy == pytest.approx(-0.5)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_scipy_on_well_conditioned(self, seed):
        from scipy.linalg import eigh

        rng = np.random.default_rng(seed)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        S = a @ a.conj().T + np.eye(4)
        b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        H = b + b.conj().T
        ref = eigh(H, S, eigvals_only=True)[0]
        assert solve_gevp(KrylovMatrices(4, H, S)).energy == pytest.approx(ref, abs=1e-9)


class TestScan:
    def test_layout_and_csv_round_trip(self):
        scan = convergence_scan(hubbard(1, 3), 0.85, 4, [2, 5], seed=1)
        assert len(scan.rows) == 12
        assert [r.n_trotter for r in scan.rows[::4]] == [2, 5, None]
        back = read_scan_csv(scan.to_csv())
        assert len(back) == 12
        for a, b in zip(back, scan.rows):
            assert (a.d, a.n_trotter, a.status) == (b.d, b.n_trotter, b.status)
            if a.solved:
                assert a.energy == b.energy

    def test_d_max_one(self):
        h = hubbard(1, 2)
        scan = convergence_scan(h, 0.85, 1, seed=2)
        b = prepare_overlap_state(h, 0.85, 2)
        assert len(scan.rows) == 1
        assert scan.rows[0].energy == pytest.approx(expectation(b, h), abs=1e-12)

    def test_two_site_reaches_accuracy(self):
        scan = convergence_scan(hubbard(1, 2), 0.85, 4, seed=0)
        assert scan.min_d(None) is not None
        assert scan.E0 == pytest.approx(-1.0)

    def test_errors_non_negative(self):
        scan = convergence_scan(hubbard(2, 2), 0.85, 6, seed=0)
        for r in scan.column(None):
            if r.solved:
                assert r.error >= -1e-8

    def test_jobs_deterministic(self):
        h = hubbard(1, 3)
        a = convergence_scan(h, 0.85, 3, [2], seed=5, jobs=1)
        b = convergence_scan(h, 0.85, 3, [2], seed=5, jobs=2)
        assert a.to_csv() == b.to_csv()

    def test_offset_invariant_error(self):
        h = hubbard(1, 3)
        shifted = PauliSum(h.n, h.terms, h.identity_offset + 3.0)
        a = convergence_scan(h, 0.85, 3, seed=4, t=0.4)
        b = convergence_scan(shifted, 0.85, 3, seed=4, t=0.4)
        for x, y in zip(a.rows, b.rows):
            assert x.error == pytest.approx(y.error, abs=1e-9)


class TestEpperly:
    def test_full_overlap_gives_zero(self):
        assert epperly_bound((1.0, 4.0), 1.0, 3) == 0.0

    def test_formula(self):
        g1, gmax, q, d = 0.5, 6.0, 0.8, 4
        expected = 8 * gmax * (0.2 / 0.8) * (1 + math.pi * g1 / gmax) ** (-2 * d)
        assert epperly_bound((g1, gmax), q, d) == pytest.approx(expected)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 5), st.floats(1, 20), st.floats(0.01, 0.99), st.integers(1, 50))
    def test_decreasing_in_d(self, g1, extra, q, d):
        gaps = (g1, g1 + extra)
        assert epperly_bound(gaps, q, d + 1) < epperly_bound(gaps, q, d)

    def test_dimension_inverts_bound(self):
        gaps, q = (0.7, 5.0), 0.6
        d = epperly_dimension(gaps, q, 1e-3)
        prefactor = 8 * 5.0 * 0.4 / 0.6
        assert prefactor * (1 + math.pi * 0.7 / 5.0) ** (-2 * d) == pytest.approx(1e-3)

    @pytest.mark.parametrize("gaps,q", [((0.0, 1.0), 0.5), ((2.0, 1.0), 0.5), ((1.0, 2.0), 0.0)])
    def test_invalid(self, gaps, q):
        with pytest.raises(ValueError):
            epperly_bound(gaps, q, 2)


class TestExtrapolation:
    def test_exact_line(self):
        assert linear_extrapolate([(1, 3), (2, 5)], 4) == pytest.approx(9)

    def test_least_squares(self):
        assert linear_extrapolate([(0, 0), (1, 1), (2, 1)], 3) == pytest.approx(5 / 3)

    @pytest.mark.parametrize("pts", [[(1, 1)], [(2, 1), (2, 3)]])
    def test_invalid(self, pts):
        with pytest.raises(ValueError):
            linear_extrapolate(pts, 1)


class TestResources:
    def test_counts(self):
        r = krylov_resources(3, 5, GateCount(n_1Q=10, n_2Q=4), 2, n=4)
        assert r.n_C == 45
        assert r.n_2Q == 2 * (3 * 10 + 6 * 4)
        assert r.n_Q == 5
        assert r.provenance == {"n_C": "estimated-lower", "n_2Q": "estimated-lower"}

    @pytest.mark.parametrize("args", [(0, 1, 1), (1, 0, 1), (1, 1, 0)])
    def test_invalid(self, args):
        d, g, nt = args
        with pytest.raises(ValueError):
            krylov_resources(d, g, GateCount(1, 1), nt)
