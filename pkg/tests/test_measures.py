import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from planar_emd import measures as M
from planar_emd.measures import (
    DenseDirichlet,
    DiracPair,
    DomainSpec,
    ProbabilityMeasure,
    SparseK,
    Topology,
    center,
    difference,
    dirac,
    from_dense,
    grid_domain,
    jordan_decompose,
    linf_norm,
    random_measure,
    torus_domain,
    uniform,
    uniform_on_set,
)


def mass_tables(n):
    return hnp.arrays(
        np.float64,
        (n, n),
        elements=st.floats(-10, 10, allow_nan=False, allow_infinity=False),
    )


class TestDomainSpec:
    def test_valid(self):
        d = DomainSpec(4, "torus")
        assert d.topology is Topology.TORUS and d.size == 16

    @pytest.mark.parametrize("n", [0, -3])
    def test_bad_side(self, n):
        with pytest.raises(ValueError):
            DomainSpec(n, Topology.GRID)

    def test_bad_topology(self):
        with pytest.raises(ValueError):
            DomainSpec(4, "sphere")


class TestFromDense:
    def test_zero(self):
        mu = from_dense(grid_domain(2), np.zeros((2, 2)))
        assert mu.total_mass() == 0.0

    def test_dirac_table(self):
        mu = from_dense(grid_domain(2), [[1.0, 0.0], [0.0, 0.0]])
        assert mu.total_mass() == 1.0 and mu.mass[0, 0] == 1.0

    def test_mass_zero_membership(self):
        vals = np.array([[1.0, -0.5, -0.5], [0, 0, 0], [0, 0, 0]])
        assert from_dense(grid_domain(3), vals).is_mass_zero()

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            from_dense(grid_domain(3), np.zeros((2, 2)))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            from_dense(grid_domain(2), [[np.nan, 0], [0, 0]])

    def test_immutable(self):
        mu = from_dense(grid_domain(2), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            mu.mass[0, 0] = 1.0


class TestConstructors:
    def test_dirac(self):
        mu = dirac(grid_domain(4), (0, 0))
        assert mu.mass[0, 0] == 1.0 and mu.total_mass() == 1.0

    def test_dirac_corner(self):
        assert dirac(grid_domain(4), (3, 3)).mass[3, 3] == 1.0

    def test_dirac_out_of_range(self):
        with pytest.raises(ValueError):
            dirac(grid_domain(4), (4, 0))

    @pytest.mark.parametrize("n", [1, 2, 10])
    def test_uniform(self, n):
        mu = uniform(torus_domain(n))
        assert np.all(mu.mass == 1.0 / (n * n))
        assert abs(mu.total_mass() - 1.0) <= 1e-12

    def test_uniform_on_singleton(self):
        mu = uniform_on_set(grid_domain(3), [(0, 0)])
        assert np.array_equal(mu.mass, dirac(grid_domain(3), (0, 0)).mass)

    def test_uniform_on_two(self):
        mu = uniform_on_set(grid_domain(3), [(0, 0), (2, 2)])
        assert mu.mass[0, 0] == 0.5 and mu.mass[2, 2] == 0.5

    def test_uniform_on_duplicate(self):
        with pytest.raises(ValueError):
            uniform_on_set(grid_domain(3), [(0, 0), (0, 0)])

    def test_uniform_on_empty(self):
        with pytest.raises(ValueError):
            uniform_on_set(grid_domain(3), [])


class TestJordan:
    def test_zero(self):
        pos, neg = jordan_decompose(from_dense(grid_domain(2), np.zeros((2, 2))))
        assert pos.total_mass() == 0.0 and neg.total_mass() == 0.0

    def test_dirac_difference(self):
        dom = grid_domain(3)
        sig = difference(dirac(dom, (1, 0)), dirac(dom, (0, 0)))
        pos, neg = jordan_decompose(sig)
        assert pos.mass[1, 0] == 1.0 and neg.mass[0, 0] == 1.0

    def test_mixed_values(self):
        mu = from_dense(grid_domain(2), [[2.0, -3.0], [0.0, 0.0]])
        pos, neg = jordan_decompose(mu)
        assert pos.mass[0, 0] == 2.0 and neg.mass[0, 1] == 3.0

    @settings(max_examples=50)
    @given(mass_tables(4))
    def test_properties(self, table):
        mu = from_dense(torus_domain(4), table)
        pos, neg = jordan_decompose(mu)
        assert np.all(pos.mass >= 0) and np.all(neg.mass >= 0)
        # disjoint supports and bit-exact reconstruction
        assert not np.any((pos.mass > 0) & (neg.mass > 0))
        assert np.array_equal(pos.mass - neg.mass, mu.mass)


class TestDifferenceAndCenter:
    def test_self_difference(self):
        mu = uniform(grid_domain(3))
        assert np.all(difference(mu, mu).mass == 0.0)

    def test_dirac_difference(self):
        dom = grid_domain(3)
        sig = difference(dirac(dom, (0, 1)), dirac(dom, (2, 2)))
        assert sig.mass[0, 1] == 1.0 and sig.mass[2, 2] == -1.0

    def test_domain_mismatch(self):
        with pytest.raises(ValueError):
            difference(uniform(grid_domain(3)), uniform(grid_domain(4)))

    def test_center_uniform_is_zero(self):
        assert np.all(center(uniform(torus_domain(5))).mass == 0.0)

    def test_center_dirac_n2(self):
        got = center(dirac(grid_domain(2), (0, 0))).mass
        assert np.allclose(got, [[0.75, -0.25], [-0.25, -0.25]], atol=0)

    @pytest.mark.parametrize("seed", range(5))
    def test_center_total_mass(self, seed):
        mu = random_measure(seed, torus_domain(6), DenseDirichlet())
        assert abs(center(mu).total_mass()) <= 1e-12


class TestLinfNorm:
    def test_zero(self):
        assert linf_norm(from_dense(grid_domain(2), np.zeros((2, 2)))) == 0.0

    def test_dipole(self):
        dom = grid_domain(3)
        assert linf_norm(difference(dirac(dom, (0, 0)), dirac(dom, (1, 1)))) == 1.0

    def test_scaled(self):
        mu = from_dense(grid_domain(2), [[0.3, 0], [0, 0]])
        assert linf_norm(mu) == 0.3


class TestProbabilityValidation:
    def test_tiny_negative_clamped(self):
        vals = np.array([[0.5, 0.5 + 5e-15], [-5e-15, 0.0]])
        mu = ProbabilityMeasure(from_dense(grid_domain(2), vals))
        assert mu.mass[1, 0] == 0.0

    def test_real_negative_rejected(self):
        vals = [[1.1, -0.1], [0.0, 0.0]]
        with pytest.raises(ValueError):
            ProbabilityMeasure(from_dense(grid_domain(2), vals))

    def test_bad_total_rejected(self):
        with pytest.raises(ValueError):
            ProbabilityMeasure(from_dense(grid_domain(2), np.full((2, 2), 0.3)))


class TestRandomMeasure:
    def test_deterministic(self):
        dom = torus_domain(5)
        for kind in (SparseK(4), DenseDirichlet()):
            m1 = random_measure(123, dom, kind)
            m2 = random_measure(123, dom, kind)
            assert np.array_equal(m1.mass, m2.mass)
        p1 = random_measure(9, dom, DiracPair())
        p2 = random_measure(9, dom, DiracPair())
        assert np.array_equal(p1[0].mass, p2[0].mass)
        assert np.array_equal(p1[1].mass, p2[1].mass)

    def test_sparse_full_support(self):
        dom = grid_domain(3)
        mu = random_measure(0, dom, SparseK(9))
        assert np.count_nonzero(mu.mass) == 9

    def test_sparse_k_too_large(self):
        with pytest.raises(ValueError):
            random_measure(0, grid_domain(3), SparseK(10))

    def test_dirichlet_strictly_positive(self):
        mu = random_measure(7, torus_domain(6), DenseDirichlet())
        assert mu.mass.min() > 0
        assert abs(mu.total_mass() - 1.0) <= 1e-12

    def test_dirac_pair_distinct(self):
        mu, nu = random_measure(3, torus_domain(4), DiracPair())
        assert np.abs(mu.mass - nu.mass).max() == 1.0


class TestLinfBelowTransportNorm:
    # the max cell mass never exceeds the transport norm on integer lattices
    @pytest.mark.parametrize("seed", range(6))
    def test_invariant(self, seed):
        from planar_emd.transport import GroundMetric, emd_norm

        dom = grid_domain(6) if seed % 2 else torus_domain(6)
        kinds = [SparseK(5), DenseDirichlet(), DiracPair()]
        kind = kinds[seed % 3]
        if isinstance(kind, DiracPair):
            mu, nu = random_measure(seed, dom, kind)
        else:
            mu = random_measure(2 * seed, dom, kind)
            nu = random_measure(2 * seed + 1, dom, kind)
        sig = difference(mu, nu)
        assert linf_norm(sig) <= emd_norm(sig, GroundMetric(dom)) + 1e-9


class TestTextFormats:
    def test_sparse_roundtrip(self):
        dom = torus_domain(5)
        mu = difference(dirac(dom, (1, 2)), dirac(dom, (4, 0)))
        back = M.parse_measure(M.write_sparse(mu))
        assert back.domain == dom
        assert np.array_equal(back.mass, mu.mass)

    def test_dense_roundtrip(self):
        mu = random_measure(5, grid_domain(4), DenseDirichlet())
        back = M.parse_measure(M.write_dense(mu.measure))
        assert back.domain == grid_domain(4)
        assert np.array_equal(back.mass, mu.mass)

    def test_header_carries_topology(self):
        text = M.write_sparse(uniform(torus_domain(2)).measure)
        assert text.splitlines()[0] == "n 2 torus"

    def test_sparse_duplicate_atoms_accumulate(self):
        text = "n 3 grid\n0 0 0.25\n0 0 0.25\n"
        assert M.parse_measure(text).mass[0, 0] == 0.5

    def test_dense_wins_ambiguity(self):
        # 3 body lines x 3 tokens parses as a dense 3x3 table
        text = "n 3 grid\n0 0 1\n0 0 0\n0 0 0\n"
        mu = M.parse_measure(text)
        assert mu.mass[0, 2] == 1.0 and mu.total_mass() == 1.0

    def test_bad_header(self):
        with pytest.raises(ValueError):
            M.parse_measure("m 3 grid\n")

    def test_atom_out_of_range(self):
        with pytest.raises(ValueError):
            M.parse_measure("n 2 grid\n5 0 1.0\n")

    def test_file_roundtrip(self, tmp_path):
        mu = random_measure(8, torus_domain(3), DenseDirichlet())
        path = tmp_path / "m.txt"
        M.write_measure(mu.measure, path, dense=True)
        assert np.array_equal(M.read_measure(path).mass, mu.mass)

    @settings(max_examples=25)
    @given(mass_tables(3))
    def test_sparse_text_roundtrip_exact(self, table):
        mu = from_dense(grid_domain(3), table)
        # sparse bodies with exactly n atom lines would parse as dense
        text = M.write_sparse(mu)
        if len(text.strip().splitlines()) - 1 == 3:
            return
        back = M.parse_measure(text)
        assert np.array_equal(back.mass, mu.mass)
