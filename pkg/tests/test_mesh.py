import math

import numpy as np
import pytest
import scipy.linalg

from kleinrefl.mesh import (
    ConvergenceError,
    MeshError,
    TriangleMesh,
    build_icosphere,
    cotangent_stiffness,
    laplace_spectrum,
    lumped_mass,
    mesh_area,
    read_mesh,
    triangle_areas,
    write_mesh,
)


@pytest.fixture(scope="module")
def spheres():
    return {d: build_icosphere(d) for d in range(7)}


@pytest.fixture(scope="module")
def spectra(spheres):
    return {d: laplace_spectrum(spheres[d], k=5) for d in range(2, 7)}


def edge_count(mesh):
    t = mesh.triangles
    e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    return len(np.unique(e, axis=0))


class TestIcosphere:
    def test_icosahedron(self, spheres):
        m = spheres[0]
        assert (m.n_vertices, len(m.triangles)) == (12, 20)

    def test_depth1_euler(self, spheres):
        m = spheres[1]
        assert len(m.triangles) == 80 and m.n_vertices == 42
        assert m.n_vertices - edge_count(m) + len(m.triangles) == 2

    @pytest.mark.parametrize("depth", range(7))
    def test_counts_and_validity(self, spheres, depth):
        m = spheres[depth]
        m.validate()
        assert len(m.triangles) == 20 * 4**depth
        assert m.n_vertices - edge_count(m) + len(m.triangles) == 2
        assert np.max(np.abs(np.linalg.norm(m.vertices, axis=1) - 1)) < 1e-12

    def test_outward_orientation(self, spheres):
        m = spheres[3]
        p = m.vertices[m.triangles]
        normals = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        assert np.all(np.einsum("ij,ij->i", normals, p.mean(axis=1)) > 0)

    @pytest.mark.parametrize("depth", [-1, 8, 2.0])
    def test_depth_range(self, depth):
        with pytest.raises(MeshError):
            build_icosphere(depth)


class TestArea:
    def test_icosahedron_closed_form(self, spheres):
        # edge of an icosahedron with circumradius 1
        a = 4 / math.sqrt(10 + 2 * math.sqrt(5))
        assert mesh_area(spheres[0]) == pytest.approx(5 * math.sqrt(3) * a * a, rel=1e-13)
        assert mesh_area(spheres[0]) == pytest.approx(9.5745, abs=1e-4)

    def test_convergence(self, spheres):
        areas = [mesh_area(spheres[d]) for d in range(7)]
        assert all(x < y for x, y in zip(areas, areas[1:]))
        assert all(x < 4 * math.pi for x in areas)
        assert abs(areas[5] - 4 * math.pi) < 1e-3 * 4 * math.pi

    def test_no_degenerate(self, spheres):
        assert np.all(triangle_areas(spheres[4]) > 0)


class TestValidation:
    def test_open_mesh(self, spheres):
        m = spheres[1]
        with pytest.raises(MeshError):
            TriangleMesh(m.vertices, m.triangles[1:]).validate()

    def test_flipped_triangle(self, spheres):
        t = spheres[1].triangles.copy()
        t[0] = t[0, ::-1]
        with pytest.raises(MeshError, match="orientation"):
            TriangleMesh(spheres[1].vertices, t).validate()

    def test_degenerate(self):
        v = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0.0]])
        t = np.array([[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
        with pytest.raises(MeshError, match="degenerate"):
            TriangleMesh(v, t).validate()

    def test_tetrahedron_ok(self):
        v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1.0]])
        t = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
        TriangleMesh(v, t).validate()


class TestDiscreteOperators:
    def test_stiffness_symmetric_rows_sum_zero(self, spheres):
        K = cotangent_stiffness(spheres[2])
        assert abs(K - K.T).max() < 1e-12
        assert np.abs(K.sum(axis=1)).max() < 1e-12

    def test_mass_sums_to_area(self, spheres):
        assert lumped_mass(spheres[3]).sum() == pytest.approx(mesh_area(spheres[3]), rel=1e-13)

    def test_dense_oracle(self, spheres):
        m = spheres[2]
        K = cotangent_stiffness(m).toarray()
        M = np.diag(lumped_mass(m))
        dense = scipy.linalg.eigh(K, M, eigvals_only=True)[:8]
        res = laplace_spectrum(m, k=8)
        np.testing.assert_allclose(res.eigenvalues[1:], dense[1:], rtol=1e-10)
        assert abs(res.eigenvalues[0] - dense[0]) < 1e-10

    def test_rayleigh_quotient_of_coordinates(self, spheres, spectra):
        # coordinate functions are orthogonal to constants on the sphere
        m = spheres[5]
        K, M = cotangent_stiffness(m), lumped_mass(m)
        for x in m.vertices.T:
            x = x - (M @ x) / M.sum()
            rq = (x @ (K @ x)) / (x @ (M * x))
            assert spectra[5].lambda1 <= rq + 1e-9
            assert rq == pytest.approx(2, rel=0.01)


class TestSpectrum:
    def test_depth5_first_eigenvalue(self, spectra):
        res = spectra[5]
        assert res.lambda1 == pytest.approx(2, rel=0.01)
        assert res.multiplicity1 == 3

    @pytest.mark.parametrize("depth", range(2, 7))
    def test_constant_mode(self, spectra, depth):
        ev = spectra[depth].eigenvalues
        assert abs(ev[0]) < 1e-10
        assert all(x >= -1e-10 for x in ev)
        assert sum(abs(x) < 1e-8 * max(ev) for x in ev) == 1
        assert ev == sorted(ev)

    def test_monotone_convergence(self, spectra):
        err = [abs(spectra[d].lambda1 - 2) for d in range(2, 7)]
        assert all(x > y for x, y in zip(err, err[1:]))
        assert err[-1] < err[1]

    def test_scaling(self, spheres, spectra):
        c = 3.0
        scaled = laplace_spectrum(spheres[4].scaled(c), k=5)
        base = laplace_spectrum(spheres[4], k=5)
        assert scaled.lambda1 == pytest.approx(base.lambda1 / c**2, rel=1e-9)
        assert scaled.area == pytest.approx(base.area * c**2, rel=1e-12)
        assert scaled.lambda1 * scaled.area == pytest.approx(base.lambda1 * base.area, rel=1e-9)

    def test_residuals(self, spectra):
        assert max(spectra[6].residuals) < 1e-10

    def test_deterministic(self, spheres, spectra):
        assert laplace_spectrum(spheres[3], k=5).eigenvalues == laplace_spectrum(spheres[3], k=5).eigenvalues

    def test_k_range(self, spheres):
        with pytest.raises(ValueError):
            laplace_spectrum(spheres[0], k=12)
        with pytest.raises(ValueError):
            laplace_spectrum(spheres[0], k=0)

    def test_k1_reports_only_constant_mode(self, spheres):
        res = laplace_spectrum(spheres[2], k=1)
        assert len(res.eigenvalues) == 1 and res.lambda1 == pytest.approx(2, rel=1e-3)

    def test_nonconvergence(self, spheres):
        with pytest.raises(ConvergenceError):
            laplace_spectrum(spheres[4], k=5, maxiter=1)

    def test_rejects_bad_mesh(self, spheres):
        with pytest.raises(MeshError):
            laplace_spectrum(TriangleMesh(spheres[1].vertices, spheres[1].triangles[2:]))


def test_mesh_round_trip(tmp_path, spheres):
    path = tmp_path / "s.mesh"
    write_mesh(spheres[2], path)
    back = read_mesh(path)
    np.testing.assert_array_equal(back.vertices, spheres[2].vertices)
    np.testing.assert_array_equal(back.triangles, spheres[2].triangles)
    text = path.read_text().splitlines()
    assert text[1].startswith("v ") and text[-1].startswith("f ")


def test_read_mesh_bad_line(tmp_path):
    path = tmp_path / "bad.mesh"
    path.write_text("v 0 0 0\nq 1 2 3\n")
    with pytest.raises(MeshError):
        read_mesh(path)
