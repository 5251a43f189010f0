import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from latdec.errors import CapacityError, CatalogError, DecompositionError
from latdec.exact import closest_z, sphere_decode
from latdec.lattice import (
    GRAMS, Lattice, catalog_load, cholesky_generator, fold_into_parallelotope, load_lattice_file,
    resolve, shell_enumerate, shells, unfold,
)


def test_a2_generator():
    assert np.allclose(catalog_load("A2").G, [[1, 0], [0.5, 0.8660254]], atol=1e-7)


def test_d4_gram():
    assert np.allclose(catalog_load("D4").gram, [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 0], [1, 1, 0, 2]], atol=1e-12)


def test_z2_basics():
    lat = catalog_load("Z2")
    assert np.array_equal(lat.G, np.eye(2))
    assert lat.d_min == pytest.approx(1.0)
    assert lat.tau == 4


def test_e6_gram_entries():
    gram = catalog_load("E6").gram
    assert np.allclose(np.diag(gram), 3)
    off = gram[~np.eye(6, dtype=bool)]
    assert all(min(abs(x), abs(x - 1.5)) < 1e-12 for x in off)


def test_unknown_name():
    with pytest.raises(CatalogError):
        catalog_load("B7")
    with pytest.raises(CatalogError):
        catalog_load("Z0")


@pytest.mark.parametrize("name,det,dmin2,tau,gamma", [
    ("A2", math.sqrt(3) / 2, 1, 6, 2 / math.sqrt(3)),
    ("A3", 2, 2, 12, 2 / 4 ** (1 / 3)),
    ("D4", 2, 2, 24, math.sqrt(2)),
    ("E6", math.sqrt(3 * 1.5 ** 6), 3, 72, 2 / 3 ** (1 / 6)),
    ("E8", 16, 4, 240, 2),
])
def test_catalog_constants(name, det, dmin2, tau, gamma):
    lat = catalog_load(name)
    assert lat.det == pytest.approx(det, rel=1e-9)
    assert lat.d_min ** 2 == pytest.approx(dmin2, rel=1e-9)
    assert lat.tau == tau
    assert lat.gamma == pytest.approx(gamma, rel=1e-9)


def test_constants_recomputed_from_shells(any_lattice):
    lat = any_lattice
    pts = shell_enumerate(lat, lat.d_min ** 2 * 1.5)
    norms = np.array([p.x @ p.x for p in pts])
    m = norms.min()
    assert m == pytest.approx(lat.d_min ** 2, rel=1e-9)
    assert int(np.sum(norms <= m + 1e-9)) == lat.tau
    assert lat.det == pytest.approx(abs(np.linalg.det(lat.G)), rel=1e-9)
    assert lat.gamma == pytest.approx(m / lat.det ** (2 / lat.n), rel=1e-9)


def test_cholesky_examples():
    assert np.allclose(cholesky_generator(np.eye(3)), np.eye(3))
    assert cholesky_generator(GRAMS["A3"])[0, 0] == pytest.approx(math.sqrt(2))
    G = cholesky_generator(GRAMS["D4"])
    assert np.allclose(G @ G.T, GRAMS["D4"], atol=1e-9, rtol=0)
    assert np.allclose(G, np.tril(G))


def test_cholesky_rejects_non_spd():
    with pytest.raises(DecompositionError):
        cholesky_generator([[1, 2], [2, 1]])
    with pytest.raises(DecompositionError):
        cholesky_generator([[1, 0.5], [0.4, 1]])
    with pytest.raises(DecompositionError):
        cholesky_generator(np.zeros((2, 2)))


@given(arrays(np.float64, (5, 5), elements=st.floats(-3, 3)), st.floats(0.01, 1.0))
def test_cholesky_reconstruction_property(A, eps):
    gram = A @ A.T + eps * np.eye(5)
    G = cholesky_generator(gram)
    assert np.allclose(G @ G.T, gram, atol=1e-9, rtol=0)
    assert np.allclose(G, np.tril(G))


def test_cholesky_100_random_spd(rng):
    for _ in range(100):
        n = int(rng.integers(1, 9))
        A = rng.normal(size=(n, n))
        gram = A @ A.T + 1e-2 * np.eye(n)
        G = cholesky_generator(gram)
        assert np.allclose(G @ G.T, gram, atol=1e-9, rtol=0)


def test_shell_examples():
    assert len(shell_enumerate(catalog_load("Z2"), 1)) == 4
    a2 = catalog_load("A2")
    pts = shell_enumerate(a2, 1)
    # brute force over |z_i| <= 2
    zs = [(a, b) for a in range(-2, 3) for b in range(-2, 3) if (a, b) != (0, 0)]
    brute = [z for z in zs if np.sum((np.array(z) @ a2.G) ** 2) <= 1 + 1e-9]
    assert len(pts) == len(brute) == 6
    assert len(shell_enumerate(catalog_load("E8"), 4)) == 240


def test_shell_enumerate_rejects_bad_radius():
    with pytest.raises(ValueError):
        shell_enumerate(catalog_load("Z2"), 0)


def test_enumeration_cap():
    lat = Lattice(np.eye(3), enum_cap=50)
    with pytest.raises(CapacityError):
        shell_enumerate(lat, 16)


def test_e8_theta_series_shells():
    got = [c for _, c in shells(catalog_load("E8"), 4)]
    # 240 sigma_3(m)
    assert got == [240, 2160, 6720, 17520]


def test_fold_examples():
    a2 = catalog_load("A2")
    f = fold_into_parallelotope(a2, [2.25, 0.1])
    assert f.t.tolist() == [2, 0]
    assert np.allclose(f.y, [0.25, 0.1])
    f = fold_into_parallelotope(a2, [0.3, 0.2])
    assert f.t.tolist() == [0, 0]
    assert np.allclose(f.y, [0.3, 0.2])
    z = np.array([3, -2])
    f = fold_into_parallelotope(a2, z @ a2.G)
    assert f.t.tolist() == z.tolist()
    assert np.allclose(f.y, 0, atol=1e-12)


def test_unfold_examples():
    a2 = catalog_load("A2")
    assert unfold(a2, np.array([0, 0]), np.array([2, 0])).z.tolist() == [2, 0]
    assert unfold(a2, np.array([1, 1]), np.array([0, 0])).z.tolist() == [1, 1]
    p = unfold(a2, a2.point([0, 1]), np.array([-3, 2]))
    assert np.allclose(p.x, -3 * a2.G[0] + 3 * a2.G[1])


@given(arrays(np.float64, 4, elements=st.floats(-50, 50)))
def test_fold_invariants(y0):
    lat = catalog_load("D4")
    f = fold_into_parallelotope(lat, y0)
    assert np.allclose(f.y, y0 - f.t @ lat.G)
    a = lat.coords(f.y)
    assert np.all(a >= -1e-9) and np.all(a < 1 + 1e-9)


@given(arrays(np.float64, 3, elements=st.floats(-20, 20)), arrays(np.int64, 3, elements=st.integers(-50, 50)))
def test_decode_fold_commutes_with_translation(y0, z):
    lat = catalog_load("A3")

    def decode(y):
        f = fold_into_parallelotope(lat, y)
        return unfold(lat, closest_z(lat, f.y)[0], f.t).z

    # away from Voronoi boundaries the answer is unique, so translation must carry it exactly
    x = sphere_decode(lat, y0).x
    others = [p for p in shell_enumerate(lat, 8)]
    d0 = np.sum((y0 - x) ** 2)
    gap = min(np.sum((y0 - x - p.x) ** 2) for p in others) - d0
    if gap < 1e-6:
        return
    assert np.array_equal(decode(y0 + z @ lat.G), decode(y0) + z)


def test_lattice_file_loading(tmp_path):
    p = tmp_path / "hex.json"
    p.write_text('{"name": "hex", "gram": [[1, 0.5], [0.5, 1]]}')
    lat = load_lattice_file(p)
    assert lat.name == "hex" and lat.tau == 6
    p.write_text('{"name": "sq", "generator": [[1, 0], [0, 1]]}')
    assert resolve(str(p)).tau == 4
    p.write_text('{"name": "bad", "generator": [[1, 0], [0, 1]], "gram": [[1, 0], [0, 1]]}')
    with pytest.raises(CatalogError):
        load_lattice_file(p)
    p.write_text('{"name": "bad"}')
    with pytest.raises(CatalogError):
        load_lattice_file(p)


def test_singular_generator_rejected():
    with pytest.raises(CatalogError):
        Lattice(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_lattice_is_immutable():
    lat = catalog_load("A2")
    with pytest.raises(ValueError):
        lat.G[0, 0] = 5.0
