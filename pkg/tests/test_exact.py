import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from latdec.errors import CapacityError
from latdec.exact import brute_force_z, closest_z, relevant_vectors, sphere_decode, voronoi_contains
from latdec.lattice import Lattice, catalog_load
from latdec.vr import covering_radius_bound

from conftest import ROOT_NAMES


def test_zero_decodes_to_zero(any_lattice):
    assert not np.any(sphere_decode(any_lattice, np.zeros(any_lattice.n)).z)


def test_within_packing_radius(any_lattice, rng):
    lat = any_lattice
    z = rng.integers(-3, 4, size=(200, lat.n))
    eta = rng.normal(size=(200, lat.n))
    eta *= 0.99 * lat.rho * rng.random((200, 1)) / np.linalg.norm(eta, axis=1, keepdims=True)
    assert np.array_equal(closest_z(lat, z @ lat.G + eta), z)


def test_a2_example():
    assert sphere_decode(catalog_load("A2"), [0.25, 0.1]).z.tolist() == [0, 0]
    assert brute_force_z(catalog_load("A2"), [[0.25, 0.1]], bound=2)[0].tolist() == [0, 0]


@pytest.mark.parametrize("name", ["Z2", "A2", "A2-alt", "A3", "D4", "D4-root", "Z4"])
def test_matches_exhaustive_search(name, rng):
    lat = catalog_load(name)
    # targets inside a box whose closest points have |z_i| well inside the search range
    Y = rng.uniform(-1, 1, size=(1000, lat.n)) @ lat.G
    assert np.array_equal(closest_z(lat, Y), brute_force_z(lat, Y, bound=3))


def test_tie_breaks_to_lexicographically_smallest():
    z2 = catalog_load("Z2")
    # (0.5, 0.5) is equidistant from four points
    assert sphere_decode(z2, [0.5, 0.5]).z.tolist() == [0, 0]
    assert sphere_decode(z2, [-0.5, 0.5]).z.tolist() == [-1, 0]
    assert brute_force_z(z2, [[-0.5, -0.5]])[0].tolist() == sphere_decode(z2, [-0.5, -0.5]).z.tolist()


def test_relevant_vectors_z2():
    got = sorted(tuple(p.z) for p in relevant_vectors(catalog_load("Z2")))
    assert got == sorted([(1, 0), (-1, 0), (0, 1), (0, -1)])


@pytest.mark.parametrize("name", ROOT_NAMES)
def test_relevant_count_equals_kissing_number(name):
    lat = catalog_load(name)
    rel = relevant_vectors(lat)
    assert len(rel) == lat.tau
    assert all(np.isclose(p.x @ p.x, lat.d_min ** 2) for p in rel)


def test_relevant_vectors_symmetric_and_bounded(any_lattice):
    lat = any_lattice
    rel = relevant_vectors(lat)
    zs = {tuple(p.z) for p in rel}
    assert all(tuple(-np.array(z)) in zs for z in zs)
    mu = covering_radius_bound(lat)
    for p in rel:
        nrm = np.linalg.norm(p.x)
        assert lat.d_min - 1e-9 <= nrm <= 2 * mu + 1e-9


def test_relevant_vectors_rank_cap():
    with pytest.raises(CapacityError):
        relevant_vectors(Lattice(np.eye(21)))


def test_voronoi_contains_examples():
    a2 = catalog_load("A2")
    rel = relevant_vectors(a2)
    assert voronoi_contains(a2, rel, np.zeros(2))
    v = rel[0].x
    assert not voronoi_contains(a2, rel, v)
    assert voronoi_contains(a2, rel, v / 2)


def test_oracle_self_consistency(any_lattice, rng):
    lat = any_lattice
    rel = relevant_vectors(lat)
    Y = rng.normal(scale=3, size=(10_000, lat.n))
    X = closest_z(lat, Y) @ lat.G
    V = np.array([p.x for p in rel])
    R = Y - X
    assert np.all(R @ V.T <= 0.5 * (V * V).sum(axis=1) + 1e-9)


@given(arrays(np.float64, 4, elements=st.floats(-10, 10)))
def test_decoded_point_is_no_farther_than_neighbours(y):
    lat = catalog_load("D4")
    x = sphere_decode(lat, y).x
    d = np.sum((y - x) ** 2)
    for p in relevant_vectors(lat):
        assert d <= np.sum((y - x - p.x) ** 2) + 1e-9
