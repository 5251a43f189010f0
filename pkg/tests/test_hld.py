import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latdec.errors import SynthesisRefused
from latdec.exact import closest_z
from latdec.hld import (
    HLD, BooleanDNF, Hyperplane, dnf_isomorphic, hld_compile, hld_decode, hld_decode_z, hld_synthesize,
    hyperplane_bits, reduce_terms, term_units,
)
from latdec.lattice import Lattice, catalog_load
from latdec.nets import Layer, FeedForwardNet, forward

from conftest import VR_NAMES

_cache = {}


def synth(name):
    if name not in _cache:
        _cache[name] = hld_synthesize(catalog_load(name))
    return _cache[name]


def uniform_in_p(lat, m, seed=0):
    return np.random.default_rng(seed).random((m, lat.n)) @ lat.G


def test_canonical_orientation():
    h, flipped = Hyperplane.canonical([0.0, -2.0, 1.0], -1.5)
    assert flipped and h.v.tolist() == [0.0, 2.0, -1.0] and h.b == 1.5
    h2, flipped2 = Hyperplane.canonical([0.0, 2.0, -1.0], 1.5)
    assert not flipped2 and h.key() == h2.key()
    with pytest.raises(ValueError):
        Hyperplane.canonical([0.0, 0.0], 1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_zn_single_literals(n):
    h = hld_synthesize(catalog_load(f"Z{n}"))
    assert len(h.pool) == n
    for k, e in enumerate(h.eqs):
        assert len(e.terms) == 1 and len(next(iter(e.terms))) == 1
        (hi, neg), = next(iter(e.terms))
        plane = h.pool[hi]
        assert not neg
        assert np.allclose(plane.v, np.eye(n)[k]) and plane.b == pytest.approx(0.5)


def test_a2_structure():
    h = synth("A2")
    assert len(h.pool) == 5
    assert [len(e.terms) for e in h.eqs] == [2, 2]
    eqs = [[list(t) for t in e.terms] for e in h.eqs]
    # c + b.e and d + a.~e with a..e -> 0..4
    paper = [[[(2, False)], [(1, False), (4, False)]], [[(3, False)], [(0, False), (4, True)]]]
    assert dnf_isomorphic(eqs, paper)


def test_a2_decode_examples():
    lat = catalog_load("A2")
    h = synth("A2")
    assert hld_decode(h, lat, [0.25, 0.1]).z.tolist() == [0, 0]
    y = lat.G[0] + lat.G[1] - 0.01
    assert hld_decode(h, lat, y).z.tolist() == [1, 1]


@pytest.mark.parametrize("name", VR_NAMES + ["D4-root", "Z3"])
def test_equivalence_with_oracle(name):
    lat = catalog_load(name)
    Y = uniform_in_p(lat, 100_000, seed=7)
    assert np.array_equal(hld_decode_z(synth(name), Y), closest_z(lat, Y))


def test_a2_alt_collapses_second_equation():
    # corner (1,1) of {v1, v1+v2} has no probe that leaves the z2 = 1 region inside P(B)
    h = synth("A2-alt")
    assert any(len(t) == 0 for t in h.eqs[1].terms)


def test_reduction_is_sound():
    for name in ["A2", "A3", "D4", "D4-root"]:
        lat, h = catalog_load(name), synth(name)
        bits = hyperplane_bits(h.pool, uniform_in_p(lat, 10_000, seed=3))
        for raw, red in zip(h.raw_eqs, h.eqs):
            assert np.array_equal(raw.evaluate(bits), red.evaluate(bits))
            assert len(red.terms) <= len(raw.terms) == 2 ** (lat.n - 1)


def test_reduce_terms_rules():
    a, b, c = (0, False), (1, False), (2, True)
    got = reduce_terms([{a}, {a, b}, {a}, {b, c}, {a, b, c}])
    assert got == [frozenset({a}), frozenset({b, c})]


@given(st.lists(st.frozensets(st.tuples(st.integers(0, 4), st.booleans()), max_size=4), max_size=8))
def test_reduce_terms_properties(terms):
    red = reduce_terms(terms)
    assert len(set(red)) == len(red)
    assert not any(a < b for a in red for b in red)
    bits = np.array(np.meshgrid(*[[0, 1]] * 5)).reshape(5, -1).T.astype(bool)
    assert np.array_equal(BooleanDNF(0, [frozenset(t) for t in terms]).evaluate(bits),
                          BooleanDNF(0, red).evaluate(bits))


def test_and_or_neurons():
    and_net = FeedForwardNet([Layer([[1.0], [1.0]], [-1.5], "heaviside")])
    assert [forward(and_net, x)[0] for x in ([1, 1], [1, 0], [0, 0])] == [1, 0, 0]
    or_net = FeedForwardNet([Layer([[1.0], [1.0]], [-0.5], "heaviside")])
    assert [forward(or_net, x)[0] for x in ([0, 0], [0, 1], [1, 1])] == [0, 1, 1]


@pytest.mark.parametrize("name", ["A2", "A3", "D4", "E8"])
def test_compiled_net_matches_decoder(name):
    lat, h = catalog_load(name), synth(name)
    net = hld_compile(h)
    assert len(net.layers) == 3 and all(l.act == "heaviside" for l in net.layers)
    Y = uniform_in_p(lat, 10_000, seed=11)
    assert np.array_equal(forward(net, Y).astype(np.int64), hld_decode_z(h, Y))


def test_compiled_layer_shapes():
    h = synth("D4-root")
    net = hld_compile(h)
    nterms = sum(len(e.terms) for e in h.eqs)
    assert net.layers[0].w.shape == (4, len(h.pool))
    assert net.layers[1].w.shape == (len(h.pool), nterms)
    assert net.layers[2].w.shape == (nterms, 4)
    assert len(term_units(h, 0)) == len(h.eqs[0].terms)


def test_json_round_trip(tmp_path):
    h = synth("D4")
    p = tmp_path / "d4.json"
    h.save(p)
    data = json.loads(p.read_text())
    assert set(data) == {"hyperplanes", "equations"}
    assert data["equations"][0]["coordinate"] == 1
    back = HLD.load(p)
    Y = uniform_in_p(catalog_load("D4"), 5000)
    assert np.array_equal(hld_decode_z(back, Y), hld_decode_z(h, Y))
    assert [e.render() for e in back.eqs] == [e.render() for e in h.eqs]


def test_d4_root_equation_matches_reference_shape():
    h = synth("D4-root")
    e = h.eqs[0]
    assert sorted(len(t) for t in e.terms) == [1, 2, 3, 3, 5]
    assert len(e.hyperplanes()) == 10
    u = {i: (i - 1, False) for i in range(1, 11)}
    ref = [[[u[1]], [u[2], u[3], u[4], u[5], u[6]], [u[4], u[7], u[8]], [u[4], u[7], u[9]], [u[4], u[10]]]]
    assert dnf_isomorphic([[list(t) for t in e.terms]], ref)


def test_dnf_isomorphic_negative_cases():
    a = [[[(0, False)], [(1, False), (2, False)]]]
    assert dnf_isomorphic(a, [[[(5, True)], [(7, False), (6, True)]]])
    assert not dnf_isomorphic(a, [[[(0, False)], [(0, False), (2, False)]]])
    assert not dnf_isomorphic(a, [[[(0, False), (1, False)], [(2, False)], [(3, False)]]])


def test_e6_synthesis_is_near_ml():
    lat = catalog_load("E6")
    h = synth("E6")
    Y = uniform_in_p(lat, 50_000, seed=5)
    Z = closest_z(lat, Y)
    corner = np.all((Z >= 0) & (Z <= 1), axis=1)
    got = hld_decode_z(h, Y)
    # agreement wherever the closest point is a corner; mismatches only inside O
    assert np.array_equal(got[corner], Z[corner])


def test_preflight_refuses_skewed_basis():
    skew = Lattice(np.array([[1.0, 0.0], [7.0, 1.0]]), name="skewZ2")
    with pytest.raises(SynthesisRefused) as err:
        hld_synthesize(skew)
    assert err.value.report.o_volume_fraction > 0.05
