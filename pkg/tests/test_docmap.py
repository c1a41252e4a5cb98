import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmap import docmap as dm
from qmap.docmap import ChoiMatrix, MapParams, PatternViolation, Symmetry


def random_params(rng, allow_negative=False):
    lo = -1.0 if allow_negative else 0.0
    a = rng.uniform(lo, 1.0, 4)
    lam, mu = rng.normal(size=2) + 1j * rng.normal(size=2)
    return MapParams(*a, lam, mu)


def random_matrix(rng):
    return rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))


def test_apply_identity():
    rng = np.random.default_rng(0)
    x = random_matrix(rng)
    assert np.abs(dm.apply(dm.identity(), x) - x).max() == 0


def test_apply_choi_map_on_sigma1():
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.abs(dm.apply(dm.choi_map(), s1) - 0.5 * s1).max() < 1e-15


def test_choi_map_is_trace_plus_transpose():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = random_matrix(rng)
        expected = np.eye(2) * np.trace(x) / 4 + x.T / 2
        assert np.abs(dm.apply(dm.choi_map(), x) - expected).max() < 1e-14


def test_apply_unit():
    p = MapParams(0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
    assert np.abs(dm.apply(p, np.eye(2)) - np.diag([0.3, 0.7])).max() < 1e-15


def test_apply_entries():
    p = MapParams(0.1, 0.2, 0.3, 0.4, 0.5 + 0.1j, 0.6 - 0.2j)
    x = np.array([[1.0, 2.0 + 1j], [3.0 - 1j, 4.0]])
    y = dm.apply(p, x)
    assert abs(y[0, 0] - (0.1 + 0.8)) < 1e-15
    assert abs(y[1, 1] - (0.3 + 1.6)) < 1e-15
    assert abs(y[0, 1] - (p.lam * x[0, 1] + p.mu * x[1, 0])) < 1e-15
    assert abs(y[1, 0] - (np.conj(p.lam) * x[1, 0] + np.conj(p.mu) * x[0, 1])) < 1e-15


def test_apply_linear_and_hermiticity_preserving():
    rng = np.random.default_rng(2)
    for _ in range(200):
        p = random_params(rng, allow_negative=True)
        x, y = random_matrix(rng), random_matrix(rng)
        al, be = rng.normal(size=2) + 1j * rng.normal(size=2)
        lhs = dm.apply(p, al * x + be * y)
        rhs = al * dm.apply(p, x) + be * dm.apply(p, y)
        assert np.abs(lhs - rhs).max() < 1e-12
        assert np.abs(dm.apply(p, x.conj().T) - dm.apply(p, x).conj().T).max() < 1e-14


def test_apply_batched():
    rng = np.random.default_rng(3)
    p = random_params(rng)
    xs = rng.normal(size=(5, 2, 2)) + 1j * rng.normal(size=(5, 2, 2))
    batch = dm.apply(p, xs)
    for k in range(5):
        assert np.abs(batch[k] - dm.apply(p, xs[k])).max() == 0


def test_choi_transposition_and_reduction():
    ct = dm.choi(dm.transposition()).m
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = expected[1, 2] = expected[2, 1] = 1
    assert np.array_equal(ct, expected)
    cr = dm.choi(dm.reduction()).m
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[2, 2] = 1
    expected[0, 3] = expected[3, 0] = -1
    assert np.array_equal(cr, expected)


def test_choi_of_choi_map():
    c = dm.choi(dm.choi_map()).m
    assert np.abs(np.diag(c) - [0.75, 0.25, 0.25, 0.75]).max() == 0
    assert c[1, 2] == 0.5 and c[2, 1] == 0.5
    assert c[0, 3] == 0 and c[3, 0] == 0


def test_choi_of_pauli_map():
    p = (0.4, 0.3, 0.2, 0.1)
    c = dm.choi(dm.pauli(*p)).m
    assert np.abs(np.diag(c) - [0.5, 0.5, 0.5, 0.5]).max() < 1e-15
    assert abs(c[0, 3] - 0.3) < 1e-15 and abs(c[1, 2] - 0.1) < 1e-15


def test_choi_matches_definition():
    rng = np.random.default_rng(4)
    for _ in range(500):
        p = random_params(rng, allow_negative=True)
        assert np.abs(dm.choi(p).m - dm.choi_from_definition(p)).max() < 1e-15


def test_choi_pattern():
    rng = np.random.default_rng(5)
    c = dm.choi(random_params(rng)).m
    mask = np.ones((4, 4), dtype=bool)
    for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]:
        mask[i, j] = False
    assert np.abs(c[mask]).max() <= 1e-14
    assert np.abs(c - c.conj().T).max() == 0


def test_from_choi_examples():
    assert dm.from_choi(dm.choi(dm.transposition())) == MapParams(1, 0, 0, 1, 0, 1)
    assert dm.from_choi(dm.choi(dm.reduction())) == MapParams(0, 1, 1, 0, -1, 0)


def test_from_choi_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(10_000):
        p = random_params(rng, allow_negative=True)
        q = dm.from_choi(dm.choi(p))
        assert q == p


@pytest.mark.parametrize("index", [(0, 1), (1, 3), (2, 0), (3, 2)])
def test_from_choi_rejects_off_pattern(index):
    c = dm.choi(dm.choi_map()).m.copy()
    c[index] = 1e-9
    with pytest.raises(PatternViolation) as err:
        dm.from_choi(c)
    assert err.value.index == index


def test_from_choi_rejects_non_hermitian_slot():
    c = dm.choi(dm.choi_map()).m.copy()
    c[2, 1] = 0.4
    with pytest.raises(PatternViolation):
        dm.from_choi(c)


def test_dual_trace_pairing():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        p = random_params(rng, allow_negative=True)
        x, y = random_matrix(rng), random_matrix(rng)
        lhs = np.trace(dm.apply(dm.dual(p), x).conj().T @ y)
        rhs = np.trace(x.conj().T @ dm.apply(p, y))
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))


def test_dual_involution_and_examples():
    rng = np.random.default_rng(8)
    for _ in range(100):
        p = random_params(rng)
        assert dm.dual(dm.dual(p)) == p
    p = MapParams.unital(0.3, 0.3, 0.2 + 0.4j, 0.1 - 0.2j)
    d = dm.dual(p)
    assert (d.a11, d.a22, d.lam, d.mu) == (0.3, 0.3, 0.2 - 0.4j, 0.1 - 0.2j)
    eta = 0.36
    d = dm.dual(dm.amplitude_damping(eta))
    assert d == MapParams(1.0, 0.0, 1 - eta, eta, 0.6, 0.0)


@pytest.mark.parametrize(
    "p, expected",
    [
        (dm.amplitude_damping(0.5), Symmetry.PHASE_COVARIANT),
        (dm.choi_map(), Symmetry.CONJUGATE_PHASE_COVARIANT),
        (dm.pauli(0.4, 0.3, 0.2, 0.1), Symmetry.ORTHOGONAL_ONLY),
        (MapParams.unital(0.5, 0.5), Symmetry.BOTH),
    ],
)
def test_symmetry_type(p, expected):
    assert dm.symmetry_type(p) is expected


def test_covariance_relations():
    rng = np.random.default_rng(9)
    pc = MapParams.unital(0.3, 0.6, 0.2 - 0.1j, 0.0)
    cc = MapParams.unital(0.3, 0.6, 0.0, 0.3 + 0.2j)
    gen = random_params(rng)
    for phi in rng.uniform(0, 2 * np.pi, 20):
        x = random_matrix(rng)
        assert dm.covariance_residual(pc, x, phi, "phase") < 1e-12
        assert dm.covariance_residual(cc, x, phi, "conjugate") < 1e-12
        assert dm.covariance_residual(gen, x, phi, "orthogonal") < 1e-12
    # a map with both coherences is neither covariant nor conjugate-covariant
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert dm.covariance_residual(gen, x, 0.3, "phase") > 1e-3
    assert dm.covariance_residual(gen, x, 0.3, "conjugate") > 1e-3


def test_unital_trace_preserving():
    pp = dm.pauli(0.4, 0.3, 0.2, 0.1)
    assert dm.is_unital(pp) and dm.is_trace_preserving(pp)
    ad = dm.amplitude_damping(0.3)
    assert dm.is_trace_preserving(ad) and not dm.is_unital(ad)
    assert dm.is_unital(dm.identity()) and dm.is_trace_preserving(dm.identity())


def test_named_channels():
    assert dm.amplitude_damping(1.0) == dm.identity()
    assert dm.pauli(1, 0, 0, 0) == dm.identity()
    for eta in (0.0, 0.25, 0.9):
        assert dm.generalized_amplitude_damping(1.0, eta) == dm.amplitude_damping(eta)
    assert dm.named_channel("choi_map") == dm.choi_map()
    for name, p in [
        ("bit_flip", (0.7, 0.3, 0, 0)),
        ("phase_flip", (0.7, 0, 0, 0.3)),
        ("bit_phase_flip", (0.7, 0, 0.3, 0)),
    ]:
        got, ref = dm.named_channel(name, 0.7), dm.pauli(*p)
        assert np.abs(dm.choi(got).m - dm.choi(ref).m).max() < 1e-15
    with pytest.raises(ValueError):
        dm.named_channel("nope")
    with pytest.raises(ValueError):
        dm.named_channel("bit_flip")


@pytest.mark.parametrize("bad", [-0.1, 1.5])
def test_named_channel_ranges(bad):
    with pytest.raises(dm.OutOfRange):
        dm.amplitude_damping(bad)
    with pytest.raises(dm.OutOfRange):
        dm.generalized_amplitude_damping(bad, 0.5)


@pytest.mark.parametrize("p, eta", [(0.0, 0.3), (0.3, 0.5), (1.0, 0.8), (0.7, 0.0)])
def test_gad_matches_kraus(p, eta):
    ks = dm.generalized_amplitude_damping_kraus(p, eta)
    assert np.abs(sum(k.conj().T @ k for k in ks) - np.eye(2)).max() < 1e-15
    params = dm.generalized_amplitude_damping(p, eta)
    rng = np.random.default_rng(10)
    for _ in range(10):
        x = random_matrix(rng)
        direct = sum(k @ x @ k.conj().T for k in ks)
        assert np.abs(direct - dm.apply(params, x)).max() < 1e-14
    assert dm.is_trace_preserving(params)
    assert dm.symmetry_type(params) in (Symmetry.PHASE_COVARIANT, Symmetry.BOTH)


def test_construction_rejects_complex_a():
    with pytest.raises(ValueError):
        MapParams(1j, 0, 0, 1)
    assert not MapParams(-0.1, 1.1, 0.5, 0.5).is_valid


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=8, max_size=8),
)
def test_json_round_trip(v):
    p = MapParams(v[0], v[1], v[2], v[3], complex(v[4], v[5]), complex(v[6], v[7]))
    text = json.dumps(p.to_json())
    assert MapParams.from_json(json.loads(text)) == p
    c = dm.choi(p)
    assert np.array_equal(ChoiMatrix.from_json(json.loads(json.dumps(c.to_json()))).m, c.m)


def test_json_shape():
    d = MapParams(0.1, 0.2, 0.3, 0.4, 0.5 - 0.5j, 1.0).to_json()
    assert d == {"a": [[0.1, 0.2], [0.3, 0.4]], "lambda": [0.5, -0.5], "mu": [1.0, 0.0]}
    c = dm.choi(dm.identity()).to_json()
    assert len(c) == 4 and all(len(row) == 4 for row in c) and c[0][3] == [1.0, 0.0]


def test_call_is_apply():
    p = dm.choi_map()
    x = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.array_equal(p(x), dm.apply(p, x))
    assert math.isclose(p.replace(a11=0.5).a11, 0.5)
