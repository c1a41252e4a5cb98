import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmap.docmap import choi, choi_map, identity, reduction, transposition
from qmap.linalg import (
    NoConvergence,
    NotDiagonal,
    NotHermitian,
    eig_hermitian2,
    eig_hermitian4,
    eigh_hermitian4,
    is_psd,
    kron,
    kron_vectors,
    partial_transpose,
    pinv_diag2,
)


def random_hermitian(rng, n, size=None):
    shape = (n, n) if size is None else (size, n, n)
    z = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return 0.5 * (z + np.conj(np.swapaxes(z, -1, -2)))


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.eye(2), (1.0, 1.0)),
        (np.diag([0.25, 0.25]), (0.25, 0.25)),
        (np.array([[0, 1], [1, 0]]), (-1.0, 1.0)),
        (np.array([[2, 1j], [-1j, 2]]), (1.0, 3.0)),
    ],
)
def test_eig2_examples(m, expected):
    assert np.abs(np.array(eig_hermitian2(m)) - expected).max() < 1e-14


def test_eig2_trace_det():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        m = random_hermitian(rng, 2)
        lo, hi = eig_hermitian2(m)
        assert lo <= hi
        scale = max(1.0, np.abs(m).max())
        assert abs(lo + hi - np.trace(m).real) < 1e-12 * scale
        assert abs(lo * hi - np.linalg.det(m).real) < 1e-12 * scale**2


def test_eig2_not_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian2(np.array([[1, 1], [0, 1]]))


def test_eig4_choi_examples():
    w = eig_hermitian4(choi(transposition()).m)
    assert np.abs(w - [-1, 1, 1, 1]).max() < 1e-13
    w = eig_hermitian4(choi(choi_map()).m)
    assert np.abs(w - [-0.25, 0.75, 0.75, 0.75]).max() < 1e-13
    assert np.abs(eig_hermitian4(np.eye(4)) - 1).max() == 0


def test_eig4_random_against_numpy():
    rng = np.random.default_rng(7)
    m = random_hermitian(rng, 4, 10_000)
    w, v = eigh_hermitian4(m)
    ref = np.linalg.eigvalsh(m)
    norm = np.linalg.norm(m, axis=(1, 2))
    assert np.all(np.abs(w - ref).max(axis=1) <= 1e-10 * norm)
    # sum = trace, product = determinant
    assert np.all(np.abs(w.sum(axis=1) - np.trace(m, axis1=1, axis2=2).real) <= 1e-10 * norm)
    det = np.linalg.det(m).real
    assert np.all(np.abs(w.prod(axis=1) - det) <= 1e-10 * np.maximum(norm**4, 1.0))
    resid = np.linalg.norm(m @ v - v * w[:, None, :], axis=1).max(axis=1)
    assert np.all(resid <= 1e-10 * norm)


def test_eig4_single_residual():
    rng = np.random.default_rng(3)
    m = random_hermitian(rng, 4)
    w, v = eigh_hermitian4(m)
    for k in range(4):
        assert np.linalg.norm(m @ v[:, k] - w[k] * v[:, k]) <= 1e-10 * np.linalg.norm(m)
    assert np.abs(v.conj().T @ v - np.eye(4)).max() < 1e-12


def test_eig4_degenerate_and_diagonal():
    m = np.diag([3.0, -1.0, 3.0, 0.0]).astype(complex)
    assert np.abs(eig_hermitian4(m) - [-1, 0, 3, 3]).max() == 0
    assert np.abs(eig_hermitian4(np.zeros((4, 4)))).max() == 0


def test_eig4_no_convergence():
    rng = np.random.default_rng(0)
    with pytest.raises(NoConvergence):
        eig_hermitian4(random_hermitian(rng, 4), max_sweeps=1)


def test_eig4_not_hermitian():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(NotHermitian):
        eig_hermitian4(m)


def test_is_psd_examples():
    assert is_psd(choi(identity()).m)
    assert not is_psd(choi(reduction()).m)
    assert is_psd(np.zeros((4, 4)))
    assert is_psd(np.zeros((2, 2)))


def _all_principal_minors_ok(m, tol):
    n = m.shape[0]
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            if np.linalg.det(m[np.ix_(idx, idx)]).real < -tol:
                return False
    return True


def test_is_psd_matches_minors():
    rng = np.random.default_rng(11)
    agree = 0
    for _ in range(500):
        # mix of PSD and indefinite samples
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = g @ g.conj().T - rng.uniform(0, 3) * np.eye(4)
        leading = all(np.linalg.det(m[:k, :k]).real >= -1e-10 for k in range(1, 5))
        assert is_psd(m) == _all_principal_minors_ok(m, 1e-10)
        agree += is_psd(m) == leading
    # leading minors only fail on non-generic samples
    assert agree == 500


def test_is_psd_stack():
    rng = np.random.default_rng(2)
    m = random_hermitian(rng, 4, 50)
    assert np.array_equal(is_psd(m), np.linalg.eigvalsh(m)[:, 0] >= -1e-10)


def test_kron():
    x = np.array([1, 2j])
    y = np.array([3, 4])
    assert np.array_equal(kron(x, y), [3, 4, 6j, 8j])
    xs = np.stack([x, 2 * x])
    assert np.array_equal(kron_vectors(xs, y)[1], 2 * kron(x, y))


def test_partial_transpose_rule():
    m = np.arange(16).reshape(4, 4).astype(complex)
    pt = partial_transpose(m)
    for i, k, j, l in itertools.product(range(2), repeat=4):
        assert pt[2 * i + l, 2 * j + k] == m[2 * i + k, 2 * j + l]
    assert np.array_equal(partial_transpose(np.eye(4)), np.eye(4))


def test_partial_transpose_moves_centre_to_corners():
    kappa, bb, aa = 0.2, 0.3, 0.4
    b = np.zeros((4, 4))
    b[1, 1], b[2, 2], b[1, 2], b[2, 1] = bb, aa, kappa, kappa
    pt = partial_transpose(b)
    assert pt[0, 3] == kappa and pt[3, 0] == kappa
    assert pt[1, 2] == 0 and pt[2, 1] == 0
    assert pt[1, 1] == bb and pt[2, 2] == aa


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partial_transpose_involution(seed):
    m = random_hermitian(np.random.default_rng(seed), 4)
    pt = partial_transpose(m)
    assert np.array_equal(partial_transpose(pt), m)
    assert abs(np.trace(pt) - np.trace(m)) < 1e-14
    assert np.abs(pt - pt.conj().T).max() == 0


@pytest.mark.parametrize(
    "d, expected",
    [((2.0, 0.5), (0.5, 2.0)), ((1.0, 0.0), (1.0, 0.0)), ((1e-13, 4.0), (0.0, 0.25))],
)
def test_pinv_diag2(d, expected):
    assert np.abs(np.diag(pinv_diag2(np.diag(d))) - expected).max() < 1e-15


@pytest.mark.parametrize("m", [np.array([[1, 1e-3], [0, 1]]), np.diag([1.0, -1.0]), np.diag([1j, 1.0])])
def test_pinv_diag2_rejects(m):
    with pytest.raises(NotDiagonal):
        pinv_diag2(m)
