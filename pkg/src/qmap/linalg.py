"""Fixed-size complex linear algebra for 2x2 and 4x4 matrices.

Everything here works on plain numpy arrays. The 4x4 eigensolver is a cyclic
Jacobi iteration that also accepts a stack of matrices with shape ``(n, 4, 4)``
so the verification sweeps can diagonalise many Choi matrices at once.
"""
from __future__ import annotations

import numpy as np

HERM_TOL = 1e-10
PINV_TOL = 1e-12

# Row/column index pairs visited by one cyclic Jacobi sweep.
_PAIRS_4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


class NotHermitian(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


class NotDiagonal(ValueError):
    pass


def _check_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> None:
    dev = np.abs(m - np.conj(np.swapaxes(m, -1, -2))).max(initial=0.0)
    if dev > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")


def eig_hermitian2(m) -> tuple[float, float]:
    """Eigenvalues of a Hermitian 2x2 matrix in ascending order (closed form)."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    _check_hermitian(m)
    lo, hi = eigvalsh2_batch(m)
    return float(lo), float(hi)


def eigvalsh2_batch(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalue pair for a stack of Hermitian 2x2 matrices.

    Only the upper triangle and the real part of the diagonal are read, so no
    Hermiticity check is done here; callers that need one use
    :func:`eig_hermitian2`.
    """
    p = m[..., 0, 0].real
    q = m[..., 1, 1].real
    h = m[..., 0, 1]
    mean = 0.5 * (p + q)
    rad = np.hypot(0.5 * (p - q), np.abs(h))
    return mean - rad, mean + rad


def _jacobi_sweeps(a: np.ndarray, want_vectors: bool, max_sweeps: int):
    n = a.shape[-1]
    batch = a.shape[0]
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if want_vectors else None
    scale = np.sqrt((np.abs(a) ** 2).sum(axis=(-1, -2)))
    off_mask = ~np.eye(n, dtype=bool)
    rows = np.arange(batch)

    for _ in range(max_sweeps):
        off = np.sqrt((np.abs(a[:, off_mask]) ** 2).sum(axis=-1))
        if np.all(off <= 1e-14 * scale):
            return a, v
        for p, q in _PAIRS_4 if n == 4 else [(0, 1)]:
            h = a[:, p, q]
            mag = np.abs(h)
            active = mag > 1e-300
            if not np.any(active):
                continue
            safe = np.where(active, mag, 1.0)
            phase = np.where(active, h / safe, 1.0)
            app = a[:, p, p].real
            aqq = a[:, q, q].real
            theta = (aqq - app) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # G = diag-phase * real rotation; A <- G^H A G zeroes A[p, q].
            gpp = c
            gpq = s
            gqp = -s * np.conj(phase)
            gqq = c * np.conj(phase)

            col_p = a[:, :, p].copy()
            col_q = a[:, :, q].copy()
            a[:, :, p] = col_p * gpp[:, None] + col_q * gqp[:, None]
            a[:, :, q] = col_p * gpq[:, None] + col_q * gqq[:, None]
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :].copy()
            a[:, p, :] = row_p * np.conj(gpp)[:, None] + row_q * np.conj(gqp)[:, None]
            a[:, q, :] = row_p * np.conj(gpq)[:, None] + row_q * np.conj(gqq)[:, None]
            a[rows, p, q] = 0.0
            a[rows, q, p] = 0.0
            a[rows, p, p] = a[rows, p, p].real
            a[rows, q, q] = a[rows, q, q].real

            if want_vectors:
                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = vp * gpp[:, None] + vq * gqp[:, None]
                v[:, :, q] = vp * gpq[:, None] + vq * gqq[:, None]

    off = np.sqrt((np.abs(a[:, off_mask]) ** 2).sum(axis=-1))
    if np.all(off <= 1e-14 * scale):
        return a, v
    raise NoConvergence(
        f"Jacobi did not converge in {max_sweeps} sweeps "
        f"(worst off-diagonal ratio {np.max(off / np.where(scale > 0, scale, 1.0)):.3e})"
    )


def eigh_hermitian4(m, max_sweeps: int = 100):
    """Eigenvalues (ascending) and eigenvectors (columns) of Hermitian 4x4 input.

    Accepts a single ``(4, 4)`` matrix or a stack ``(n, 4, 4)``.
    """
    m = np.array(m, dtype=complex)
    single = m.ndim == 2
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 matrices, got shape {m.shape}")
    _check_hermitian(m)
    a = m[None].copy() if single else m.copy()
    # Symmetrise away the sub-tolerance anti-Hermitian part.
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    a, v = _jacobi_sweeps(a, True, max_sweeps)
    w = np.diagonal(a, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    if single:
        return w[0], v[0]
    return w, v


def eig_hermitian4(m, max_sweeps: int = 100) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian 4x4 matrix (or a stack of them)."""
    m = np.array(m, dtype=complex)
    single = m.ndim == 2
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 matrices, got shape {m.shape}")
    _check_hermitian(m)
    a = m[None].copy() if single else m.copy()
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    a, _ = _jacobi_sweeps(a, False, max_sweeps)
    w = np.sort(np.diagonal(a, axis1=-2, axis2=-1).real, axis=-1)
    return w[0] if single else w


def min_eigenvalue(m) -> float:
    m = np.asarray(m, dtype=complex)
    if m.shape == (2, 2):
        return eig_hermitian2(m)[0]
    if m.shape == (4, 4):
        return float(eig_hermitian4(m)[0])
    raise ValueError(f"unsupported shape {m.shape}")


def is_psd(m, tol: float = 1e-10):
    """True iff the smallest eigenvalue is >= -tol.

    A stack of 4x4 matrices gives a boolean array.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim == 3:
        return eig_hermitian4(m)[:, 0] >= -tol
    return min_eigenvalue(m) >= -tol


def kron(x, y) -> np.ndarray:
    return np.kron(np.asarray(x), np.asarray(y))


def kron_vectors(x, y) -> np.ndarray:
    """Product vectors x (x) y for stacks of vectors (batch axes leading)."""
    x = np.asarray(x)
    y = np.asarray(y)
    out = x[..., :, None] * y[..., None, :]
    return out.reshape(*out.shape[:-2], x.shape[-1] * y.shape[-1])


def partial_transpose(m) -> np.ndarray:
    """Transpose the second tensor factor of a 4x4 (2 (x) 2) matrix.

    Entry ((i,k),(j,l)) moves to ((i,l),(j,k)). Works on stacks too.
    """
    m = np.asarray(m)
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 matrices, got shape {m.shape}")
    t = m.reshape(*m.shape[:-2], 2, 2, 2, 2)
    t = np.swapaxes(t, -3, -1)
    return t.reshape(m.shape).copy()


def pinv_diag2(m, tol: float = PINV_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a non-negative diagonal 2x2 matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if abs(m[0, 1]) > tol or abs(m[1, 0]) > tol:
        raise NotDiagonal("off-diagonal entries are non-zero")
    d = m.diagonal()
    if np.any(np.abs(d.imag) > tol) or np.any(d.real < -tol):
        raise NotDiagonal("diagonal must be real and non-negative")
    d = d.real
    inv = np.where(d > tol, 1.0 / np.where(d > tol, d, 1.0), 0.0)
    return np.diag(inv).astype(complex)
