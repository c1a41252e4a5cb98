"""Brute-force checks that do not use any of the closed-form criteria.

* Schwarz: minimise the smallest eigenvalue of
  ``M = Phi(X^H X) - Phi(X^H) Phi(X)`` over traceless X on the unit sphere.
  Non-unital maps are first rescaled to ``D Phi(.) D`` with
  ``D = sqrt(Phi(1)^+)``, which is unital and Schwarz exactly when the
  original map is generalized Schwarz.
* Positivity: minimise ``<x (x) y| C |x (x) y>`` over unit product vectors.
* Complete positivity: smallest eigenvalue of the Choi matrix.
* Decomposability: explicit ``C = A + B^Gamma`` with ``A, B >= 0``.

Searches are a deterministic grid followed by a batch of Nelder-Mead
simplices run in lock-step with numpy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qmap import classify as cl
from qmap import pauli as pl
from qmap.docmap import MapParams, apply, choi, is_unital
from qmap.linalg import eig_hermitian2, eigvalsh2_batch, is_psd, kron_vectors, partial_transpose, pinv_diag2

TOL_VIOLATION = 1e-8
BOUNDARY_BAND = 0.01
GRID_PER_ANGLE = 32
RESTARTS = 20


class BudgetExhausted(RuntimeError):
    def __init__(self, best: float, evaluations: int):
        super().__init__(f"budget exhausted after {evaluations} evaluations (best {best:.3e})")
        self.best = best
        self.evaluations = evaluations


class NotPositive(ValueError):
    pass


class Degenerate(ValueError):
    pass


@dataclass(frozen=True)
class TracelessX:
    f: float
    z1: complex
    z2: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.f, self.z1], [self.z2, -self.f]], dtype=complex)

    @classmethod
    def from_vector(cls, v) -> "TracelessX":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), complex(v[1], v[2]), complex(v[3], v[4]))


@dataclass(frozen=True)
class SchwarzDefect:
    x: TracelessX
    m: np.ndarray
    min_eig: float


def _rescaled(p: MapParams):
    """Unital stand-in for p: p itself, or X -> D p(X) D with D = sqrt(p(1)^+)."""
    if is_unital(p):
        return lambda x: apply(p, x)
    d = np.sqrt(pinv_diag2(apply(p, np.eye(2))).real).astype(complex)
    return lambda x: d @ apply(p, x) @ d


def _defect(phi, x: np.ndarray) -> np.ndarray:
    xh = np.conj(np.swapaxes(x, -1, -2))
    return phi(xh @ x) - phi(xh) @ phi(x)


def schwarz_defect(p: MapParams, x: TracelessX, debug: bool = False) -> SchwarzDefect:
    phi = _rescaled(p)
    xm = x.matrix
    m = _defect(phi, xm)
    if debug:
        shifted = _defect(phi, xm + (0.7 - 0.3j) * np.eye(2))
        if np.abs(shifted - m).max() > 1e-10 * max(1.0, np.abs(m).max()):
            raise AssertionError("defect changed under X -> X + c 1")
    return SchwarzDefect(x, m, eig_hermitian2(0.5 * (m + m.conj().T))[0])


def _vectors_to_x(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    x = np.empty(v.shape[:-1] + (2, 2), dtype=complex)
    x[..., 0, 0] = v[..., 0]
    x[..., 1, 1] = -v[..., 0]
    x[..., 0, 1] = v[..., 1] + 1j * v[..., 2]
    x[..., 1, 0] = v[..., 3] + 1j * v[..., 4]
    return x


def _schwarz_objective(p: MapParams):
    phi = _rescaled(p)

    def fun(v):
        return eigvalsh2_batch(_defect(phi, _vectors_to_x(v)))[0]

    return fun


def f0_grid(n_ratio: int = GRID_PER_ANGLE, n_phase: int = GRID_PER_ANGLE) -> np.ndarray:
    """Unit vectors for X = [[0, cos t], [sin t e^{i phi}, 0]] (z1 real, non-negative)."""
    t = np.linspace(0.0, 0.5 * np.pi, n_ratio)
    ph = np.linspace(0.0, 2.0 * np.pi, n_phase, endpoint=False)
    tt, pp = np.meshgrid(t, ph, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    zeros = np.zeros_like(tt)
    return np.column_stack([zeros, np.cos(tt), zeros, np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp)])


def f0_scan_min(p: MapParams, n: int = 256) -> float:
    """Smallest defect eigenvalue over a dense f = 0 grid."""
    return float(_schwarz_objective(p)(f0_grid(n, n)).min())


def f0_minimize(p: MapParams, seed: int = 0, max_evals: int = 20_000) -> tuple[float, TracelessX]:
    """Grid scan of the f = 0 family refined by simplex search in (t, phi)."""
    fun5 = _schwarz_objective(p)

    def fun(tp):
        t, ph = tp[:, 0], tp[:, 1]
        zeros = np.zeros_like(t)
        return fun5(np.column_stack([zeros, np.cos(t), zeros, np.sin(t) * np.cos(ph), np.sin(t) * np.sin(ph)]))

    t = np.linspace(0.0, 0.5 * np.pi, 64)
    ph = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    grid = np.array(np.meshgrid(t, ph, indexing="ij")).reshape(2, -1).T
    vals = fun(grid)
    x, fx, _ = nelder_mead_batch(fun, _pick_starts(grid, vals, RESTARTS), 0.02, max_evals)
    x = x if fx <= vals.min() else grid[int(np.argmin(vals))]
    w = TracelessX(0.0, complex(np.cos(x[0])), complex(np.sin(x[0]) * np.exp(1j * x[1])))
    return min(fx, float(vals.min())), w


def nelder_mead_batch(fun, x0: np.ndarray, step: float, max_evals: int, xtol: float = 1e-13):
    """Run one Nelder-Mead simplex per row of ``x0`` in lock-step.

    ``fun`` maps an (m, d) array to m values. Each iteration evaluates the
    reflection, expansion and both contractions for every simplex, plus the
    shrink points where needed. Returns (best_x, best_f, evaluations).
    """
    k, d = x0.shape
    simplex = np.repeat(x0[:, None, :], d + 1, axis=1)
    simplex[:, 1:, :] += step * np.eye(d)[None]
    fs = fun(simplex.reshape(-1, d)).reshape(k, d + 1)
    evals = k * (d + 1)
    idx = np.arange(k)
    while evals + 4 * k <= max_evals:
        order = np.argsort(fs, axis=1)
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        fs = np.take_along_axis(fs, order, axis=1)
        spread = np.abs(simplex[:, 1:, :] - simplex[:, :1, :]).max(axis=(1, 2))
        if np.all(spread < xtol):
            break
        best, worst = simplex[:, 0], simplex[:, -1]
        f_best, f_second, f_worst = fs[:, 0], fs[:, -2], fs[:, -1]
        c = simplex[:, :-1].mean(axis=1)
        xr = c + (c - worst)
        xe = c + 2.0 * (c - worst)
        xoc = c + 0.5 * (c - worst)
        xic = c - 0.5 * (c - worst)
        cand = fun(np.concatenate([xr, xe, xoc, xic]))
        evals += 4 * k
        fr, fe, foc, fic = cand[:k], cand[k : 2 * k], cand[2 * k : 3 * k], cand[3 * k :]

        new_x = worst.copy()
        new_f = f_worst.copy()
        shrink = np.zeros(k, dtype=bool)

        accept_r = (fr >= f_best) & (fr < f_second)
        expand = fr < f_best
        outside = (fr >= f_second) & (fr < f_worst)
        inside = fr >= f_worst

        new_x[accept_r], new_f[accept_r] = xr[accept_r], fr[accept_r]
        use_e = expand & (fe < fr)
        use_r = expand & ~use_e
        new_x[use_e], new_f[use_e] = xe[use_e], fe[use_e]
        new_x[use_r], new_f[use_r] = xr[use_r], fr[use_r]
        ok_oc = outside & (foc <= fr)
        new_x[ok_oc], new_f[ok_oc] = xoc[ok_oc], foc[ok_oc]
        ok_ic = inside & (fic < f_worst)
        new_x[ok_ic], new_f[ok_ic] = xic[ok_ic], fic[ok_ic]
        shrink = (outside & ~ok_oc) | (inside & ~ok_ic)

        simplex[idx, -1] = new_x
        fs[idx, -1] = new_f
        if np.any(shrink):
            s = np.nonzero(shrink)[0]
            pts = simplex[s, :1, :] + 0.5 * (simplex[s, 1:, :] - simplex[s, :1, :])
            simplex[s, 1:, :] = pts
            fs[s, 1:] = fun(pts.reshape(-1, d)).reshape(len(s), d)
            evals += len(s) * d
    j = np.unravel_index(np.argmin(fs), fs.shape)
    return simplex[j], float(fs[j]), evals


def _pick_starts(points: np.ndarray, values: np.ndarray, count: int) -> np.ndarray:
    order = np.argsort(values)
    return points[order[:count]]


@dataclass(frozen=True)
class SearchResult:
    best: np.ndarray
    min_value: float
    evaluations: int


def minimize_schwarz_defect(p: MapParams, budget: int = 10_000, seed: int = 0) -> SearchResult:
    """Smallest defect eigenvalue found over traceless unit-norm X."""
    fun = _schwarz_objective(p)
    grid = f0_grid()
    n_rand = min(1024, max(0, budget // 8))
    needed = len(grid) + 6 * RESTARTS + 4 * RESTARTS
    if budget < needed:
        vals = fun(grid[: max(1, budget)])
        raise BudgetExhausted(float(vals.min()), min(budget, len(grid)))
    rng = np.random.default_rng(seed)
    rand = rng.normal(size=(n_rand, 5))
    pts = np.concatenate([grid, rand])
    vals = fun(pts)
    evals = len(pts)
    starts = _pick_starts(pts, vals, RESTARTS)
    starts = starts / np.linalg.norm(starts, axis=1, keepdims=True)
    x, fx, used = nelder_mead_batch(fun, starts, 0.05, budget - evals)
    evals += used
    i = int(np.argmin(vals))
    if vals[i] < fx:
        x, fx = pts[i], float(vals[i])
    return SearchResult(x / np.linalg.norm(x), fx, evals)


def find_schwarz_violation(
    p: MapParams, budget: int = 10_000, seed: int = 0, tol: float = TOL_VIOLATION
) -> SchwarzDefect | None:
    """Witness X with a negative defect eigenvalue below -tol, or None."""
    res = minimize_schwarz_defect(p, budget, seed)
    if res.min_value < -tol:
        return schwarz_defect(p, TracelessX.from_vector(res.best))
    return None


@dataclass(frozen=True)
class BlockPositivity:
    positive: bool
    min_value: float
    witness: tuple[np.ndarray, np.ndarray]


def _product_vectors(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t1, p1, t2, p2 = angles.T
    x = np.stack([np.cos(t1), np.exp(1j * p1) * np.sin(t1)], axis=-1)
    y = np.stack([np.cos(t2), np.exp(1j * p2) * np.sin(t2)], axis=-1)
    return x, y


def block_positivity(c, budget: int = 20_000, seed: int = 0, tol: float = 1e-10) -> BlockPositivity:
    """Minimise <x (x) y|C|x (x) y> over unit x, y (global phases fixed)."""
    c = np.asarray(getattr(c, "m", c), dtype=complex)

    def fun(angles):
        x, y = _product_vectors(angles)
        v = kron_vectors(x, y)
        return np.einsum("ni,ij,nj->n", v.conj(), c, v).real

    per = 8
    t = np.linspace(0.0, 0.5 * np.pi, per)
    ph = np.linspace(0.0, 2.0 * np.pi, per, endpoint=False)
    grid = np.array(np.meshgrid(t, ph, t, ph, indexing="ij")).reshape(4, -1).T
    needed = len(grid) + 10 * RESTARTS
    if budget < needed:
        vals = fun(grid[: max(1, budget)])
        raise BudgetExhausted(float(vals.min()), min(budget, len(grid)))
    rng = np.random.default_rng(seed)
    n_rand = min(1024, budget // 16)
    rand = np.column_stack(
        [
            rng.uniform(0, 0.5 * np.pi, n_rand),
            rng.uniform(0, 2 * np.pi, n_rand),
            rng.uniform(0, 0.5 * np.pi, n_rand),
            rng.uniform(0, 2 * np.pi, n_rand),
        ]
    )
    pts = np.concatenate([grid, rand])
    vals = fun(pts)
    evals = len(pts)
    starts = _pick_starts(pts, vals, RESTARTS)
    a, fa, _ = nelder_mead_batch(fun, starts, 0.1, budget - evals)
    i = int(np.argmin(vals))
    if vals[i] < fa:
        a, fa = pts[i], float(vals[i])
    x, y = _product_vectors(a[None])
    return BlockPositivity(fa >= -tol, fa, (x[0], y[0]))


def choi_min_eigenvalue(p: MapParams) -> float:
    from qmap.linalg import eig_hermitian4

    return float(eig_hermitian4(choi(p).m)[0])


def woronowicz_decompose(p: MapParams) -> tuple[np.ndarray, np.ndarray]:
    """Split the Choi matrix as A + partial_transpose(B) with A, B >= 0.

    Works on the original complex parameters: the phases of lam and mu ride
    along in the off-diagonal entries, which does not affect positivity of
    the 2x2 blocks.
    """
    pos, margin = cl.is_positive(p)
    if not pos or not p.is_valid:
        raise NotPositive(f"map is not positive (margin {margin:.3e})")
    c = choi(p).m
    a, ap, bp, b = p.a11, p.a12, p.a21, p.a22
    lam_abs, mu_abs = abs(p.lam), abs(p.mu)
    lam_ph = p.lam / lam_abs if lam_abs > 0 else 1.0
    mu_ph = p.mu / mu_abs if mu_abs > 0 else 1.0
    r_corner = math.sqrt(a * b)
    r_center = math.sqrt(ap * bp)

    if lam_abs <= r_corner and mu_abs <= r_center:
        return c.copy(), np.zeros((4, 4), dtype=complex)

    A = np.zeros((4, 4), dtype=complex)
    B = np.zeros((4, 4), dtype=complex)
    if lam_abs > r_corner:
        # corner coherence exceeds the CP bound; excess kappa goes to B's centre
        kappa = lam_abs - r_corner
        if mu_abs > 0 and (bp == 0.0 or ap == 0.0):
            raise Degenerate("a' b' = 0 with mu != 0")
        x = mu_abs * math.sqrt(ap / bp) if mu_abs > 0 else 0.0
        y = mu_abs * math.sqrt(bp / ap) if mu_abs > 0 else 0.0
        A[0, 0], A[3, 3] = a, b
        A[0, 3] = r_corner * lam_ph
        A[3, 0] = np.conj(A[0, 3])
        A[1, 1], A[2, 2] = y, x
        A[1, 2], A[2, 1] = c[1, 2], c[2, 1]
        B[1, 1], B[2, 2] = bp - y, ap - x
        B[1, 2] = kappa * lam_ph
        B[2, 1] = np.conj(B[1, 2])
    else:
        # mirror case: centre coherence exceeds its bound, excess goes to B's corners
        kappa = mu_abs - r_center
        if lam_abs > 0 and (a == 0.0 or b == 0.0):
            raise Degenerate("a b = 0 with lambda != 0")
        x = lam_abs * math.sqrt(a / b) if lam_abs > 0 else 0.0
        y = lam_abs * math.sqrt(b / a) if lam_abs > 0 else 0.0
        A[1, 1], A[2, 2] = bp, ap
        A[2, 1] = r_center * mu_ph
        A[1, 2] = np.conj(A[2, 1])
        A[0, 0], A[3, 3] = x, y
        A[0, 3], A[3, 0] = c[0, 3], c[3, 0]
        B[0, 0], B[3, 3] = a - x, b - y
        B[3, 0] = kappa * mu_ph
        B[0, 3] = np.conj(B[3, 0])
    return A, B


def woronowicz_residual(p: MapParams, A: np.ndarray, B: np.ndarray) -> float:
    return float(np.abs(A + partial_transpose(B) - choi(p).m).max())


# -- agreement sweeps --------------------------------------------------------------------


@dataclass
class SweepReport:
    kind: str
    n: int
    seed: int
    excluded_near_boundary: int = 0
    counts: dict = field(default_factory=dict)
    disagreements: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "excluded_near_boundary": self.excluded_near_boundary,
            "counts": dict(self.counts),
            "disagreements": list(self.disagreements),
        }


def random_unital(rng: np.random.Generator, amp_max: float = 1.0) -> MapParams:
    a, b = rng.uniform(0.0, 1.0, 2)
    lam = rng.uniform(0.0, amp_max) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    mu = rng.uniform(0.0, amp_max) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    return MapParams.unital(a, b, lam, mu)


def random_general(rng: np.random.Generator, amp_max: float = 1.0) -> MapParams:
    a11, a12, a21, a22 = rng.uniform(0.0, 1.0, 4)
    lam = rng.uniform(0.0, amp_max) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    mu = rng.uniform(0.0, amp_max) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    return MapParams(a11, a12, a21, a22, lam, mu)


def _analytic_margins(p: MapParams) -> dict:
    return {
        "schwarz": cl.classify(p).margins.schwarz,
        "positive": cl.is_positive(p)[1],
        "cp": cl.is_completely_positive(p)[1],
    }


def agreement_sweep(
    n: int,
    seed: int,
    kind: str = "unital",
    budget: int = 10_000,
    checks: tuple[str, ...] = ("schwarz", "positive", "cp"),
    band: float = BOUNDARY_BAND,
) -> SweepReport:
    """Compare closed-form verdicts with the brute-force oracles on random maps.

    ``kind`` is ``"unital"``, ``"nonunital"`` or ``"pauli"``. Samples with any
    requested margin inside ``(-band, band)`` are skipped (and counted) until
    ``n`` maps have been checked.
    """
    if kind not in ("unital", "nonunital", "pauli"):
        raise ValueError(f"unknown sweep kind {kind!r}")
    rng = np.random.default_rng(seed)
    report = SweepReport(kind, n, seed)
    counts = {f"{c}_{v}": 0 for c in checks for v in ("true", "false")}
    checked = 0
    while checked < n:
        if kind == "pauli":
            lam = pl.PauliEigenvalues(tuple(rng.uniform(-1.0, 1.0, 3)))
            p = pl.to_map_params(pl.from_eigenvalues(lam))
            verdict = pl.classify_pauli(lam)
            margins = {
                "schwarz": verdict.margins.schwarz,
                "positive": verdict.margins.positive,
                "cp": verdict.margins.completely_positive,
            }
            analytic = {"schwarz": verdict.schwarz, "positive": verdict.positive, "cp": verdict.completely_positive}
        else:
            p = random_unital(rng) if kind == "unital" else random_general(rng)
            margins = _analytic_margins(p)
            analytic = {k: margins[k] >= -cl.EPS for k in margins}
        if any(abs(margins[c]) < band for c in checks):
            report.excluded_near_boundary += 1
            continue
        sub_seed = int(rng.integers(2**32))
        record = {}
        if "schwarz" in checks:
            res = minimize_schwarz_defect(p, budget, sub_seed)
            record["schwarz"] = (res.min_value >= -TOL_VIOLATION, res.min_value)
        if "positive" in checks:
            bp = block_positivity(choi(p), 2 * budget, sub_seed)
            record["positive"] = (bp.positive, bp.min_value)
        if "cp" in checks:
            ev = choi_min_eigenvalue(p)
            record["cp"] = (ev >= -1e-10, ev)
        for c, (verdict, value) in record.items():
            counts[f"{c}_{'true' if analytic[c] else 'false'}"] += 1
            if bool(verdict) != bool(analytic[c]):
                report.disagreements.append(
                    {
                        "check": c,
                        "params": p.to_json(),
                        "analytic": bool(analytic[c]),
                        "oracle": bool(verdict),
                        "oracle_value": value,
                        "margin": margins[c],
                    }
                )
        checked += 1
    report.counts = counts
    return report
