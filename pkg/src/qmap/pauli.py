"""Pauli maps X -> sum_k p_k sigma_k X sigma_k.

Two coordinate systems are used: the coefficients ``p = (p0, p1, p2, p3)``
and the eigenvalues ``(l1, l2, l3)`` of the map on the Pauli basis
(``l0 = 1`` for trace-preserving maps). They are related by the 4x4 Hadamard
matrix, ``l = H p`` and ``p = H l / 4``.

In eigenvalue coordinates

* positivity is the cube ``|l_k| <= 1``;
* complete positivity is the tetrahedron ``|l1 +- l2| <= 1 +- l3``
  (equivalently all ``p_k >= 0``);
* the Schwarz property is the set of ``l`` in the cube with
  ``l1^2 + l2^2 + l3^2 - 2 l1 l2 l3 <= 1``, i.e.
  ``(1 - l3)(l1 + l2)^2 + (1 + l3)(l1 - l2)^2 <= 2 (1 - l3^2)``.
  Its boundary is ``l3 = l1 l2 +- sqrt((1 - l1^2)(1 - l2^2))``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from qmap.classify import EPS, Classification, Margins
from qmap.docmap import MapParams, pauli_map_params

HADAMARD = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ],
    dtype=float,
)

TETRAHEDRON_VERTICES = ((1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0))

# Samples per RNG block; each block has its own Philox counter so volume
# estimates do not depend on how blocks are spread over workers.
VOLUME_BLOCK = 1 << 18


class NotTracePreserving(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class PauliParams:
    p: tuple[float, float, float, float]

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 4:
            raise ValueError("a Pauli map has four coefficients")
        object.__setattr__(self, "p", p)

    @property
    def is_trace_preserving(self) -> bool:
        return abs(sum(self.p) - 1.0) <= 1e-12


@dataclass(frozen=True)
class PauliEigenvalues:
    lam: tuple[float, float, float]

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        if len(lam) != 3:
            raise ValueError("expected three eigenvalues")
        object.__setattr__(self, "lam", lam)


def to_eigenvalues(p: PauliParams) -> PauliEigenvalues:
    if not p.is_trace_preserving:
        raise NotTracePreserving(f"coefficients sum to {sum(p.p)}, expected 1")
    lam = HADAMARD @ np.array(p.p)
    return PauliEigenvalues(tuple(lam[1:]))


def from_eigenvalues(lam: PauliEigenvalues) -> PauliParams:
    full = np.array([1.0, *lam.lam])
    return PauliParams(tuple(HADAMARD @ full / 4.0))


def to_map_params(p: PauliParams) -> MapParams:
    return pauli_map_params(*p.p)


# -- criteria, written for arrays ---------------------------------------------------


def positivity_margin(l1, l2, l3):
    return 1.0 - np.maximum(np.maximum(np.abs(l1), np.abs(l2)), np.abs(l3))


def fa_margin(l1, l2, l3):
    """min(1 + l3 - |l1 + l2|, 1 - l3 - |l1 - l2|); >= 0 iff all p_k >= 0."""
    return np.minimum(1.0 + l3 - np.abs(l1 + l2), 1.0 - l3 - np.abs(l1 - l2))


def fas_value(l1, l2, l3):
    """l1^2 + l2^2 + l3^2 - 2 l1 l2 l3 (Schwarz needs <= 1 inside the cube)."""
    return l1 * l1 + l2 * l2 + l3 * l3 - 2.0 * l1 * l2 * l3


def fas_two_term(l1, l2, l3):
    """(1 - l3)(l1 + l2)^2 + (1 + l3)(l1 - l2)^2, to be compared with 2 (1 - l3^2)."""
    return (1.0 - l3) * (l1 + l2) ** 2 + (1.0 + l3) * (l1 - l2) ** 2


def fas_margin(l1, l2, l3):
    return np.minimum(1.0 - fas_value(l1, l2, l3), positivity_margin(l1, l2, l3))


def classify_pauli(lam: PauliEigenvalues) -> Classification:
    l1, l2, l3 = lam.lam
    pm = float(positivity_margin(l1, l2, l3))
    sm = float(fas_margin(l1, l2, l3))
    cm = float(fa_margin(l1, l2, l3))
    return Classification(pm >= -EPS, sm >= -EPS, cm >= -EPS, Margins(pm, sm, cm), True)


def phi_alpha(alpha: float) -> PauliParams:
    """(sigma1 X sigma1 + sigma2 X sigma2 + sigma3 X sigma3 - alpha X) / (3 - alpha)."""
    if alpha == 3.0:
        raise DegenerateDenominator("alpha = 3")
    d = 3.0 - alpha
    return PauliParams((-alpha / d, 1.0 / d, 1.0 / d, 1.0 / d))


def schwarz_boundary_lambda3(l1: float, l2: float) -> tuple[float, float]:
    """The two l3 values on the Schwarz boundary above (l1, l2): (plus, minus)."""
    if abs(l1) > 1.0 or abs(l2) > 1.0:
        raise OutOfRange(f"(l1, l2) = ({l1}, {l2}) outside [-1, 1]^2")
    root = math.sqrt(max(0.0, (1.0 - l1 * l1) * (1.0 - l2 * l2)))
    base = l1 * l2
    return base + root, base - root


def ellipse_p0p1(p: PauliParams, a: float) -> float:
    """Left-hand side of the Schwarz ellipse in the (p0, p1) plane at fixed a = p0 + p3."""
    if not 0.0 < a < 1.0:
        raise OutOfRange(f"a={a} must lie in (0, 1)")
    p0, p1, p2, p3 = p.p
    if abs(p0 + p3 - a) > 1e-12 or abs(p1 + p2 - (1.0 - a)) > 1e-12:
        raise OutOfRange("p does not lie in the slice p0 + p3 = a, p1 + p2 = 1 - a")
    return (p0 - a / 2.0) ** 2 / (a / 4.0) + (p1 - (1.0 - a) / 2.0) ** 2 / ((1.0 - a) / 4.0)


def pppp_value(p: PauliParams) -> float:
    """(p0 - p3)^2 / (p0 + p3) + (p1 - p2)^2 / (p1 + p2)."""
    p0, p1, p2, p3 = p.p
    return (p0 - p3) ** 2 / (p0 + p3) + (p1 - p2) ** 2 / (p1 + p2)


def surface_mesh(n: int) -> np.ndarray:
    """Rows (l1, l2, l3_plus, l3_minus) on an n x n grid over [-1, 1]^2."""
    if n < 2:
        raise ValueError("grid needs at least 2 points per axis")
    g = np.linspace(-1.0, 1.0, n)
    l1, l2 = np.meshgrid(g, g, indexing="ij")
    l1 = l1.ravel()
    l2 = l2.ravel()
    root = np.sqrt(np.maximum(0.0, (1.0 - l1**2) * (1.0 - l2**2)))
    base = l1 * l2
    return np.column_stack([l1, l2, base + root, base - root])


# -- Monte Carlo volumes ----------------------------------------------------------------


@dataclass(frozen=True)
class VolumeReport:
    n: int
    seed: int
    v_pos: float
    v_schwarz: float
    v_cp: float
    stderr: dict

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "v_pos": self.v_pos,
            "v_schwarz": self.v_schwarz,
            "v_cp": self.v_cp,
            "stderr": dict(self.stderr),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _block_counts(seed: int, block: int, n: int) -> tuple[int, int, int]:
    start = block * VOLUME_BLOCK
    size = min(VOLUME_BLOCK, n - start)
    # Counter-based stream: key = seed, counter starts at (0, 0, 0, block).
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, block])
    u = np.random.Generator(bitgen).random((size, 3))
    lam = 2.0 * u - 1.0
    l1, l2, l3 = lam[:, 0], lam[:, 1], lam[:, 2]
    pos = int(np.count_nonzero(positivity_margin(l1, l2, l3) >= -EPS))
    sch = int(np.count_nonzero(fas_margin(l1, l2, l3) >= -EPS))
    cp = int(np.count_nonzero(fa_margin(l1, l2, l3) >= -EPS))
    return pos, sch, cp


def estimate_volumes(n_samples: int, seed: int, workers: int = 1) -> VolumeReport:
    """Monte Carlo volumes of the positive, Schwarz and CP regions in the cube [-1, 1]^3.

    Sample i is drawn from Philox block ``i // VOLUME_BLOCK``, so the result
    is bit-identical for any ``workers``.
    """
    if n_samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    n_blocks = -(-n_samples // VOLUME_BLOCK)
    blocks = range(n_blocks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda b: _block_counts(seed, b, n_samples), blocks))
    else:
        counts = [_block_counts(seed, b, n_samples) for b in blocks]
    pos, sch, cp = (sum(c[i] for c in counts) for i in range(3))
    cube = 8.0

    def stderr(k):
        f = k / n_samples
        return cube * math.sqrt(f * (1.0 - f) / n_samples)

    return VolumeReport(
        n=n_samples,
        seed=seed,
        v_pos=cube * pos / n_samples,
        v_schwarz=cube * sch / n_samples,
        v_cp=cube * cp / n_samples,
        stderr={"v_pos": stderr(pos), "v_schwarz": stderr(sch), "v_cp": stderr(cp)},
    )
