"""Qubit maps commuting with conjugation by sigma_z.

Every such map is fixed by a real 2x2 matrix ``a`` and two complex numbers
``lam`` and ``mu``::

    Phi(X) = [[a11 X11 + a12 X22,        lam X12 + mu X21      ],
              [conj(lam) X21 + conj(mu) X12,  a21 X11 + a22 X22]]

The ``mu`` terms act on the transpose of ``X``. With this placement the Choi
matrix has ``conj(mu)`` at position (1, 2) and ``mu`` at (2, 1), and
``choi(p)`` is literally ``sum_ij |i><j| (x) Phi(|i><j|)``.

Basis convention: ``|1> = (1, 0)``, ``|2> = (0, 1)``; in the Choi matrix the
row block index belongs to the input (first) tensor factor.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

ZERO_TOL = 1e-12
PATTERN_TOL = 1e-12

# Choi slots that may be non-zero (row, col), 0-based.
_CHOI_SLOTS = {(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)}

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


class PatternViolation(ValueError):
    def __init__(self, index, value):
        super().__init__(f"Choi entry {index} = {value!r} is outside the allowed pattern")
        self.index = index
        self.value = value


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class MapParams:
    a11: float
    a12: float
    a21: float
    a22: float
    lam: complex = 0.0
    mu: complex = 0.0

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            v = getattr(self, name)
            if isinstance(v, complex):
                if abs(v.imag) > ZERO_TOL:
                    raise ValueError(f"{name} must be real for a Hermiticity-preserving map")
                v = v.real
            object.__setattr__(self, name, float(v))
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "mu", complex(self.mu))

    @classmethod
    def unital(cls, a: float, b: float, lam: complex = 0.0, mu: complex = 0.0) -> "MapParams":
        """Unital map in the (a, b) shorthand: a-matrix [[a, 1-a], [1-b, b]]."""
        return cls(a, 1.0 - a, 1.0 - b, b, lam, mu)

    @property
    def a_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def is_valid(self) -> bool:
        """All a_ij non-negative (premise of the positivity criteria)."""
        return min(self.a11, self.a12, self.a21, self.a22) >= -ZERO_TOL

    def replace(self, **changes) -> "MapParams":
        fields = dict(a11=self.a11, a12=self.a12, a21=self.a21, a22=self.a22, lam=self.lam, mu=self.mu)
        fields.update(changes)
        return MapParams(**fields)

    def to_json(self) -> dict:
        return {
            "a": [[self.a11, self.a12], [self.a21, self.a22]],
            "lambda": [self.lam.real, self.lam.imag],
            "mu": [self.mu.real, self.mu.imag],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MapParams":
        (a11, a12), (a21, a22) = data["a"]
        lam = complex(*data["lambda"])
        mu = complex(*data["mu"])
        return cls(a11, a12, a21, a22, lam, mu)

    def __call__(self, x):
        return apply(self, x)


@dataclass(frozen=True)
class ChoiMatrix:
    m: np.ndarray

    def to_json(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(self.m)]

    @classmethod
    def from_json(cls, data) -> "ChoiMatrix":
        arr = np.array([[complex(re, im) for re, im in row] for row in data])
        return cls(arr)


def apply(p: MapParams, x) -> np.ndarray:
    """Apply the map to a 2x2 matrix (or a stack of them, shape (..., 2, 2))."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    x11 = x[..., 0, 0]
    x12 = x[..., 0, 1]
    x21 = x[..., 1, 0]
    x22 = x[..., 1, 1]
    out[..., 0, 0] = p.a11 * x11 + p.a12 * x22
    out[..., 1, 1] = p.a21 * x11 + p.a22 * x22
    out[..., 0, 1] = p.lam * x12 + p.mu * x21
    out[..., 1, 0] = np.conj(p.lam) * x21 + np.conj(p.mu) * x12
    return out


def choi(p: MapParams) -> ChoiMatrix:
    c = np.zeros((4, 4), dtype=complex)
    c[0, 0] = p.a11
    c[1, 1] = p.a21
    c[2, 2] = p.a12
    c[3, 3] = p.a22
    c[0, 3] = p.lam
    c[3, 0] = np.conj(p.lam)
    c[1, 2] = np.conj(p.mu)
    c[2, 1] = p.mu
    return ChoiMatrix(c)


def choi_from_definition(p: MapParams) -> np.ndarray:
    """sum_ij |i><j| (x) Phi(|i><j|), built by actually applying the map."""
    c = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            c += np.kron(e, apply(p, e))
    return c


def from_choi(c) -> MapParams:
    m = np.asarray(c.m if isinstance(c, ChoiMatrix) else c, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    for i in range(4):
        for j in range(4):
            if (i, j) not in _CHOI_SLOTS and abs(m[i, j]) > PATTERN_TOL:
                raise PatternViolation((i, j), m[i, j])
    for i in range(4):
        if abs(m[i, i].imag) > PATTERN_TOL:
            raise PatternViolation((i, i), m[i, i])
    if abs(m[3, 0] - np.conj(m[0, 3])) > PATTERN_TOL:
        raise PatternViolation((3, 0), m[3, 0])
    if abs(m[2, 1] - np.conj(m[1, 2])) > PATTERN_TOL:
        raise PatternViolation((2, 1), m[2, 1])
    return MapParams(m[0, 0].real, m[2, 2].real, m[1, 1].real, m[3, 3].real, m[0, 3], m[2, 1])


def dual(p: MapParams) -> MapParams:
    """Trace-dual map: a_ij -> a_ji, lam -> conj(lam), mu unchanged."""
    return MapParams(p.a11, p.a21, p.a12, p.a22, np.conj(p.lam), p.mu)


class Symmetry(enum.Enum):
    PHASE_COVARIANT = "PhaseCovariant"
    CONJUGATE_PHASE_COVARIANT = "ConjugatePhaseCovariant"
    BOTH = "Both"
    ORTHOGONAL_ONLY = "OrthogonalOnly"


def phase_unitary(phi: float) -> np.ndarray:
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def covariance_residual(p: MapParams, x, phi: float, kind: str) -> float:
    """Max-entry residual of a covariance relation for one operator and phase.

    ``kind`` is ``"phase"`` (U Phi(X) U^H = Phi(U X U^H)),
    ``"conjugate"`` (U^H Phi(X) U = Phi(U X U^H)) or ``"orthogonal"``
    (sigma_z Phi(X) sigma_z = Phi(sigma_z X sigma_z); ``phi`` ignored).
    """
    x = np.asarray(x, dtype=complex)
    if kind == "orthogonal":
        lhs = apply(p, SIGMA_Z @ x @ SIGMA_Z)
        rhs = SIGMA_Z @ apply(p, x) @ SIGMA_Z
    else:
        u = phase_unitary(phi)
        lhs = apply(p, u @ x @ u.conj().T)
        if kind == "phase":
            rhs = u @ apply(p, x) @ u.conj().T
        elif kind == "conjugate":
            rhs = u.conj().T @ apply(p, x) @ u
        else:
            raise ValueError(f"unknown covariance kind {kind!r}")
    return float(np.abs(lhs - rhs).max())


def symmetry_type(p: MapParams) -> Symmetry:
    basis = [np.eye(2)[:, [i]] @ np.eye(2)[[j], :] for i in range(2) for j in range(2)]
    if max(covariance_residual(p, e, 0.0, "orthogonal") for e in basis) > ZERO_TOL:
        # Cannot happen for this parameterisation; guards against a broken apply().
        raise AssertionError("map does not commute with sigma_z conjugation")
    lam_zero = abs(p.lam) <= ZERO_TOL
    mu_zero = abs(p.mu) <= ZERO_TOL
    if lam_zero and mu_zero:
        return Symmetry.BOTH
    if mu_zero:
        return Symmetry.PHASE_COVARIANT
    if lam_zero:
        return Symmetry.CONJUGATE_PHASE_COVARIANT
    return Symmetry.ORTHOGONAL_ONLY


def is_unital(p: MapParams, tol: float = ZERO_TOL) -> bool:
    return abs(p.a11 + p.a12 - 1.0) <= tol and abs(p.a21 + p.a22 - 1.0) <= tol


def is_trace_preserving(p: MapParams, tol: float = ZERO_TOL) -> bool:
    return abs(p.a11 + p.a21 - 1.0) <= tol and abs(p.a12 + p.a22 - 1.0) <= tol


def pauli_map_params(p0: float, p1: float, p2: float, p3: float) -> MapParams:
    """Parameters of X -> sum_k p_k sigma_k X sigma_k."""
    d = p0 + p3
    o = p1 + p2
    return MapParams(d, o, o, d, p0 - p3, p1 - p2)


def _check_unit(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise OutOfRange(f"{name}={value} must lie in [0, 1]")
    return float(value)


def amplitude_damping(eta: float) -> MapParams:
    eta = _check_unit("eta", eta)
    return MapParams(1.0, 1.0 - eta, 0.0, eta, math.sqrt(eta), 0.0)


def generalized_amplitude_damping(p: float, eta: float) -> MapParams:
    """Generalized amplitude damping with Kraus operators

    sqrt(p) [[1, 0], [0, sqrt(eta)]],   sqrt(p) [[0, sqrt(1-eta)], [0, 0]],
    sqrt(1-p) [[sqrt(eta), 0], [0, 1]], sqrt(1-p) [[0, 0], [sqrt(1-eta), 0]].

    Both damping branches carry the same coherence factor sqrt(eta), so the
    result is phase-covariant.
    """
    p = _check_unit("p", p)
    eta = _check_unit("eta", eta)
    a11 = p + (1.0 - p) * eta
    a12 = p * (1.0 - eta)
    return MapParams(a11, a12, 1.0 - a11, 1.0 - a12, math.sqrt(eta), 0.0)


def generalized_amplitude_damping_kraus(p: float, eta: float) -> list[np.ndarray]:
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    se, sd = math.sqrt(eta), math.sqrt(1.0 - eta)
    return [
        sp * np.array([[1.0, 0.0], [0.0, se]]),
        sp * np.array([[0.0, sd], [0.0, 0.0]]),
        sq * np.array([[se, 0.0], [0.0, 1.0]]),
        sq * np.array([[0.0, 0.0], [sd, 0.0]]),
    ]


def pauli(p0: float, p1: float, p2: float, p3: float) -> MapParams:
    return pauli_map_params(p0, p1, p2, p3)


def bit_flip(p: float) -> MapParams:
    p = _check_unit("p", p)
    return pauli_map_params(p, 1.0 - p, 0.0, 0.0)


def phase_flip(p: float) -> MapParams:
    p = _check_unit("p", p)
    return pauli_map_params(p, 0.0, 0.0, 1.0 - p)


def bit_phase_flip(p: float) -> MapParams:
    p = _check_unit("p", p)
    return pauli_map_params(p, 0.0, 1.0 - p, 0.0)


def choi_map() -> MapParams:
    """Choi's map X -> Tr(X) 1/4 + X^T/2: Schwarz but not 2-positive."""
    return MapParams.unital(0.75, 0.75, 0.0, 0.5)


def transposition() -> MapParams:
    return MapParams(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)


def reduction() -> MapParams:
    """X -> Tr(X) 1 - X."""
    return MapParams(0.0, 1.0, 1.0, 0.0, -1.0, 0.0)


def identity() -> MapParams:
    return MapParams(1.0, 0.0, 0.0, 1.0, 1.0, 0.0)


_NAMED = {
    "amplitude_damping": (amplitude_damping, 1),
    "generalized_amplitude_damping": (generalized_amplitude_damping, 2),
    "pauli": (pauli, 4),
    "bit_flip": (bit_flip, 1),
    "phase_flip": (phase_flip, 1),
    "bit_phase_flip": (bit_phase_flip, 1),
    "choi_map": (choi_map, 0),
    "transposition": (transposition, 0),
    "reduction": (reduction, 0),
    "identity": (identity, 0),
}

CHANNEL_NAMES = tuple(_NAMED)


def named_channel(name: str, *params: float) -> MapParams:
    try:
        factory, arity = _NAMED[name]
    except KeyError:
        raise ValueError(f"unknown channel {name!r}; choose from {', '.join(CHANNEL_NAMES)}") from None
    if len(params) != arity:
        raise ValueError(f"{name} takes {arity} parameter(s), got {len(params)}")
    return factory(*params)
