"""Closed-form positivity, Schwarz and complete-positivity criteria.

All regions are closed: a verdict is ``True`` when the inequality slack is
``>= -EPS``. Ratios ``|c|^2 / d`` with ``d == 0`` count as 0 when
``|c| <= EPS`` and as ``+inf`` otherwise (the ellipse degenerates to a
segment).

The ``*_margin`` helpers are written with numpy operations only so they work
unchanged on scalars and on whole sample arrays; the public predicates wrap
them for a single :class:`~qmap.docmap.MapParams`.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from qmap.docmap import MapParams, dual, is_unital

EPS = 1e-12


class NotUnital(ValueError):
    pass


class WrongSymmetry(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


def _ratio(c_abs, d):
    """|c|^2 / d with the degenerate-denominator convention."""
    c_abs = np.asarray(c_abs, dtype=float)
    d = np.asarray(d, dtype=float)
    # tiny positive d may overflow to inf, which is the intended limit
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = c_abs**2 / np.where(d > 0, d, 1.0)
    return np.where(d > 0, r, np.where(c_abs <= EPS, 0.0, np.inf))


def _sqrt0(x):
    return np.sqrt(np.maximum(x, 0.0))


def _min_a(a11, a12, a21, a22):
    return np.minimum(np.minimum(a11, a12), np.minimum(a21, a22))


def cp_margin(a11, a12, a21, a22, lam_abs, mu_abs):
    slack = np.minimum(_sqrt0(a11 * a22) - lam_abs, _sqrt0(a12 * a21) - mu_abs)
    return np.minimum(slack, _min_a(a11, a12, a21, a22))


def positive_margin(a11, a12, a21, a22, lam_abs, mu_abs):
    slack = _sqrt0(a11 * a22) + _sqrt0(a12 * a21) - lam_abs - mu_abs
    amin = _min_a(a11, a12, a21, a22)
    return np.where(amin < 0, np.minimum(slack, amin), slack)


def schwarz_unital_margin(a11, a12, a21, a22, lam_abs, mu_abs):
    """1 - max of the two ellipse left-hand sides; a12 = 1-a, a21 = 1-b."""
    lhs1 = _ratio(lam_abs, a11) + _ratio(mu_abs, a12)
    lhs2 = _ratio(lam_abs, a22) + _ratio(mu_abs, a21)
    margin = 1.0 - np.maximum(lhs1, lhs2)
    amin = _min_a(a11, a12, a21, a22)
    return np.where(amin < -EPS, np.minimum(margin, amin), margin)


def generalized_schwarz_margin(a11, a12, a21, a22, lam_abs, mu_abs):
    row1 = a11 + a12
    row2 = a21 + a22
    lhs1 = _ratio(lam_abs, a11) + _ratio(mu_abs, a12)
    lhs2 = _ratio(lam_abs, a22) + _ratio(mu_abs, a21)
    return np.minimum(row2 - lhs1, row1 - lhs2)


def dual_generalized_schwarz_margin(a11, a12, a21, a22, lam_abs, mu_abs):
    lhs1 = _ratio(lam_abs, a11) + _ratio(mu_abs, a21)
    lhs2 = _ratio(lam_abs, a22) + _ratio(mu_abs, a12)
    return np.minimum(a22 + a12 - lhs1, a11 + a21 - lhs2)


def _args(p: MapParams):
    return p.a11, p.a12, p.a21, p.a22, abs(p.lam), abs(p.mu)


def is_completely_positive(p: MapParams) -> tuple[bool, float]:
    m = float(cp_margin(*_args(p)))
    return m >= -EPS, m


def is_positive(p: MapParams) -> tuple[bool, float]:
    m = float(positive_margin(*_args(p)))
    return m >= -EPS, m


def is_schwarz_unital(p: MapParams) -> tuple[bool, float]:
    """Schwarz criterion for unital maps: both ellipse conditions.

    A unital map with some a_ij < 0 is not positive, hence not Schwarz; it is
    reported as ``False`` rather than rejected.
    """
    if not is_unital(p):
        raise NotUnital("Schwarz criterion needs a unital map; use is_generalized_schwarz")
    m = float(schwarz_unital_margin(*_args(p)))
    return m >= -EPS, m


def is_schwarz_phase_covariant(p: MapParams) -> bool:
    """|lam| <= min(sqrt a, sqrt b) when mu = 0; |mu| <= min(sqrt(1-a), sqrt(1-b)) when lam = 0."""
    if not is_unital(p):
        raise NotUnital("phase-covariant Schwarz criterion needs a unital map")
    if min(p.a11, p.a12, p.a21, p.a22) < -EPS:
        return False
    a, b = p.a11, p.a22
    if abs(p.mu) <= EPS:
        return bool(abs(p.lam) <= min(np.sqrt(a), np.sqrt(b)) + EPS)
    if abs(p.lam) <= EPS:
        return bool(abs(p.mu) <= min(np.sqrt(p.a12), np.sqrt(p.a21)) + EPS)
    raise WrongSymmetry("neither lambda nor mu vanishes")


def _require_valid(p: MapParams) -> None:
    if min(p.a11, p.a12, p.a21, p.a22) < -EPS:
        raise InvalidParams(f"a_ij must be non-negative, got {p.a_matrix.tolist()}")


def is_generalized_schwarz(p: MapParams) -> tuple[bool, float]:
    _require_valid(p)
    m = float(generalized_schwarz_margin(*_args(p)))
    return m >= -EPS, m


def is_dual_generalized_schwarz(p: MapParams) -> tuple[bool, float]:
    _require_valid(p)
    m = float(dual_generalized_schwarz_margin(*_args(p)))
    return m >= -EPS, m


def schwarz_necessary_bounds(p: MapParams) -> bool:
    if not is_unital(p):
        raise NotUnital("necessary Schwarz bounds are stated for unital maps")
    if min(p.a11, p.a12, p.a21, p.a22) < -EPS:
        return False
    lam_ok = abs(p.lam) <= min(np.sqrt(p.a11), np.sqrt(p.a22)) + EPS
    mu_ok = abs(p.mu) <= min(np.sqrt(p.a12), np.sqrt(p.a21)) + EPS
    return bool(lam_ok and mu_ok)


def abs_reduction(p: MapParams) -> MapParams:
    return p.replace(lam=abs(p.lam), mu=abs(p.mu))


@dataclass(frozen=True)
class Margins:
    positive: float
    schwarz: float
    completely_positive: float


@dataclass(frozen=True)
class Classification:
    positive: bool
    schwarz: bool
    completely_positive: bool
    margins: Margins
    unital: bool = True

    def to_json(self) -> dict:
        def finite(x):
            return x if np.isfinite(x) else ("inf" if x > 0 else "-inf")

        return {
            "positive": self.positive,
            "schwarz": self.schwarz,
            "completely_positive": self.completely_positive,
            "unital": self.unital,
            "margins": {k: finite(v) for k, v in asdict(self.margins).items()},
        }


def classify(p: MapParams) -> Classification:
    """Positivity, (generalized) Schwarz and CP verdicts with margins.

    For non-unital maps the ``schwarz`` field is the generalized Schwarz
    property.
    """
    pos, pm = is_positive(p)
    cp, cm = is_completely_positive(p)
    unital = is_unital(p)
    if unital:
        sch, sm = is_schwarz_unital(p)
    elif p.is_valid:
        sch, sm = is_generalized_schwarz(p)
    else:
        sch, sm = False, min(p.a11, p.a12, p.a21, p.a22)
    return Classification(bool(pos), bool(sch), bool(cp), Margins(pm, sm, cm), unital)


def classify_batch(a11, a12, a21, a22, lam_abs, mu_abs, unital: bool = True) -> dict:
    """Vectorised verdicts on arrays of parameters (same formulas as :func:`classify`)."""
    args = tuple(np.asarray(v, dtype=float) for v in (a11, a12, a21, a22, lam_abs, mu_abs))
    pm = positive_margin(*args)
    cm = cp_margin(*args)
    sm = schwarz_unital_margin(*args) if unital else generalized_schwarz_margin(*args)
    return {
        "positive": pm >= -EPS,
        "schwarz": sm >= -EPS,
        "completely_positive": cm >= -EPS,
        "positive_margin": pm,
        "schwarz_margin": sm,
        "cp_margin": cm,
    }


@dataclass(frozen=True)
class DualityReport:
    case: str  # "equal", "a'>b'" or "a'<b'"
    generalized_schwarz: bool
    dual_generalized_schwarz: bool
    holds: bool
    counterexample: dict | None = None


def check_prop7_relations(p: MapParams, tol: float = EPS) -> DualityReport:
    """Check the claimed duality relations between Phi and its dual.

    Claimed: a' = b' gives equal verdicts; a' > b' and Phi generalized
    Schwarz gives the dual generalized Schwarz; a' < b' and the dual
    generalized Schwarz gives Phi generalized Schwarz. A failing relation is
    returned as a counterexample record, never suppressed.
    """
    _require_valid(p)
    gs, _ = is_generalized_schwarz(p)
    gd, _ = is_dual_generalized_schwarz(p)
    ap, bp = p.a12, p.a21
    if abs(ap - bp) <= tol:
        case, holds = "equal", gs == gd
    elif ap > bp:
        case, holds = "a'>b'", (not gs) or gd
    else:
        case, holds = "a'<b'", (not gd) or gs
    cex = None
    if not holds:
        cex = {"params": p.to_json(), "case": case, "generalized_schwarz": gs, "dual_generalized_schwarz": gd}
    return DualityReport(case, bool(gs), bool(gd), bool(holds), cex)


def duality_violations(a11, a12, a21, a22, lam_abs, mu_abs, tol: float = EPS) -> np.ndarray:
    """Boolean mask of samples violating the duality relations (vectorised)."""
    args = tuple(np.asarray(v, dtype=float) for v in (a11, a12, a21, a22, lam_abs, mu_abs))
    gs = generalized_schwarz_margin(*args) >= -EPS
    gd = dual_generalized_schwarz_margin(*args) >= -EPS
    ap, bp = args[1], args[2]
    equal = np.abs(ap - bp) <= tol
    bad_equal = equal & (gs != gd)
    bad_gt = ~equal & (ap > bp) & gs & ~gd
    bad_lt = ~equal & (ap < bp) & gd & ~gs
    return bad_equal | bad_gt | bad_lt


def dual_consistency(p: MapParams) -> bool:
    """The dual-ellipse criterion equals the generalized criterion of the dual map."""
    return is_dual_generalized_schwarz(p)[0] == is_generalized_schwarz(dual(p))[0]


# -- maps Phi_- and Psi_+ built from A = diag(alpha1, alpha2) ---------------------------


def kS_phi_minus(alpha1: float, alpha2: float) -> MapParams:
    """X -> (1 Tr(AX) - X) / (Tr A - 1) for A = diag(alpha1, alpha2)."""
    s = alpha1 + alpha2 - 1.0
    if s == 0.0:
        raise DegenerateDenominator("alpha1 + alpha2 = 1")
    return MapParams((alpha1 - 1.0) / s, alpha2 / s, alpha1 / s, (alpha2 - 1.0) / s, -1.0 / s, 0.0)


def kS_psi_plus(alpha1: float, alpha2: float) -> MapParams:
    """X -> (1 Tr(AX) + X^T) / (Tr A + 1) for A = diag(alpha1, alpha2)."""
    s = alpha1 + alpha2 + 1.0
    if s == 0.0:
        raise DegenerateDenominator("alpha1 + alpha2 = -1")
    if s < 0.0:
        raise InvalidParams("Psi_+ needs Tr A > -1")
    return MapParams((alpha1 + 1.0) / s, alpha2 / s, alpha1 / s, (alpha2 + 1.0) / s, 0.0, 1.0 / s)


def norm_condition_phi_minus(alpha1: float, alpha2: float) -> bool:
    """A invertible and ||A^-1||_inf <= (Tr A - 1) / Tr A."""
    if alpha1 == 0.0 or alpha2 == 0.0:
        return False
    tr = alpha1 + alpha2
    if tr == 0.0:
        raise DegenerateDenominator("Tr A = 0")
    return max(1.0 / abs(alpha1), 1.0 / abs(alpha2)) <= (tr - 1.0) / tr + EPS


def spectral_condition_psi_plus(alpha1: float, alpha2: float) -> bool:
    """A >= 1 / (Tr A + 1), for Tr A > -1."""
    tr = alpha1 + alpha2
    if tr <= -1.0:
        raise InvalidParams("the spectral condition needs Tr A > -1")
    return min(alpha1, alpha2) >= 1.0 / (tr + 1.0) - EPS


def kS_equivalence(alpha1: float, alpha2: float) -> dict:
    """Operator-norm / spectral conditions next to the ellipse-derived verdicts."""
    return {
        "norm_condition": norm_condition_phi_minus(alpha1, alpha2),
        "phi_minus_schwarz": is_schwarz_phase_covariant(kS_phi_minus(alpha1, alpha2)),
        "spectral_condition": spectral_condition_psi_plus(alpha1, alpha2),
        "psi_plus_schwarz": is_schwarz_phase_covariant(kS_psi_plus(alpha1, alpha2)),
    }
