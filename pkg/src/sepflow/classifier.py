"""Recover the catalog member behind a sampled separated field.

The procedure first looks for a single radial profile shared by both
components (``u = phi(r) v(t)``), then for two profiles
(``u = (v1 phi1, v2 phi2)``). The branch only picks the family; constants are
always fitted by linear least squares against the family's closed form, and a
tag is emitted only when that fit reproduces the samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import families as fam
from .evaluators import Evaluator
from .geometry import ConeDomain
from .reduction import DegenerateAngles, GeneralAnsatz, default_probe_angles, derive_radial_system
from .verifier import sampled_residual

FIT_THRESHOLD = 1e-8
RANK_TOL = 1e-10
ZERO_REL, ZERO_ABS = 1e-10, 1e-14
SNAP_TOL = 1e-8
SHEAR_TOL = 1e-2


class Unclassifiable(ValueError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateSamples(ValueError):
    pass


@dataclass(frozen=True)
class FieldSamples:
    """Velocity (and optionally pressure) on a polar tensor grid, arrays shaped (n_r, n_theta)."""

    radii: np.ndarray
    angles: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    p: np.ndarray | None = None

    def __post_init__(self):
        r, t = np.asarray(self.radii, float), np.asarray(self.angles, float)
        if r.ndim != 1 or t.ndim != 1:
            raise DegenerateSamples("radii and angles must be 1-d")
        if r.size < 8 or r.min() <= 0 or r.max() / r.min() < 4:
            raise DegenerateSamples("need at least 8 positive radii spanning a ratio of 4")
        if t.size < 16:
            raise DegenerateSamples("need at least 16 angles")
        shape = (r.size, t.size)
        for name in ("u1", "u2") + (("p",) if self.p is not None else ()):
            if np.shape(getattr(self, name)) != shape:
                raise DegenerateSamples(f"{name} must have shape {shape}")
            if not np.all(np.isfinite(getattr(self, name))):
                raise DegenerateSamples(f"{name} contains non-finite samples")

    @classmethod
    def from_solution(cls, s: fam.FlowSolution, radii, angles, with_pressure=True):
        R, T = np.meshgrid(radii, angles, indexing="ij")
        u1, u2 = s.u(R, T)
        p = s.p(R, T) if with_pressure else None
        return cls(np.asarray(radii, float), np.asarray(angles, float),
                   np.asarray(u1, float), np.asarray(u2, float), p)

    def mesh(self):
        return np.meshgrid(self.radii, self.angles, indexing="ij")


@dataclass
class ClassificationResult:
    tag: str
    constants: dict
    fit_residual: float
    diagnostics: dict = field(default_factory=dict)

    def solution(self) -> fam.FlowSolution:
        return fam.FAMILIES[self.tag](**self.constants)


# -- proportionality and exponent fits ------------------------------------------

@dataclass(frozen=True)
class Proportionality:
    kind: str                 # "zero", "proportional" or "independent"
    lam: float | None = None
    residual: float = 0.0


def _rms(x) -> float:
    return float(np.sqrt(np.mean(np.square(x)))) if np.size(x) else 0.0


def proportionality_fit(f, g, threshold: float = FIT_THRESHOLD) -> Proportionality:
    """Decide between ``f = g = 0``, ``f = lam g`` and independence."""
    f, g = np.asarray(f, float).ravel(), np.asarray(g, float).ravel()
    if f.size != g.size:
        raise ValueError("sample counts differ")
    rf, rg = _rms(f), _rms(g)
    f_zero = rf <= ZERO_REL * rg + ZERO_ABS
    g_zero = rg <= ZERO_REL * rf + ZERO_ABS
    if f_zero and g_zero:
        return Proportionality("zero")
    if g_zero:
        return Proportionality("independent", residual=1.0)
    lam = float(f @ g / (g @ g))
    res = _rms(f - lam * g) / max(rf, rg)
    if res <= threshold:
        return Proportionality("proportional", lam, res)
    return Proportionality("independent", lam, res)


@dataclass(frozen=True)
class LambdaFit:
    kind: str                 # "power" or "loglinear"
    lam: float                # exponent (1 for the log-linear model)
    C1: float                 # power: amplitude; loglinear: phi = r (C1 + C2 ln r)
    C2: float
    residual: float
    power_residual: float
    loglinear_residual: float


def _power_model(r, phi):
    if np.any(phi == 0) or (np.any(phi > 0) and np.any(phi < 0)):
        return math.inf, math.nan, math.nan
    lr = np.log(r)
    lam, lc = np.polyfit(lr, np.log(np.abs(phi)), 1)
    amp = math.copysign(math.exp(lc), phi[0])
    # refine the amplitude by least squares at the fitted exponent
    basis = r**lam
    amp = float(basis @ phi / (basis @ basis))
    return _rms(phi - amp * basis) / _rms(phi), float(lam), amp


def _loglinear_model(r, phi):
    X = np.column_stack([r, r * np.log(r)])
    coef, *_ = np.linalg.lstsq(X, phi, rcond=None)
    return _rms(phi - X @ coef) / _rms(phi), float(coef[0]), float(coef[1])


def fit_lambda(r, phi, threshold: float = FIT_THRESHOLD) -> LambdaFit:
    """Pure power ``C r**lam`` against ``r (C1 + C2 ln r)``; power wins ties."""
    r, phi = np.asarray(r, float), np.asarray(phi, float)
    if _rms(phi) == 0:
        raise Unclassifiable("radial profile vanishes on the window")
    pres, lam, amp = _power_model(r, phi)
    lres, c1, c2 = _loglinear_model(r, phi)
    if pres <= threshold:
        return LambdaFit("power", lam, amp, 0.0, pres, pres, lres)
    if lres <= threshold:
        return LambdaFit("loglinear", 1.0, c1, c2, lres, pres, lres)
    raise Unclassifiable(
        f"radial profile fits neither r^lam ({pres:.3g}) nor r(C1 + C2 ln r) ({lres:.3g})",
        {"power_residual": pres, "loglinear_residual": lres})


# -- least-squares fits of each family -----------------------------------------------

def _design(tag: str, R, T, lam=None):
    """Columns of ``(u1, u2)`` for each free velocity constant, stacked."""
    x, y = R * np.cos(T), R * np.sin(T)
    one, zero = np.ones_like(x), np.zeros_like(x)
    if tag == "constant":
        cols = [(one, zero), (zero, one)]
    elif tag == "linear":
        cols = [(x, -y), (y, zero), (zero, x)]
    elif tag == "quadratic":
        cols = [(2 * x * y, -3 * x * x - y * y), (x * x + 3 * y * y, -2 * x * y),
                (x * x - y * y, -2 * x * y), (2 * x * y, x * x - y * y)]
    elif tag == "powermode":
        z = R**lam * np.exp(1j * lam * T)
        # u1 - i u2 = (C1 - i C2) z^lam
        cols = [(z.real, -z.imag), (z.imag, z.real)]
    elif tag == "rotlog":
        L = np.log(R)
        cols = [(-y, x), (-y * L, x * L)]
    elif tag == "shearx":
        cols = [(one, zero), (zero, x)]
    elif tag == "sheary":
        cols = [(y, zero), (zero, one)]
    else:
        raise KeyError(tag)
    return np.column_stack([np.concatenate([a.ravel(), b.ravel()]) for a, b in cols])


def _project_quadratic(c):
    C1, C2, C3, C4 = c
    big = max(abs(C3), abs(C4))
    if max(abs(C1), abs(C2)) <= 1e-9 * big:
        return [0.0, 0.0, C3, C4]
    q = fam.quadratic_from_c1c2(C1, C2)
    return [q.C1, q.C2, q.C3, q.C4]


def _snap(v: float, tol: float = 1e-12) -> float:
    return 0.0 if abs(v) <= tol else v


def fit_family(tag: str, fs: FieldSamples, lam: float | None = None):
    """Least-squares constants for ``tag`` and the normalized velocity misfit."""
    R, T = fs.mesh()
    data = np.concatenate([fs.u1.ravel(), fs.u2.ravel()])
    X = _design(tag, R, T, lam)
    coef, *_ = np.linalg.lstsq(X, data, rcond=None)
    coef = list(map(float, coef))
    if tag == "quadratic":
        coef = _project_quadratic(coef)
    scale = _rms(data)
    res = _rms(data - X @ np.array(coef)) / scale if scale > 0 else 0.0
    names = {"constant": ["C1", "C2"], "linear": ["C1", "C2", "C3"],
             "quadratic": ["C1", "C2", "C3", "C4"], "powermode": ["C1", "C2"],
             "rotlog": ["C1", "C2"], "shearx": ["C1", "C2"], "sheary": ["C1", "C2"]}[tag]
    consts = dict(zip(names, coef))
    if tag == "powermode":
        consts = {"lam": lam, **consts}
    cls = fam.FAMILIES[tag]
    pname = cls.pressure_constant_field
    consts[pname] = 0.0
    if fs.p is not None:
        s0 = cls.unchecked(**consts) if tag == "quadratic" else cls(**consts)
        consts[pname] = float(np.mean(fs.p - s0.p(R, T)))
    return consts, float(res)


# -- factorization helpers -----------------------------------------------------------

def _rank1(M):
    """Leading singular pair of ``M`` and the ratio of the second to the first singular value."""
    U, S, Vt = np.linalg.svd(M, full_matrices=False)
    if S[0] == 0:
        return None, None, 0.0
    ratio = S[1] / S[0] if S.size > 1 else 0.0
    radial, angular = S[0] * U[:, 0], Vt[0]
    # gauge: unit-RMS angular factor, positive radial factor at the first radius
    k = _rms(angular)
    radial, angular = radial * k, angular / k
    if radial[0] < 0:
        radial, angular = -radial, -angular
    return radial, angular, float(ratio)


def _angular_evaluator(t, v, periodic=False):
    if periodic:
        # samples cover [0, 2pi) uniformly; close the loop for a periodic spline
        cs = CubicSpline(np.append(t, t[0] + 2 * math.pi), np.append(v, v[0]), bc_type="periodic")
    else:
        cs = CubicSpline(t, v)
    return Evaluator.of(cs, cs.derivative(1), cs.derivative(2), cs.derivative(3))


def _radial_evaluator(r, phi):
    cs = CubicSpline(r, phi)
    return Evaluator.of(cs, cs.derivative(1), cs.derivative(2), cs.derivative(3))


def divergence_diagnostic(fs: FieldSamples, periodic: bool = False) -> float:
    """Relative divergence of the samples, from spline derivatives on the polar grid."""
    return sampled_residual(fs.radii, fs.angles, fs.u1, fs.u2, None, periodic)["div"]


# -- the decision procedure ------------------------------------------------------------

def _accept(tag, consts, res, d, diag, threshold):
    diag["candidates"].append((tag, res))
    if res > threshold:
        return None
    try:
        s = fam.FAMILIES[tag](**consts)
    except (ValueError, fam.ConstraintViolation) as exc:
        diag["rejected"] = str(exc)
        return None
    ok = fam.admissible(s, d)
    if not ok:
        diag["rejected"] = ok.reason
        return None
    return ClassificationResult(tag, consts, res, diag)


def _snap_lambda(lam: float) -> float:
    k = round(lam)
    return float(k) if abs(lam - k) <= SNAP_TOL else lam


def _single_profile(fs, radial, angular, d, diag, threshold):
    n = fs.angles.size
    v1, v2 = angular[:n], angular[n:]
    c, s = np.cos(fs.angles), np.sin(fs.angles)
    A = c * v1 + s * v2
    a_zero = _rms(A) <= ZERO_REL * _rms(angular) + ZERO_ABS
    diag["A_rms"] = _rms(A)
    if not a_zero and fs.angles.size >= 4:
        # B = sin v1' - cos v2' should equal lam A; spline derivatives make this a rough check
        dv1 = CubicSpline(fs.angles, v1).derivative()(fs.angles)
        dv2 = CubicSpline(fs.angles, v2).derivative()(fs.angles)
        pf = proportionality_fit(s * dv1 - c * dv2, A, threshold=1.0)
        diag["lambda_from_B"] = pf.lam
    fit = fit_lambda(fs.radii, radial, threshold)
    diag["lambda_fit"] = fit
    if a_zero:
        # A = B = 0: a swirl u = phi(r) (-sin, cos)
        if fit.kind == "power" and abs(fit.lam - 1) <= SNAP_TOL:
            consts, res = fit_family("linear", fs)
            return _accept("linear", consts, res, d, diag, threshold)
        if fit.kind == "loglinear":
            consts, res = fit_family("rotlog", fs)
            return _accept("rotlog", consts, res, d, diag, threshold)
        return None
    if fit.kind != "power":
        return None
    lam = _snap_lambda(fit.lam)
    tag = {0.0: "constant", 1.0: "linear", 2.0: "quadratic"}.get(lam, "powermode")
    if lam < 0:
        return None
    consts, res = fit_family(tag, fs, lam if tag == "powermode" else None)
    return _accept(tag, consts, res, d, diag, threshold)


def _probe_pairs(fs, d):
    first = default_probe_angles(d)
    t = fs.angles
    lo, hi = t.min(), t.max()
    yield tuple(min(max(a, lo), hi) for a in first)
    for f1, f2 in ((0.2, 0.8), (0.1, 0.6), (0.4, 0.9), (0.25, 0.55)):
        yield lo + f1 * (hi - lo), lo + f2 * (hi - lo)


def _two_profiles(fs, d, diag, threshold):
    phi1, v1, q1 = _rank1(fs.u1)
    phi2, v2, q2 = _rank1(fs.u2)
    diag["component_rank_ratio"] = (q1, q2)
    if phi1 is None or phi2 is None or q1 > RANK_TOL or q2 > RANK_TOL:
        raise DegenerateSamples("velocity components are not separated in (r, theta)")
    periodic = d.is_full_plane
    g = GeneralAnsatz(_angular_evaluator(fs.angles, v1, periodic),
                      _angular_evaluator(fs.angles, v2, periodic),
                      _radial_evaluator(fs.radii, phi1), _radial_evaluator(fs.radii, phi2))
    # keep the best conditioned probe pair; near-degenerate pairs amplify spline error
    rc = None
    for t1, t2 in _probe_pairs(fs, d):
        try:
            cand = derive_radial_system(g, t1, t2, fs.radii)
        except DegenerateAngles:
            continue
        if rc is None or cand.conditioning > rc.conditioning:
            rc = cand
    if rc is None:
        return None
    diag["radial_system"] = rc
    target = {"sheary": (1, 0, 0, 0), "shearx": (0, 0, 0, 1)}
    got = np.array([rc.a, rc.b, rc.c, rc.d])
    for tag, abcd in target.items():
        if np.max(np.abs(got - np.array(abcd))) <= SHEAR_TOL:
            consts, res = fit_family(tag, fs)
            return _accept(tag, consts, res, d, diag, threshold)
    return None


def classify(fs: FieldSamples, d: ConeDomain, threshold: float = FIT_THRESHOLD) -> ClassificationResult:
    diag = {"candidates": [],
            "divergence_residual": divergence_diagnostic(fs, d.is_full_plane)}
    if _rms(fs.u1) == 0 and _rms(fs.u2) == 0:
        consts, res = fit_family("constant", fs)
        return ClassificationResult("constant", consts, res, diag)
    M = np.hstack([fs.u1, fs.u2])
    radial, angular, ratio = _rank1(M)
    diag["rank_ratio"] = ratio
    if ratio <= RANK_TOL:
        try:
            out = _single_profile(fs, radial, angular, d, diag, threshold)
        except Unclassifiable as exc:
            diag["single_profile"] = str(exc)
            out = None
        if out is not None:
            return out
    else:
        out = _two_profiles(fs, d, diag, threshold)
        if out is not None:
            return out
    raise Unclassifiable(
        f"no catalog family reproduces the samples (divergence residual "
        f"{diag['divergence_residual']:.3g})", diag)
