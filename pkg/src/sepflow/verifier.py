"""Numerical checks of catalog members.

The finite-difference oracle works on Cartesian samples of ``u`` and ``p``
only, so it shares no code with the polar closed forms it is checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .families import FlowSolution, RotLog, SingularPointError
from .geometry import ConeDomain, Margin, PolarPoint, contains

EPS = np.finfo(float).eps
COMPONENTS = ("div", "momentum", "vorticity")
# highest derivative order entering each residual, used for the rounding floor
_DERIV_ORDER = {"div": 1, "momentum": 2, "vorticity": 3}


class StencilOutOfDomain(ValueError):
    pass


class PathExitsDomain(ValueError):
    pass


class Residual(NamedTuple):
    div: np.ndarray
    momentum: np.ndarray  # (..., 2)
    vorticity: np.ndarray

    def norms(self):
        """Pointwise magnitudes of the three components."""
        return (np.abs(self.div), np.linalg.norm(self.momentum, axis=-1), np.abs(self.vorticity))


@dataclass(frozen=True)
class GridSpec:
    domain: ConeDomain
    r_min: float = 0.5
    r_max: float = 2.0
    n_r: int = 8
    n_theta: int = 16
    theta_margin: float = 0.1

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ValueError("need 0 < r_min < r_max")
        if self.n_r < 2 or self.n_theta < 2:
            raise ValueError("grid counts must be >= 2")
        if self.theta_margin < 0:
            raise ValueError("theta margin must be non-negative")
        if not self.domain.is_full_plane and 2 * self.theta_margin >= self.domain.opening:
            raise ValueError("theta margin leaves no room inside the sector")

    @property
    def radii(self) -> np.ndarray:
        return np.geomspace(self.r_min, self.r_max, self.n_r)

    @property
    def angles(self) -> np.ndarray:
        d = self.domain
        if d.is_full_plane:
            return np.linspace(0.0, 2 * math.pi, self.n_theta, endpoint=False)
        return np.linspace(d.alpha + self.theta_margin, d.beta - self.theta_margin, self.n_theta)

    def mesh(self):
        """``(R, T)`` of shape ``(n_r, n_theta)``; row-major in r, then theta."""
        return np.meshgrid(self.radii, self.angles, indexing="ij")


@dataclass
class ResidualReport:
    max: dict
    rms: dict
    h: float | None = None
    per_component: dict = field(default_factory=dict)

    def worst(self) -> float:
        return max(self.max.values())


# -- analytic residuals --------------------------------------------------------

def analytic_residual(s: FlowSolution, p) -> Residual:
    """Residuals of incompressibility, momentum and vorticity transport from closed forms.

    ``p`` is an ``(r, theta)`` pair of scalars or broadcastable arrays.
    """
    r, theta = (np.asarray(v, dtype=float) for v in p)
    s._check_regular(r)
    u = np.stack(s.u(r, theta), axis=-1)
    G = np.asarray(s.grad_u(r, theta))
    lap = np.stack(s.lap_u(r, theta), axis=-1)
    gp = np.stack(s.grad_p(r, theta), axis=-1)
    div = G[..., 0, 0] + G[..., 1, 1]
    adv = np.einsum("...ij,...j->...i", G, u)
    mom = -lap + adv + gp
    gw = np.stack(s.grad_w(r, theta), axis=-1)
    vort = s.lap_w(r, theta) - np.einsum("...i,...i->...", u, gw)
    return Residual(div, mom, vort)


def residual_scales(s: FlowSolution, p):
    """Magnitudes of the terms each residual balances, for relative tolerances."""
    r, theta = (np.asarray(v, dtype=float) for v in p)
    u = np.stack(s.u_magnitude(r, theta), axis=-1)
    G = np.abs(np.asarray(s.grad_u(r, theta)))
    lap = np.abs(np.stack(s.lap_u(r, theta), axis=-1))
    gp = np.abs(np.stack(s.grad_p(r, theta), axis=-1))
    gw = np.abs(np.stack(s.grad_w(r, theta), axis=-1))
    div = G[..., 0, 0] + G[..., 1, 1]
    mom = np.linalg.norm(lap + np.einsum("...ij,...j->...i", G, u) + gp, axis=-1)
    vort = np.abs(s.lap_w(r, theta)) + np.einsum("...i,...i->...", u, gw)
    return div, mom, vort


def relative_residual(s: FlowSolution, p):
    """Residual norms over the size of the terms they balance (0 where all terms vanish)."""
    out = []
    for a, b in zip(analytic_residual(s, p).norms(), residual_scales(s, p)):
        out.append(np.where(b > 0, a / np.where(b > 0, b, 1.0), a))
    return tuple(out)


# -- finite-difference oracle ----------------------------------------------------

def _curl(ufn, x, y, h):
    u1n, _ = ufn(x, y + h)
    u1s, _ = ufn(x, y - h)
    _, u2e = ufn(x + h, y)
    _, u2w = ufn(x - h, y)
    return (u1n - u1s) / (2 * h) - (u2e - u2w) / (2 * h)


def fd_residual(ufn: Callable, pfn: Callable, point, h: float,
                domain: ConeDomain | None = None) -> Residual:
    """Residual triple from central differences of Cartesian samples.

    ``ufn(x, y) -> (u1, u2)`` and ``pfn(x, y) -> p`` must accept arrays.
    ``point`` is an ``(r, theta)`` pair. The vorticity part differences a
    differenced curl, so the stencil reaches ``2h`` in each direction.
    """
    r, theta = point
    x0, y0 = r * math.cos(theta), r * math.sin(theta)
    if domain is not None:
        for dx in (-2, 0, 2):
            for dy in (-2, 0, 2):
                xs, ys = x0 + dx * h, y0 + dy * h
                if not contains(domain, PolarPoint(math.hypot(xs, ys), math.atan2(ys, xs)),
                                Margin(0.0, 0.0)):
                    raise StencilOutOfDomain(
                        f"stencil of width {2 * h:g} around ({r:g}, {theta:g}) leaves the domain")

    def U(dx, dy):
        return np.array(ufn(x0 + dx * h, y0 + dy * h), dtype=float)

    def P(dx, dy):
        return float(pfn(x0 + dx * h, y0 + dy * h))

    c = U(0, 0)
    ux = (U(1, 0) - U(-1, 0)) / (2 * h)
    uy = (U(0, 1) - U(0, -1)) / (2 * h)
    lap = (U(1, 0) + U(-1, 0) + U(0, 1) + U(0, -1) - 4 * c) / h**2
    gp = np.array([(P(1, 0) - P(-1, 0)) / (2 * h), (P(0, 1) - P(0, -1)) / (2 * h)])
    div = ux[0] + uy[1]
    mom = -lap + c[0] * ux + c[1] * uy + gp

    w = lambda dx, dy: float(_curl(ufn, x0 + dx * h, y0 + dy * h, h))  # noqa: E731
    wc = w(0, 0)
    we, ww, wn, ws = w(1, 0), w(-1, 0), w(0, 1), w(0, -1)
    lap_w = (we + ww + wn + ws - 4 * wc) / h**2
    vort = lap_w - (c[0] * (we - ww) + c[1] * (wn - ws)) / (2 * h)
    return Residual(np.float64(div), mom, np.float64(vort))


def default_step(r: float) -> float:
    return 1e-3 * max(r, 1.0)


def _solution_oracles(s: FlowSolution):
    return s.velocity_xy, s.pressure_xy


def grid_residual_report(s: FlowSolution, g: GridSpec, h: float | None = None) -> ResidualReport:
    """Finite-difference residuals over a grid, max and RMS per component."""
    ufn, pfn = _solution_oracles(s)
    R, T = g.mesh()
    vals = {k: [] for k in COMPONENTS}
    steps = []
    for r, t in zip(R.ravel(), T.ravel()):
        hh = h if h is not None else _clip_step(g.domain, r, t, default_step(r))
        steps.append(hh)
        res = fd_residual(ufn, pfn, (r, t), hh, g.domain)
        for k, v in zip(COMPONENTS, res.norms()):
            vals[k].append(float(v))
    arr = {k: np.array(v) for k, v in vals.items()}
    return ResidualReport(
        max={k: float(v.max()) for k, v in arr.items()},
        rms={k: float(np.sqrt(np.mean(v**2))) for k, v in arr.items()},
        h=float(max(steps)), per_component=arr)


def _clip_step(d: ConeDomain, r: float, theta: float, h: float) -> float:
    """Shrink ``h`` so the stencil (reach 2h in x and y) stays off the sector rays."""
    if d.is_full_plane:
        return h
    dist = r * math.sin(min(theta - d.alpha, d.beta - theta, math.pi / 2))
    return min(h, dist / (2 * math.sqrt(2) * 1.01))


# -- convergence order -------------------------------------------------------------

@dataclass
class ConvergenceReport:
    h: np.ndarray
    gap_rms: dict
    order: dict
    ratios: dict
    floor: dict

    def message(self, comp: str) -> str:
        if self.floor[comp]:
            return "residual at rounding floor, order undefined"
        return f"order {self.order[comp]:.3f}"


def convergence_order(s: FlowSolution, g: GridSpec, h_list) -> ConvergenceReport:
    """Slope of log RMS(|fd - analytic|) against log h, per residual component.

    RMS over the grid is used so that isolated points where the leading error
    term happens to vanish do not distort the ratios.
    """
    h = np.asarray(h_list, dtype=float)
    if h.size < 3 or np.any(np.diff(h) >= 0):
        raise ValueError("h_list must be strictly decreasing with at least 3 entries")
    ufn, pfn = _solution_oracles(s)
    R, T = g.mesh()
    pts = list(zip(R.ravel(), T.ravel()))
    exact = [analytic_residual(s, p) for p in pts]
    scale = max(1.0, float(np.max(np.abs(np.stack(s.u(R, T))))))
    gaps = {k: [] for k in COMPONENTS}
    for hh in h:
        per = {k: [] for k in COMPONENTS}
        for p, ex in zip(pts, exact):
            fd = fd_residual(ufn, pfn, p, hh, g.domain)
            per["div"].append(abs(float(fd.div - ex.div)))
            per["momentum"].append(float(np.linalg.norm(fd.momentum - ex.momentum)))
            per["vorticity"].append(abs(float(fd.vorticity - ex.vorticity)))
        for k in COMPONENTS:
            gaps[k].append(math.sqrt(np.mean(np.square(per[k]))))
    order, ratios, floor = {}, {}, {}
    for k in COMPONENTS:
        gk = np.array(gaps[k])
        noise = 100 * EPS * scale / h ** _DERIV_ORDER[k]
        floor[k] = bool(np.all(gk <= noise))
        if floor[k]:
            order[k] = float("nan")
            ratios[k] = np.full(h.size - 1, np.nan)
        else:
            order[k] = float(np.polyfit(np.log(h), np.log(gk), 1)[0])
            ratios[k] = gk[:-1] / gk[1:]
    return ConvergenceReport(h, {k: np.array(v) for k, v in gaps.items()}, order, ratios, floor)


# -- pressure recovery ----------------------------------------------------------------

def pressure_gradient_from_velocity(s: FlowSolution, r, theta):
    """``Lap u - (u . grad) u``, which equals ``grad p`` for a solution."""
    u = np.stack(s.u(r, theta), axis=-1)
    G = np.asarray(s.grad_u(r, theta))
    lap = np.stack(s.lap_u(r, theta), axis=-1)
    return lap - np.einsum("...ij,...j->...i", G, u)


def recover_pressure(s: FlowSolution, anchor, target, n_steps: int = 4096,
                     domain: ConeDomain | None = None) -> float:
    """``p(anchor)`` plus the midpoint-rule line integral of ``Lap u - u.grad u``."""
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    a = np.array([anchor[0] * math.cos(anchor[1]), anchor[0] * math.sin(anchor[1])])
    b = np.array([target[0] * math.cos(target[1]), target[0] * math.sin(target[1])])
    t = (np.arange(n_steps) + 0.5) / n_steps
    xy = a[None, :] + t[:, None] * (b - a)[None, :]
    r = np.hypot(xy[:, 0], xy[:, 1])
    th = np.mod(np.arctan2(xy[:, 1], xy[:, 0]), 2 * math.pi)
    # the segment is checked at the quadrature nodes and both end points
    d = domain if domain is not None else ConeDomain.full_plane()
    for rr, tt in [tuple(anchor), tuple(target)] + list(zip(r, th)):
        if rr == 0 and (s.gradient_singular_at_apex or not d.is_full_plane):
            raise PathExitsDomain("path passes through the apex")
        if rr > 0 and not contains(d, PolarPoint(rr, tt)) and not _on_closure(d, rr, tt):
            raise PathExitsDomain("path leaves the domain")
    if np.any(r == 0) and s.gradient_singular_at_apex:
        raise PathExitsDomain("path passes through the singular apex")
    if _crosses_branch_cut(s, xy):
        raise PathExitsDomain("path crosses the angular branch cut of the pressure")
    gp = pressure_gradient_from_velocity(s, r, th)
    integral = float(np.sum(gp @ (b - a)) / n_steps)
    return float(s.p(*anchor)) + integral


def _on_closure(d: ConeDomain, r, t) -> bool:
    return d.is_full_plane or (d.alpha - 1e-15 <= t <= d.beta + 1e-15)


def _crosses_branch_cut(s: FlowSolution, xy) -> bool:
    """RotLog pressure carries ``2 C2 theta``, discontinuous across the positive x-axis."""
    if not isinstance(s, RotLog) or s.C2 == 0:
        return False
    y = xy[:, 1]
    return bool(np.any((y[:-1] * y[1:] < 0) & (xy[:-1, 0] + xy[1:, 0] > 0)))


# -- gradient blow-up near the apex ------------------------------------------------

def operator_norm_2x2(G) -> np.ndarray:
    """Largest singular value of a stack of 2x2 matrices, in closed form."""
    G = np.asarray(G, dtype=float)
    fro2 = np.sum(G**2, axis=(-2, -1))
    det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
    disc = np.sqrt(np.maximum(fro2**2 - 4 * det**2, 0.0))
    return np.sqrt(0.5 * (fro2 + disc))


@dataclass
class BlowupReport:
    radii: np.ndarray
    sup_norm: np.ndarray
    slope: float
    intercept: float
    bounded: bool
    message: str


def sup_gradient_norm(s: FlowSolution, r: float, n_theta: int = 256,
                      domain: ConeDomain | None = None) -> float:
    d = domain if domain is not None else ConeDomain.half_plane()
    if d.is_full_plane:
        th = np.linspace(0, 2 * math.pi, n_theta, endpoint=False)
    else:
        th = np.linspace(d.alpha, d.beta, n_theta)
    return float(np.max(operator_norm_2x2(s.grad_u(np.full_like(th, r), th))))


def blowup_profile(s: FlowSolution, radii, n_theta: int = 256,
                   domain: ConeDomain | None = None) -> BlowupReport:
    """Sup over angles of ``|grad u|`` at each radius and its affine fit in ``|ln r|``."""
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(radii >= 1):
        raise ValueError("radii must lie in (0, 1)")
    sup = np.array([sup_gradient_norm(s, r, n_theta, domain) for r in radii])
    L = np.abs(np.log(radii))
    X = np.column_stack([L, np.ones_like(L)])
    (slope, icpt), *_ = np.linalg.lstsq(X, sup, rcond=None)
    singular = isinstance(s, RotLog) and s.C2 != 0 or s.gradient_singular_at_apex
    spread = float(sup.max() - sup.min())
    bounded = not singular
    if bounded:
        msg = f"no blow-up: gradient bounded (sup in [{sup.min():.6g}, {sup.max():.6g}])"
    else:
        msg = f"gradient grows like {slope:.6g} |ln r| + {icpt:.6g}"
    if bounded and spread > 1e-9 * max(1.0, float(sup.max())):
        msg += f"; variation {spread:.3g} across radii"
    return BlowupReport(radii, sup, float(slope), float(icpt), bounded, msg)


# -- Hoelder decay at the apex --------------------------------------------------------

@dataclass
class HolderReport:
    gamma: float
    radii: np.ndarray
    ratio: np.ndarray
    envelope: np.ndarray | None
    tail_decreasing: bool
    certificate_radius: float | None
    verdict: str


def sup_speed(s: FlowSolution, r: float, n_theta: int = 256,
              domain: ConeDomain | None = None) -> float:
    d = domain if domain is not None else ConeDomain.half_plane()
    if d.is_full_plane:
        th = np.linspace(0, 2 * math.pi, n_theta, endpoint=False)
    else:
        th = np.linspace(d.alpha, d.beta, n_theta)
    u1, u2 = s.u(np.full_like(th, r), th)
    return float(np.max(np.hypot(u1, u2)))


def holder_check(s: FlowSolution, gamma: float, radii, n_theta: int = 256,
                 domain: ConeDomain | None = None) -> HolderReport:
    """Table of ``sup_theta |u| / r**gamma`` and whether it decays toward the apex.

    This is a sampled certificate, not a proof. For the logarithmic swirl the
    exact envelope ``r**(1-gamma) |C1 + C2 ln r|`` is reported together with
    the radius below which it decreases monotonically to zero.
    """
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(radii >= 1) or np.any(np.diff(radii) >= 0):
        raise ValueError("radii must be decreasing in (0, 1)")
    ratio = np.array([sup_speed(s, r, n_theta, domain) for r in radii]) / radii**gamma
    half = ratio[len(ratio) // 2:]
    tail_dec = bool(np.all(np.diff(half) <= 1e-15 * np.abs(half[:-1]) + 0.0))
    envelope, cert = None, None
    if isinstance(s, RotLog):
        envelope = radii ** (1 - gamma) * np.abs(s.C1 + s.C2 * np.log(radii))
        if s.C2 != 0:
            # d/dL [e^{(1-gamma)L} |C1 + C2 L|] has fixed sign once L < L*
            L_star = -s.C1 / s.C2 - 1.0 / (1 - gamma)
            cert = math.exp(L_star) if L_star > -700 else 0.0
        else:
            cert = 1.0
    if cert is not None:
        if tail_dec and ratio[-1] < ratio[0]:
            verdict = "decays"
        else:
            verdict = "eventually decays" if cert > 0 else "fails"
    else:
        verdict = "decays" if tail_dec and ratio[-1] < ratio[0] else "fails"
    return HolderReport(gamma, radii, ratio, envelope, tail_dec, cert, verdict)


# -- sampling ----------------------------------------------------------------------------

def sample_field(s: FlowSolution, g: GridSpec) -> dict:
    """Arrays ``x, y, u1, u2, p, w`` over the grid; singular points become NaN."""
    R, T = g.mesh()
    R, T = R.ravel(), T.ravel()
    out = {"x": R * np.cos(T), "y": R * np.sin(T)}
    with np.errstate(all="ignore"):
        u1, u2 = s.u(R, T)
        out["u1"], out["u2"] = np.asarray(u1, float), np.asarray(u2, float)
        out["p"] = np.asarray(s.p(R, T), float)
        try:
            out["w"] = np.asarray(s.w(R, T), float)
        except SingularPointError:
            w = np.full(R.shape, np.nan)
            ok = R > 0
            w[ok] = s.w(R[ok], T[ok])
            out["w"] = w
    out["r"], out["theta"] = R, T
    return out


def sampled_residual(radii, angles, u1, u2, p=None, periodic: bool = False, trim: int = 2):
    """Relative divergence and momentum residuals of data on a polar tensor grid.

    Derivatives come from cubic splines along each grid direction (periodic in
    theta for full-plane data). The outer ``trim`` rows and columns, where the
    spline end conditions dominate, are left out of the maxima.
    """
    from scipy.interpolate import CubicSpline

    r = np.asarray(radii, float)
    t = np.asarray(angles, float)

    def along_r(F):
        cs = CubicSpline(r, F, axis=0)
        return cs(r, 1), cs(r, 2)

    def along_t(F):
        if periodic:
            cs = CubicSpline(np.append(t, t[0] + 2 * math.pi),
                             np.concatenate([F, F[:, :1]], axis=1), axis=1, bc_type="periodic")
        else:
            cs = CubicSpline(t, F, axis=1)
        return cs(t, 1), cs(t, 2)

    R, T = np.meshgrid(r, t, indexing="ij")
    c, s = np.cos(T), np.sin(T)
    out = {}
    dx, dy, lap = {}, {}, {}
    fields_ = (("u1", u1), ("u2", u2)) + ((("p", p),) if p is not None else ())
    for name, F in fields_:
        Fr, Frr = along_r(np.asarray(F, float))
        Ft, Ftt = along_t(np.asarray(F, float))
        dx[name] = c * Fr - s / R * Ft
        dy[name] = s * Fr + c / R * Ft
        lap[name] = Frr + Fr / R + Ftt / R**2
    div = dx["u1"] + dy["u2"]
    speed = np.hypot(u1, u2)
    rs = slice(trim, len(r) - trim)
    ts = slice(None) if periodic else slice(trim, len(t) - trim)
    ref_div = _rms_all(speed / R)
    out["div"] = float(np.abs(div[rs, ts]).max() / ref_div) if ref_div > 0 else 0.0
    if p is None:
        return out
    m1 = -lap["u1"] + u1 * dx["u1"] + u2 * dy["u1"] + dx["p"]
    m2 = -lap["u2"] + u1 * dx["u2"] + u2 * dy["u2"] + dy["p"]
    ref_mom = _rms_all(speed**2 / R + speed / R**2 + np.hypot(dx["p"], dy["p"]))
    mom = np.hypot(m1, m2)[rs, ts]
    out["momentum"] = float(mom.max() / ref_mom) if ref_mom > 0 else 0.0
    return out


def _rms_all(a) -> float:
    return float(np.sqrt(np.mean(np.square(a))))
