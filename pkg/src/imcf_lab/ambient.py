"""Rotationally symmetric ambient 3-metrics g = dr^2 + lambda(r)^2 sigma.

A profile is the warp function lambda together with its first two derivatives.
Four kinds are supported:

* ``hyperbolic``  -- lambda = sinh(r), the constant-curvature model.
* ``adss``        -- anti-de Sitter Schwarzschild with mass m: the warp solves
                     lambda' = sqrt(1 + lambda^2 - 2 m / lambda).
* ``mass_aspect`` -- same ODE with a radially varying mass m(s); coordinate
                     spheres of area radius s then have Hawking mass m(s), and
                     the scalar curvature is R = -6 + 4 m'(s)/s^2, so the floor
                     R >= -6 is exactly monotonicity of m.
* ``tabulated``   -- cubic spline (not-a-knot) through sampled lambda values.

For the ODE-backed kinds the map r <-> s (= lambda) is built once from a
high-accuracy integration of dr/ds = 1 / sqrt(1 + s^2 - 2 m(s)/s); given s, the
derivatives lambda' and lambda'' follow exactly from the ODE:

    lambda'  = sqrt(1 + s^2 - 2 m(s)/s)
    lambda'' = s + m(s)/s^2 - m'(s)/s

Curvature of the warped product:

    Rc(nu,nu) = -2 lambda''/lambda            (radial direction)
    K12       = (1 - lambda'^2)/lambda^2      (tangent to coordinate spheres)
    R         = 2 K12 + 2 Rc(nu,nu)           = 2(1-lambda'^2)/lambda^2 - 4 lambda''/lambda
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import DomainError, ProfileError

_DOMAIN_SLACK = 1e-10


@dataclass(frozen=True)
class CurvatureSample:
    """Ambient curvatures sampled in the coordinate-sphere frame."""

    R: np.ndarray
    Rc_nn: np.ndarray
    K12: np.ndarray


@dataclass(frozen=True)
class ProfileReport:
    """Result of a dense radial scan of a profile (report-only)."""

    kind: str
    n_samples: int
    min_R: float
    r_at_min_R: float
    min_lambda: float
    min_dlambda: float
    r_floor_ok: bool
    positivity_ok: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.r_floor_ok and self.positivity_ok


class AmbientProfile:
    """Base class; subclasses provide ``warp`` and the r <-> s maps."""

    kind: str = "abstract"

    def __init__(self, r_domain: tuple[float, float]):
        lo, hi = float(r_domain[0]), float(r_domain[1])
        if not lo < hi:
            raise ProfileError(f"empty radial domain [{lo}, {hi}]")
        self.r_domain = (lo, hi)

    # -- interface ---------------------------------------------------------

    def _warp_raw(self, r: np.ndarray):
        raise NotImplementedError

    def radius_from_area_radius(self, s):
        """Inverse warp: the r with lambda(r) = s."""
        raise NotImplementedError

    def mass_function(self, s):
        """Mass aspect m(s) = (s/2)(1 + s^2 - lambda'^2)."""
        s = np.asarray(s, dtype=float)
        r = self.radius_from_area_radius(s)
        _, dlam, _ = self.warp(r)
        return 0.5 * s * (1.0 + s * s - dlam * dlam)

    # -- shared operations ---------------------------------------------------

    def check_domain(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        lo, hi = self.r_domain
        slack = _DOMAIN_SLACK * max(1.0, abs(lo), abs(hi))
        if np.any(r < lo - slack) or np.any(r > hi + slack):
            bad = r[(r < lo - slack) | (r > hi + slack)]
            raise DomainError(
                f"radius {np.min(bad):.6g} outside profile domain [{lo:.6g}, {hi:.6g}]"
            )
        return np.clip(r, lo, hi)

    def warp(self, r):
        """(lambda, lambda', lambda'') at r, domain-checked."""
        r = self.check_domain(r)
        lam, dlam, d2lam = self._warp_raw(r)
        if np.any(lam <= 0.0) or np.any(dlam <= 0.0):
            raise ProfileError(
                f"{self.kind} profile loses positivity: min lambda "
                f"{np.min(lam):.3g}, min lambda' {np.min(dlam):.3g}"
            )
        return lam, dlam, d2lam

    def _k12_raw(self, r, lam, dlam):
        # overridden where erasing the cancellation in 1 - lambda'^2 is possible
        return (1.0 - dlam * dlam) / (lam * lam)

    def warp_curvature(self, r):
        """One-pass (lambda, lambda', lambda'', R, Rc_rr, K12) at r."""
        r = self.check_domain(r)
        lam, dlam, d2lam = self._warp_raw(r)
        if np.any(lam <= 0.0) or np.any(dlam <= 0.0):
            raise ProfileError(
                f"{self.kind} profile loses positivity: min lambda "
                f"{np.min(lam):.3g}, min lambda' {np.min(dlam):.3g}"
            )
        k12 = self._k12_raw(r, lam, dlam)
        rc = -2.0 * d2lam / lam
        return lam, dlam, d2lam, 2.0 * k12 + 2.0 * rc, rc, k12

    def curvature(self, r) -> CurvatureSample:
        _, _, _, R, rc_nn, k12 = self.warp_curvature(r)
        return CurvatureSample(R=R, Rc_nn=rc_nn, K12=k12)

    @property
    def s_domain(self) -> tuple[float, float]:
        lam_lo, _, _ = self.warp(self.r_domain[0])
        lam_hi, _, _ = self.warp(self.r_domain[1])
        return (float(lam_lo), float(lam_hi))


class HyperbolicProfile(AmbientProfile):
    """Hyperbolic 3-space: lambda(r) = sinh(r)."""

    kind = "hyperbolic"

    def __init__(self, r_domain: tuple[float, float] = (1e-6, 25.0)):
        super().__init__(r_domain)

    def _warp_raw(self, r):
        return np.sinh(r), np.cosh(r), np.sinh(r)

    def _k12_raw(self, r, lam, dlam):
        # 1 - cosh^2 = -sinh^2 exactly
        return np.full_like(lam, -1.0)

    def radius_from_area_radius(self, s):
        s = np.asarray(s, dtype=float)
        return np.arcsinh(s)


class _OdeWarpProfile(AmbientProfile):
    """Warp built from a mass aspect m(s) by integrating dr/ds = 1/lambda'."""

    def __init__(
        self,
        m_func: Callable,
        dm_func: Callable,
        s_domain: tuple[float, float],
        n_samples: int = 4001,
    ):
        s_lo, s_hi = float(s_domain[0]), float(s_domain[1])
        if not 0.0 < s_lo < s_hi:
            raise ProfileError(f"invalid area-radius domain [{s_lo}, {s_hi}]")
        self._m = m_func
        self._dm = dm_func

        # quadratic grading toward s_lo keeps the r-samples near-uniform when
        # the domain floor sits close to a horizon (lambda' -> 0)
        u = np.linspace(0.0, 1.0, n_samples)
        s_grid = s_lo + (s_hi - s_lo) * u * u
        s_grid[0], s_grid[-1] = s_lo, s_hi
        sq = self._dlam_sq(s_grid)
        if np.min(sq) <= 0.0:
            raise ProfileError(
                "1 + s^2 - 2 m(s)/s <= 0 inside the domain (horizon crossed)"
            )
        sol = solve_ivp(
            lambda s, r: 1.0 / np.sqrt(self._dlam_sq(s)),
            (s_lo, s_hi),
            [0.0],
            t_eval=s_grid,
            rtol=1e-12,
            atol=1e-14,
            method="DOP853",
        )
        if not sol.success:
            raise ProfileError(f"warp ODE integration failed: {sol.message}")
        r_grid = sol.y[0]
        self._s_of_r = CubicSpline(r_grid, s_grid, bc_type="not-a-knot")
        self._r_of_s_guess = PchipInterpolator(s_grid, r_grid)
        super().__init__((0.0, float(r_grid[-1])))

    def _dlam_sq(self, s):
        s = np.asarray(s, dtype=float)
        return 1.0 + s * s - 2.0 * self._m(s) / s

    def _warp_raw(self, r):
        s = self._s_of_r(r)
        dlam = np.sqrt(self._dlam_sq(s))
        d2lam = s + self._m(s) / (s * s) - self._dm(s) / s
        return s, dlam, d2lam

    def _k12_raw(self, r, lam, dlam):
        # 1 - lambda'^2 = 2 m(s)/s - s^2 exactly along the warp ODE
        return 2.0 * self._m(lam) / lam**3 - 1.0

    def radius_from_area_radius(self, s):
        s = np.asarray(s, dtype=float)
        lo, hi = self.s_domain
        slack = _DOMAIN_SLACK * max(1.0, hi)
        if np.any(s < lo - slack) or np.any(s > hi + slack):
            raise DomainError(
                f"area radius outside [{lo:.6g}, {hi:.6g}]"
            )
        r = np.asarray(self._r_of_s_guess(np.clip(s, lo, hi)), dtype=float)
        r = np.clip(r, self.r_domain[0], self.r_domain[1])
        # polish against the same spline the warp evaluates, so the
        # round trip s -> r -> lambda(r) closes at machine precision
        for _ in range(3):
            cur = self._s_of_r(r)
            r = r - (cur - s) / np.sqrt(self._dlam_sq(cur))
            r = np.clip(r, self.r_domain[0], self.r_domain[1])
        return r


class AdSSProfile(_OdeWarpProfile):
    """Anti-de Sitter Schwarzschild with constant mass m > 0."""

    kind = "adss"

    def __init__(self, m: float, s_domain: tuple[float, float] | None = None):
        if m <= 0.0:
            raise ProfileError("AdSS mass must be positive")
        self.m = float(m)
        if s_domain is None:
            s_domain = (1.02 * horizon_radius(m), max(20.0, 10.0 * horizon_radius(m)))
        m_arr = lambda s: np.full_like(np.asarray(s, dtype=float), self.m)
        dm_arr = lambda s: np.zeros_like(np.asarray(s, dtype=float))
        super().__init__(m_arr, dm_arr, s_domain)


class MassAspectProfile(_OdeWarpProfile):
    """Radially varying mass aspect; monotone m(s) keeps R >= -6."""

    kind = "mass_aspect"

    def __init__(
        self,
        m_func: Callable,
        dm_func: Callable,
        s_domain: tuple[float, float],
    ):
        super().__init__(m_func, dm_func, s_domain)

    @classmethod
    def from_points(cls, s_points, m_points) -> "MassAspectProfile":
        """Shape-preserving (PCHIP) spline through tabulated (s, m) pairs."""
        s_points = np.asarray(s_points, dtype=float)
        m_points = np.asarray(m_points, dtype=float)
        if len(s_points) < 2 or np.any(np.diff(s_points) <= 0):
            raise ProfileError("mass-aspect points need strictly increasing s")
        spline = PchipInterpolator(s_points, m_points)
        dspline = spline.derivative()
        return cls(spline, dspline, (float(s_points[0]), float(s_points[-1])))


class TabulatedProfile(AmbientProfile):
    """Cubic spline (not-a-knot) through sampled lambda(r) values."""

    kind = "tabulated"

    def __init__(self, r_nodes, lam_values):
        r_nodes = np.asarray(r_nodes, dtype=float)
        lam_values = np.asarray(lam_values, dtype=float)
        if len(r_nodes) < 4 or np.any(np.diff(r_nodes) <= 0):
            raise ProfileError("tabulated profile needs >= 4 strictly increasing radii")
        if np.any(lam_values <= 0) or np.any(np.diff(lam_values) <= 0):
            raise ProfileError("tabulated lambda must be positive and increasing")
        self._spline = CubicSpline(r_nodes, lam_values, bc_type="not-a-knot")
        self._dspline = self._spline.derivative()
        self._d2spline = self._dspline.derivative()
        super().__init__((float(r_nodes[0]), float(r_nodes[-1])))

    def _warp_raw(self, r):
        return self._spline(r), self._dspline(r), self._d2spline(r)

    def radius_from_area_radius(self, s):
        s = np.asarray(s, dtype=float)
        lo, hi = self.r_domain
        grid = np.linspace(lo, hi, 2048)
        r = np.interp(s, self._spline(grid), grid)
        for _ in range(4):
            r = np.clip(r - (self._spline(r) - s) / self._dspline(r), lo, hi)
        return r


def horizon_radius(m: float) -> float:
    """Area radius where 1 - 2m/s + s^2 vanishes (s^3 + s = 2m)."""
    roots = np.roots([1.0, 0.0, 1.0, -2.0 * m])
    real = roots[np.abs(roots.imag) < 1e-12].real
    pos = real[real > 0]
    if len(pos) == 0:
        raise ProfileError(f"no horizon for m = {m}")
    return float(pos[0])


# -- module-level operations ---------------------------------------------------


def warp_eval(profile: AmbientProfile, r):
    """Warp value and first two derivatives at radius r."""
    return profile.warp(r)


def curvature_sample(profile: AmbientProfile, r) -> CurvatureSample:
    """Scalar, radial Ricci and sphere-tangent sectional curvature at r."""
    return profile.curvature(r)


def validate_profile(
    profile: AmbientProfile, tol: float = 1e-8, n_samples: int = 512
) -> ProfileReport:
    """Dense radial scan for the scalar-curvature floor and warp positivity."""
    lo, hi = profile.r_domain
    inset = 1e-9 * (hi - lo)
    r = np.linspace(lo + inset, hi - inset, n_samples)
    lam, dlam, d2lam = profile._warp_raw(r)
    R = 2.0 * profile._k12_raw(r, lam, dlam) - 4.0 * d2lam / lam
    i = int(np.argmin(R))
    return ProfileReport(
        kind=profile.kind,
        n_samples=n_samples,
        min_R=float(R[i]),
        r_at_min_R=float(r[i]),
        min_lambda=float(np.min(lam)),
        min_dlambda=float(np.min(dlam)),
        r_floor_ok=bool(R[i] >= -6.0 - tol),
        positivity_ok=bool(np.min(lam) > 0 and np.min(dlam) > 0),
        tol=tol,
    )
