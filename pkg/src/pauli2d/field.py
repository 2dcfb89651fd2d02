"""Magnetic-field models, flux decomposition and radial potentials.

A radial field b(r) determines the normalized flux alpha = int_0^inf b r dr,
the scalar potential

    h(r) = -log r * int_0^r b t dt - int_r^inf b t log t dt,

which solves -Delta h = B, and the angular components of three vector
potentials: A_h = (d2 h, -d1 h), the Poincare gauge A_p, and the reference
potential A_0 whose angular part is alpha for r < 1 and alpha/r beyond.  For
radial fields A_h = A_p and the gauge correction vanishes, so everything here
reduces to one cumulative integral of b t dt and one of b t log t dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

R_TAIL_CAP = 1.0e4
_INTEGER_FLUX_TOL = 1e-9


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class RadialField:
    """A radial magnetic-field profile with decay metadata."""

    profile: Callable[[float], float]
    rho: float
    kind: str
    params: tuple = ()
    support_radius: float | None = None

    @staticmethod
    def gaussian(alpha0: float) -> "RadialField":
        """b(r) = 2*alpha0*exp(-r^2); total flux exactly alpha0."""
        return RadialField(
            profile=lambda r: 2.0 * alpha0 * math.exp(-(r * r)),
            rho=8.0,
            kind="gaussian",
            params=(alpha0,),
        )

    @staticmethod
    def power_tail(c: float, rho: float) -> "RadialField":
        """b(r) = c*(1+r^2)^(-rho/2); flux c/(rho-2) for rho > 2."""
        if rho <= 2.0:
            raise FieldError("power_tail requires rho > 2 (flux diverges otherwise)")
        return RadialField(
            profile=lambda r: c * (1.0 + r * r) ** (-rho / 2.0),
            rho=rho,
            kind="power_tail",
            params=(c, rho),
        )

    @staticmethod
    def compact_bump(c: float, r0: float) -> "RadialField":
        """Smooth bump supported in r < r0."""

        def b(r: float) -> float:
            x = r / r0
            if x >= 1.0:
                return 0.0
            return c * math.exp(-1.0 / (1.0 - x * x))

        return RadialField(profile=b, rho=8.0, kind="compact_bump",
                           params=(c, r0), support_radius=r0)

    @staticmethod
    def tabulated(r: np.ndarray, b: np.ndarray, rho: float | None = None) -> "RadialField":
        r = np.asarray(r, dtype=float)
        b = np.asarray(b, dtype=float)
        if r.size < 64:
            raise FieldError("tabulated profiles need at least 64 samples")
        if not np.all(np.diff(r) > 0):
            raise FieldError("tabulated radii must be strictly increasing")
        spline = CubicSpline(r, b)
        # power-law extension fitted to the final decade
        mask = r >= r[-1] / 10.0
        rr, bb = r[mask], np.abs(b[mask])
        good = bb > 0
        if rho is None:
            if good.sum() >= 2:
                slope = np.polyfit(np.log(rr[good]), np.log(bb[good]), 1)[0]
                rho = max(2.5, -slope)
            else:
                rho = 8.0
        c_ext = b[-1] * r[-1] ** rho

        def prof(x: float) -> float:
            if x <= r[-1]:
                return float(spline(max(x, r[0])))
            return c_ext * x ** (-rho)

        return RadialField(profile=prof, rho=float(rho), kind="tabulated",
                           params=(r[0], r[-1]))

    @staticmethod
    def from_file(path: str) -> "RadialField":
        """Two whitespace-separated columns 'r b(r)'; '#' starts a comment."""
        rs, bs = [], []
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise FieldError("malformed profile line: %r" % line)
                rs.append(float(parts[0]))
                bs.append(float(parts[1]))
        return RadialField.tabulated(np.array(rs), np.array(bs))

    def scaled(self, c: float) -> "RadialField":
        base = self.profile
        return RadialField(profile=lambda r: c * base(r), rho=self.rho,
                           kind=self.kind + "_scaled", params=self.params + (c,),
                           support_radius=self.support_radius)

    def tail_radius(self) -> float:
        """Radius beyond which the remaining flux is below 1e-10."""
        if self.support_radius is not None:
            return self.support_radius
        r = 4.0
        while r < R_TAIL_CAP:
            # |int_r^inf b t dt| <= |b(r)| r^2 / (rho - 2) for the assumed decay
            if abs(self.profile(r)) * r * r / max(self.rho - 2.0, 1.0) < 1e-12:
                return r
            r *= 1.5
        return R_TAIL_CAP

    def check_decay(self, n_samples: int = 64) -> None:
        """Sampled check of |b(r)| <= C (1+r^2)^(-rho/2) with rho > 2."""
        if self.rho <= 2.0:
            raise FieldError("decay exponent must satisfy rho > 2")
        rs = np.geomspace(0.1, max(10.0, self.tail_radius()), n_samples)
        vals = np.array([abs(self.profile(r)) for r in rs])
        bound = (1.0 + rs**2) ** (-self.rho / 2.0)
        scale = max(abs(self.profile(0.0)), vals.max(), 1e-30)
        if np.any(vals > 1e6 * scale * bound + 1e-300):
            raise FieldError("profile decays slower than the declared rho")


@dataclass(frozen=True)
class FluxData:
    alpha: float
    n: int
    alpha_prime: float
    mu: float
    is_integer: bool

    @staticmethod
    def from_alpha(alpha: float) -> "FluxData":
        dist = abs(alpha - round(alpha))
        is_int = dist < _INTEGER_FLUX_TOL
        if is_int:
            a_int = int(round(alpha))
            if a_int == 0:
                n = 0
            elif a_int > 0:
                n = a_int - 1
            else:
                n = a_int + 1
            alpha_prime = float(a_int - n)
            alpha = float(a_int)
        else:
            if alpha > 0:
                n = int(math.floor(alpha))
            else:
                n = -int(math.floor(-alpha))
            alpha_prime = alpha - n
        mu = abs(alpha - round(alpha))
        return FluxData(alpha=alpha, n=n, alpha_prime=alpha_prime,
                        mu=min(mu, 0.5) if mu <= 0.5 else 0.5, is_integer=is_int)


def flux(fld: RadialField) -> FluxData:
    """Normalized flux alpha = int_0^inf b(r) r dr, then its decomposition."""
    fld.check_decay()
    R = fld.tail_radius()
    val, est = quad(lambda r: fld.profile(r) * r, 0.0, R, limit=200,
                    epsabs=1e-12, epsrel=1e-12)
    # analytic tail bound from the decay assumption
    tail = abs(fld.profile(R)) * R * R / max(fld.rho - 2.0, 1.0)
    if est + tail > 1e-6 * max(1.0, abs(val)):
        raise FieldError("flux quadrature did not converge")
    return FluxData.from_alpha(val)


class PotentialData:
    """Scalar potential h and the angular components a_h, a_p, a_0.

    Immutable after construction; evaluators accept scalars or arrays.
    For radial fields theta_1 = theta_2 = 0 and the gauge correction chi
    vanishes identically.
    """

    theta1 = 0.0
    theta2 = 0.0
    chi_is_zero = True

    def __init__(self, fld: RadialField, n_grid: int = 6000):
        self.field = fld
        self.alpha = flux(fld).alpha
        R = max(fld.tail_radius(), 16.0)
        self._R = R
        # composite grid, denser near zero
        r = np.concatenate([
            np.geomspace(1e-8, 0.1, n_grid // 6),
            np.linspace(0.1, min(4.0, R), n_grid // 2)[1:],
        ])
        if R > 4.0:
            r = np.concatenate([r, np.geomspace(4.0, R, n_grid // 3)[1:]])
        b = np.array([fld.profile(x) for x in r])
        bt = CubicSpline(r, b * r)
        self._F = bt.antiderivative()  # int_0^r b t dt  (from r[0]; head below)
        self._head = quad(lambda t: fld.profile(t) * t, 0.0, r[0])[0]
        btlog = CubicSpline(r, b * r * np.log(r))
        self._T = btlog.antiderivative()
        self._head_T = quad(lambda t: fld.profile(t) * t * math.log(t)
                            if t > 0 else 0.0, 0.0, r[0])[0]
        self._T_total = self._T(R) + self._head_T
        self._r0 = r[0]

    def cumulative_flux(self, r):
        """F(r) = int_0^r b t dt."""
        r = np.asarray(r, dtype=float)
        out = np.where(r >= self._R, self.alpha,
                       self._head + self._F(np.clip(r, self._r0, self._R)))
        out = np.where(r < self._r0, self._head * (r / self._r0) ** 2, out)
        return out if out.ndim else float(out)

    def h(self, r):
        r = np.asarray(r, dtype=float)
        rc = np.clip(r, self._r0, self._R)
        tail = self._T_total - (self._T(rc) + self._head_T)
        out = -np.log(rc) * self.cumulative_flux(rc) - tail
        # beyond the grid h(r) = -alpha log r up to the vanishing tail
        out = np.where(r > self._R, -self.alpha * np.log(np.maximum(r, 1e-300)), out)
        # below the grid h is flat (F ~ r^2 kills the log)
        out = np.where(r < self._r0, -self._T_total, out)
        return out if out.ndim else float(out)

    def a_h(self, r):
        """Angular component of A_h = (d2 h, -d1 h); equals -h'(r) = F(r)/r."""
        r = np.asarray(r, dtype=float)
        out = self.cumulative_flux(r) / np.maximum(r, 1e-300)
        return out if out.ndim else float(out)

    # Poincare gauge: identical to a_h for radial fields, kept as a separate
    # evaluator so the agreement can be asserted.
    a_p = a_h

    def a_0(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r < 1.0, self.alpha, self.alpha / np.maximum(r, 1e-300))
        return out if out.ndim else float(out)


def potential_h(fld: RadialField, r: float) -> float:
    """h(r) by direct adaptive quadrature (slow path, used as an oracle)."""
    if r <= 0:
        raise FieldError("potential_h requires r > 0")
    R = fld.tail_radius()
    inner, _ = quad(lambda t: fld.profile(t) * t, 0.0, r, limit=200)
    if r < R:
        outer, _ = quad(lambda t: fld.profile(t) * t * math.log(t), r, R,
                        limit=200, points=[1.0] if r < 1.0 < R else None)
    else:
        outer = 0.0
    return -math.log(r) * inner - outer


def vector_potentials(fld: RadialField) -> PotentialData:
    return PotentialData(fld)


def poincare_z(b_polar: Callable[[float, float], float], theta: float,
               r_max: float = 50.0) -> float:
    """z(theta) = int_0^inf B(s, theta) s ds for a general (non-radial) field."""
    val, _ = quad(lambda s: b_polar(s, theta) * s, 0.0, r_max, limit=200)
    return val


def parse_field_spec(spec: str) -> RadialField:
    """Parse 'gaussian:2.5', 'power:1.0,6', 'bump:2.0,3.0' into a field."""
    name, _, rest = spec.partition(":")
    args = [float(x) for x in rest.split(",")] if rest else []
    if name == "gaussian" and len(args) == 1:
        return RadialField.gaussian(args[0])
    if name in ("power", "power_tail") and len(args) == 2:
        return RadialField.power_tail(args[0], args[1])
    if name in ("bump", "compact_bump") and len(args) == 2:
        return RadialField.compact_bump(args[0], args[1])
    raise FieldError("unknown field spec %r" % spec)
