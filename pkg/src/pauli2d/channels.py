"""Per-angular-momentum building blocks of the zero-energy Green's function.

For the reference operator with angular potential a_0(r) (= alpha inside the
unit disk, alpha/r outside) the channel-m radial problem has the regular and
singular confluent-hypergeometric solutions

    v_m(lam, r) = e^{-kappa r} (2 kappa r)^{|m|} M(a, 1+2|m|, 2 kappa r)
    u_m(lam, r) = e^{-kappa r} (2 kappa r)^{|m|} U(a, 1+2|m|, 2 kappa r)

with kappa = sqrt(alpha^2 - lam) and a = 1/2 + |m| - m*alpha/kappa.  All the
boundary constants at r = 1 (a_m, a'_m, b_m, b'_m and the derived delta_m,
beta_m, gamma_m), the zero-energy kernel G_{m,0}, its integer-flux variant on
the channel m = alpha, and the lambda-series data sigma_m, q_m, p_m live here.

Sign caution: the cross product a_m b'_m - a'_m b_m equals
-Gamma(1+2|m|)/Gamma(a); some printed versions carry the opposite sign, which
would break the continuity of h_m across r = 1.  The minus branch is verified
numerically in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pauli2d.backend import core
from pauli2d.field import FluxData

NEAR_INTEGER_GUARD = 1e-3


class BranchError(ValueError):
    """alpha too close to an integer for the non-integer formulas."""


# ---------------------------------------------------------------------------
# radial quadrature grid

def gauss_legendre_panels(breaks, per_panel: int):
    xs, ws = np.polynomial.legendre.leggauss(per_panel)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append(mid + half * xs)
        weights.append(half * ws)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True)
class RadialGrid:
    """Quadrature nodes/weights for integrals int f(r) r dr with r=1 a panel edge."""

    nodes: np.ndarray
    weights: np.ndarray
    split_index: int
    truncation_R: float
    weight_exponent_s: float

    @staticmethod
    def default(R: float = 40.0, s: float = 3.5, inner_panels: int = 6,
                per_panel: int = 8, outer_panels: int = 10) -> "RadialGrid":
        inner_breaks = np.linspace(0.0, 1.0, inner_panels + 1)
        outer_breaks = np.geomspace(1.0, R, outer_panels + 1)
        n1, w1 = gauss_legendre_panels(inner_breaks, per_panel)
        n2, w2 = gauss_legendre_panels(outer_breaks, per_panel)
        return RadialGrid(nodes=np.concatenate([n1, n2]),
                          weights=np.concatenate([w1, w2]),
                          split_index=len(n1), truncation_R=R,
                          weight_exponent_s=s)

    @property
    def r_weights(self) -> np.ndarray:
        """Weights for int f(r) r dr."""
        return self.weights * self.nodes

    def integrate(self, f_vals: np.ndarray) -> float | complex:
        return np.sum(self.r_weights * f_vals, axis=-1)

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """2*pi int f conj(g) r dr -- the L^2(R^2) pairing of one channel."""
        return 2.0 * math.pi * np.sum(self.r_weights * f * np.conj(g))

    def sobolev_weight(self) -> np.ndarray:
        return (1.0 + self.nodes**2) ** (-self.weight_exponent_s / 2.0)


def weighted_hs_norm(kernel: np.ndarray, grid: RadialGrid) -> float:
    """Discrete Hilbert-Schmidt norm of <r>^-s K <t>^-s on the grid."""
    w = grid.r_weights * grid.sobolev_weight() ** 2
    return float(np.sqrt(np.einsum("i,ij,j->", w, np.abs(kernel) ** 2, w).real))


# ---------------------------------------------------------------------------
# scalar/vector evaluation helpers

def _kummer_vec(a: float, b: float, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    core.kummer_m_array(a, b, np.ascontiguousarray(z), out)
    return out


def _hyperu_vec(a: float, b: float, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    core.hyperu_array(a, b, np.ascontiguousarray(z), out)
    return out


def f_nu_vec(nu: float, z: np.ndarray) -> np.ndarray:
    z = np.ascontiguousarray(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    core.f_nu_array(nu, z, out)
    return out


class Channel:
    """Zero-energy data and evaluators for one angular momentum m."""

    def __init__(self, m: int, alpha: float):
        if alpha == 0.0:
            raise ValueError("channel formulas require alpha != 0")
        self.m = int(m)
        self.alpha = float(alpha)
        self.nu = abs(m - alpha)
        self.abs_m = abs(self.m)
        self.b_kummer = 1.0 + 2.0 * self.abs_m
        self.sign_alpha = 1.0 if alpha > 0 else -1.0
        if self.nu < NEAR_INTEGER_GUARD:
            raise BranchError(
                "channel m=%d coincides with alpha=%g; use IntegerChannel" % (m, alpha))
        # boundary constants at r = 1
        self.a_m = float(self.v(1.0))
        self.a1_m = float(self.vp(1.0))
        self.b_m = float(self.u(1.0))
        self.b1_m = float(self.up(1.0))
        den = self.a1_m + self.nu * self.a_m
        self.gamma_m = 1.0 / den
        self.delta_m = (self.a1_m - self.nu * self.a_m) / den
        self.beta_m = (self.b1_m + self.nu * self.b_m) / den
        # fractional-power series data exists only away from integer nu
        self.has_series_data = abs(self.nu - round(self.nu)) >= NEAR_INTEGER_GUARD
        if self.has_series_data:
            self.sigma0 = -self.delta_m * core.gamma_real(1.0 - self.nu) \
                * core.rgamma(1.0 + self.nu)
            self.q_m = (4.0 ** (-self.nu) * self.a_m
                        / (2.0 * core.gamma_real(2.0 + self.nu) * self.scriptP1(0.0)))
            self.kappa_m = -(4.0 ** (-self.nu)) * np.exp(-1j * math.pi * self.nu)
            self.p0 = self.kappa_m * self.sigma0
            # independent path for sigma_m(0), kept for the consistency test
            self.sigma0_series = self.sigma(0.0)

    # -- confluent-hypergeometric solutions -----------------------------------

    def kummer_a(self, lam: float = 0.0) -> float:
        kap = math.sqrt(self.alpha**2 - lam)
        return 0.5 + self.abs_m - self.m * self.alpha / kap

    def _vu_parts(self, lam: float, r):
        kap = math.sqrt(self.alpha**2 - lam)
        r = np.asarray(r, dtype=float)
        z = 2.0 * kap * r
        pref = np.exp(-0.5 * z) * z**self.abs_m
        return kap, z, pref

    def v(self, r, lam: float = 0.0):
        kap, z, pref = self._vu_parts(lam, r)
        a = self.kummer_a(lam)
        out = pref * _kummer_vec(a, self.b_kummer, np.atleast_1d(z))
        return out if np.ndim(r) else float(out[0])

    def vp(self, r, lam: float = 0.0):
        """d/dr of v_m(lam, .)."""
        kap, z, pref = self._vu_parts(lam, r)
        a = self.kummer_a(lam)
        z1 = np.atleast_1d(z)
        mval = _kummer_vec(a, self.b_kummer, z1)
        mval1 = _kummer_vec(a + 1.0, self.b_kummer + 1.0, z1)
        dz = pref * ((-0.5 + self.abs_m / np.where(z1 > 0, z1, 1.0)) * mval
                     + (a / self.b_kummer) * mval1)
        out = 2.0 * kap * dz
        return out if np.ndim(r) else float(out[0])

    def u(self, r, lam: float = 0.0):
        kap, z, pref = self._vu_parts(lam, r)
        a = self.kummer_a(lam)
        out = pref * _hyperu_vec(a, self.b_kummer, np.atleast_1d(z))
        return out if np.ndim(r) else float(out[0])

    def up(self, r, lam: float = 0.0):
        kap, z, pref = self._vu_parts(lam, r)
        a = self.kummer_a(lam)
        z1 = np.atleast_1d(z)
        uval = _hyperu_vec(a, self.b_kummer, z1)
        uval1 = _hyperu_vec(a + 1.0, self.b_kummer + 1.0, z1)
        dz = pref * ((-0.5 + self.abs_m / np.where(z1 > 0, z1, 1.0)) * uval - a * uval1)
        out = 2.0 * kap * dz
        return out if np.ndim(r) else float(out[0])

    # -- lambda-series data ----------------------------------------------------

    def scriptP1(self, lam: float) -> float:
        v1 = float(self.v(1.0, lam))
        vp1 = float(self.vp(1.0, lam))
        return (2.0 * v1 * core.f_nu(-self.nu - 1.0, lam)[0]
                + (self.nu * v1 - vp1) * core.f_nu(-self.nu, lam)[0])

    def scriptP2(self, lam: float) -> float:
        v1 = float(self.v(1.0, lam))
        vp1 = float(self.vp(1.0, lam))
        return (2.0 * (self.nu * v1 - vp1) * core.f_nu(self.nu, lam)[0]
                - lam * v1 * core.f_nu(self.nu + 1.0, lam)[0])

    def sigma(self, lam: float) -> float:
        v1 = float(self.v(1.0, lam))
        vp1 = float(self.vp(1.0, lam))
        return (vp1 - self.nu * v1) * core.f_nu(self.nu, lam)[0] / self.scriptP1(lam)

    def p(self, lam: float) -> complex:
        return self.kappa_m * self.sigma(lam)

    def data(self) -> "ChannelData":
        return ChannelData(
            m=self.m, nu=self.nu, a_m=self.a_m, a1_m=self.a1_m, b_m=self.b_m,
            b1_m=self.b1_m, delta_m=self.delta_m, beta_m=self.beta_m,
            gamma_m=self.gamma_m, sigma0_m=getattr(self, "sigma0", float("nan")),
            q_m=getattr(self, "q_m", float("nan")),
            kappa_m=getattr(self, "kappa_m", complex("nan")),
            p0_m=getattr(self, "p0", complex("nan")),
        )

    # -- zero-energy kernel ------------------------------------------------

    def g(self, r):
        """g_m: 2 nu gamma_m v_m(0,r) inside, r^nu - delta_m r^-nu outside."""
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        inside = r <= 1.0
        if inside.any():
            out[inside] = 2.0 * self.nu * self.gamma_m * self.v(r[inside])
        if (~inside).any():
            ro = r[~inside]
            out[~inside] = ro**self.nu - self.delta_m * ro ** (-self.nu)
        return float(out[0]) if scalar else out

    def h(self, t):
        """h_m: matched singular solution, t^-nu/(4 pi nu) outside."""
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        inside = t <= 1.0
        c = 1.0 / (4.0 * math.pi * self.nu)
        if inside.any():
            pref = core.gamma_real(self.kummer_a()) * core.rgamma(self.b_kummer) / self.gamma_m
            out[inside] = c * pref * (self.u(t[inside]) - self.beta_m * self.v(t[inside]))
        if (~inside).any():
            out[~inside] = c * t[~inside] ** (-self.nu)
        return float(out[0]) if scalar else out

    def g_lam(self, lam: float, r) -> np.ndarray:
        """g_m(lam, r) = Q_nu(lam,r) + sigma_m(lam) Q_-nu(lam,r)."""
        return q_nu(self.nu, lam, r) + self.sigma(lam) * q_nu(-self.nu, lam, r)


def q_nu(nu: float, lam: float, r) -> np.ndarray:
    """Q_nu(lam, r) = r^nu f_nu(lam r^2); entire in lam."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return r**nu * f_nu_vec(nu, lam * r * r)


class IntegerChannel:
    """The exceptional channel m = alpha for integer flux (nu = 0)."""

    def __init__(self, alpha: float):
        if abs(alpha - round(alpha)) > 1e-12 or round(alpha) == 0:
            raise ValueError("IntegerChannel requires nonzero integer alpha")
        self.alpha = float(round(alpha))
        self.m = int(round(alpha))
        base = Channel.__new__(Channel)
        base.m = self.m
        base.alpha = self.alpha
        base.nu = 0.0
        base.abs_m = abs(self.m)
        base.b_kummer = 1.0 + 2.0 * base.abs_m
        base.sign_alpha = 1.0 if alpha > 0 else -1.0
        base.is_resonant_channel = True
        self._ch = base
        self.a_m = float(base.v(1.0))
        self.a1_m = float(base.vp(1.0))
        self.b_m = float(base.u(1.0))
        self.b1_m = float(base.up(1.0))

    def v(self, r, lam: float = 0.0):
        return self._ch.v(r, lam)

    def vp(self, r, lam: float = 0.0):
        return self._ch.vp(r, lam)

    def u(self, r, lam: float = 0.0):
        return self._ch.u(r, lam)

    def up(self, r, lam: float = 0.0):
        return self._ch.up(r, lam)

    def kummer_a(self, lam: float = 0.0) -> float:
        return self._ch.kummer_a(lam)

    def frak_g(self, r):
        """(1/a'_alpha) * [v(0,r) inside; a_alpha + a'_alpha log r outside]."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        inside = r <= 1.0
        if inside.any():
            out[inside] = self.v(r[inside]) / self.a1_m
        if (~inside).any():
            out[~inside] = (self.a_m + self.a1_m * np.log(r[~inside])) / self.a1_m
        return out if len(out) > 1 else float(out[0])

    def kernel(self, lo: float, hi: float) -> float:
        """G_{alpha,0}(lo, hi) for lo <= hi."""
        if hi <= 1.0:
            pref = (core.gamma_real(self.kummer_a()) * core.rgamma(self._ch.b_kummer)
                    / (2.0 * math.pi))
            return pref * float(self.v(lo)) * (
                float(self.u(hi)) - (self.b1_m / self.a1_m) * float(self.v(hi)))
        return float(self.frak_g(lo)) / (2.0 * math.pi)


def make_channel(m: int, alpha: float):
    """Channel for m, using the logarithmic variant when m = alpha integer."""
    if abs(alpha - round(alpha)) < 1e-9 and int(round(alpha)) == m and m != 0:
        return IntegerChannel(alpha)
    return Channel(m, alpha)


def kernel_G0(m: int, alpha: float, r: float, t: float,
              channel=None) -> float:
    """Zero-energy kernel G_{m,0}(r,t) (or its integer-flux variant)."""
    if r <= 0 or t <= 0:
        raise ValueError("kernel_G0 requires r, t > 0")
    ch = channel if channel is not None else make_channel(m, alpha)
    lo, hi = (r, t) if r < t else (t, r)
    if isinstance(ch, IntegerChannel):
        return ch.kernel(lo, hi)
    return float(ch.g(lo)) * float(ch.h(hi))


def kernel_G0_matrix(ch, grid: RadialGrid) -> np.ndarray:
    """Grid matrix of G_{m,0}; entry (i,j) is the kernel at (r_i, r_j)."""
    r = grid.nodes
    n = len(r)
    if isinstance(ch, IntegerChannel):
        K = np.empty((n, n))
        v0 = np.atleast_1d(ch.v(r))
        u0 = np.atleast_1d(ch.u(r))
        fg = np.atleast_1d(ch.frak_g(r))
        pref = (core.gamma_real(ch.kummer_a()) * core.rgamma(ch._ch.b_kummer)
                / (2.0 * math.pi))
        w = u0 - (ch.b1_m / ch.a1_m) * v0
        lo = np.minimum.outer(r, r)
        hi = np.maximum.outer(r, r)
        v_lo = np.where(r[:, None] <= r[None, :], v0[:, None], v0[None, :])
        w_hi = np.where(r[:, None] <= r[None, :], w[None, :], w[:, None])
        fg_lo = np.where(r[:, None] <= r[None, :], fg[:, None], fg[None, :])
        K = np.where(hi <= 1.0, pref * v_lo * w_hi, fg_lo / (2.0 * math.pi))
        return K
    g = np.atleast_1d(ch.g(r))
    h = np.atleast_1d(ch.h(r))
    less = r[:, None] < r[None, :]
    return np.where(less, g[:, None] * h[None, :], g[None, :] * h[:, None])


def apply_channel_kernel(K: np.ndarray, grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """Nystrom application 2*pi int K(r,t) f(t) t dt on the grid."""
    return 2.0 * math.pi * K @ (grid.r_weights * f)


class ModeFunction:
    """Finitely many angular channels of radial samples on a shared grid."""

    def __init__(self, grid: RadialGrid, channels: dict[int, np.ndarray]):
        self.grid = grid
        self.channels = {int(m): np.asarray(v) for m, v in channels.items()}

    def inner(self, other: "ModeFunction") -> complex:
        tot = 0.0 + 0.0j
        for m, f in self.channels.items():
            g = other.channels.get(m)
            if g is not None:
                tot += self.grid.inner(f, g)
        return tot


def apply_G0(f: ModeFunction, alpha: float,
             channel_cache: dict | None = None) -> ModeFunction:
    """Channel-wise Nystrom application of the zero-energy inverse."""
    cache = channel_cache if channel_cache is not None else {}
    out = {}
    for m, vals in f.channels.items():
        if m not in cache:
            cache[m] = make_channel(m, alpha)
        K = kernel_G0_matrix(cache[m], f.grid)
        out[m] = apply_channel_kernel(K, f.grid, vals)
    return ModeFunction(f.grid, out)


def default_channel_set(flux: FluxData, extra: int = 6) -> list[int]:
    n = flux.n
    return list(range(n - extra, n + extra + 1))


def kernel_jump(m: int, alpha: float, r: float, eps: float = 1e-4) -> float:
    """r * [d_t G(r,t)|_{t->r-} - d_t G(r,t)|_{t->r+}], expected 1/(2 pi).

    Each one-sided limit is taken on its own analytic branch (the branch
    formulas extend smoothly through t = r), so plain central differences
    with one Richardson step give the one-sided derivatives to high order.
    """
    ch = make_channel(m, alpha)
    if isinstance(ch, IntegerChannel):
        def left(t):   # branch t <= r
            return ch.kernel(t, r)

        def right(t):  # branch r < t
            return ch.kernel(r, t)
    else:
        hr = float(ch.h(r))
        gr = float(ch.g(r))

        def left(t):
            return float(ch.g(t)) * hr

        def right(t):
            return gr * float(ch.h(t))

    def deriv(f):
        d1 = (f(r + eps) - f(r - eps)) / (2 * eps)
        d2 = (f(r + eps / 2) - f(r - eps / 2)) / eps
        return (4 * d2 - d1) / 3

    return r * (deriv(left) - deriv(right))


def kernel_ode_residual(m: int, alpha: float, r: float, t: float,
                        step: float = 1e-3) -> float:
    """Residual of (-d_t^2 - (1/t) d_t + ((m/t) - a0(t))^2) G(r, .) at t != r."""
    ch = make_channel(m, alpha)

    def G(tt: float) -> float:
        return kernel_G0(m, alpha, r, tt, ch)

    h = step
    d2 = (G(t + h) - 2.0 * G(t) + G(t - h)) / (h * h)
    d1 = (G(t + h) - G(t - h)) / (2.0 * h)
    a0 = alpha if t < 1.0 else alpha / t
    return -d2 - d1 / t + ((m / t) - a0) ** 2 * G(t)
