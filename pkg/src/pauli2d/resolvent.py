"""Exact per-channel resolvent kernels of the reference operator.

The channel-m kernel R_{m,0}(lam; r, t) is assembled from three region
formulas (both points beyond the unit disk, straddling it, or both inside),
glued symmetrically across r = t.  Everything is written through the entire
series f_nu(lam r^2) and explicit powers of lam, so evaluation continues
off the positive axis with the upper-boundary branch lam^s = |lam|^s e^{i pi s},
log lam = log|lam| + i pi for lam < 0.

For lam > 0 the kernel is the boundary value from the upper half-plane: the
outgoing factor is the Hankel combination J + iY, which is the only source
of the imaginary part.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from pauli2d.backend import core
from pauli2d.channels import (Channel, IntegerChannel, RadialGrid, f_nu_vec,
                              make_channel)
from pauli2d.specfun import branch_log, branch_power


def bessel_pair_branch(nu: float, lam: float, r) -> tuple[np.ndarray, np.ndarray]:
    """(J_nu(sqrt(lam) r), Y_nu(sqrt(lam) r)) with the branch convention.

    Valid for lam of either sign; integer nu switches Y to the logarithmic
    series.  Vectorized over r.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    z2 = lam * r * r
    half = 0.5 * r
    n = round(nu)
    J = branch_power(lam, 0.5 * nu) * half**nu * f_nu_vec(nu, z2)
    if abs(nu - n) > 1e-9:
        Jm = branch_power(lam, -0.5 * nu) * half ** (-nu) * f_nu_vec(-nu, z2)
        s = math.sin(nu * math.pi)
        Y = (J * math.cos(nu * math.pi) - Jm) / s
        return J, Y
    n = int(n)
    logz = 0.5 * branch_log(lam) + np.log(half)
    Y = (2.0 / math.pi) * logz * J
    # finite part: -(1/pi) sum_{k<n} (n-k-1)!/k! (z/2)^{2k-n}
    if n > 0:
        s1 = np.zeros_like(r, dtype=complex)
        coef = core.gamma_real(float(n))  # (n-1)!
        zz = z2 / 4.0
        pw = np.ones_like(r, dtype=complex)
        for k in range(n):
            s1 = s1 + coef * pw
            if k < n - 1:
                coef /= (k + 1.0) * (n - k - 1.0)
                pw = pw * zz
        Y = Y - (branch_power(lam, -0.5 * n) * half ** (-n) * s1) / math.pi
    # psi series: -(1/pi) (z/2)^n sum_k (-1)^k [psi(k+1)+psi(n+k+1)] (z^2/4)^k/(k!(n+k)!)
    s2 = np.zeros_like(r, dtype=complex)
    term = np.full_like(r, core.rgamma(n + 1.0), dtype=complex)
    zz = z2 / 4.0
    for k in range(400):
        c = core.digamma_real(k + 1.0) + core.digamma_real(n + k + 1.0)
        s2 = s2 + term * c
        mx = np.max(np.abs(term)) * abs(c)
        if mx <= 1e-18 * max(np.max(np.abs(s2)), 1e-300) and k > 3:
            break
        term = term * (-zz) / ((k + 1.0) * (n + k + 1.0))
    Y = Y - branch_power(lam, 0.5 * n) * half**n * s2 / math.pi
    return J, Y


class ResolventChannel:
    """Exact kernel R_{m,0}(lam; r, t) and the coefficient functions."""

    def __init__(self, m: int, alpha: float):
        self.m = int(m)
        self.alpha = float(alpha)
        self.ch = make_channel(m, alpha)
        self.nu = abs(m - alpha)
        self.abs_m = abs(self.m)
        self.b_kummer = 1.0 + 2.0 * self.abs_m
        self._guard = min(0.5, alpha * alpha / 2.0)

    def _check_lam(self, lam: float) -> None:
        if not lam < self.alpha**2:
            raise ValueError("need lam < alpha^2 for the confluent solutions")

    def coeff_AB(self, lam: float) -> tuple[complex, complex]:
        """A_m(lam), B_m(lam) built from v_m at the matching radius."""
        self._check_lam(lam)
        v1 = float(self.ch.v(1.0, lam))
        vp1 = float(self.ch.vp(1.0, lam))
        jn, yn = bessel_pair_branch(self.nu, lam, 1.0)
        jn1, yn1 = bessel_pair_branch(self.nu + 1.0, lam, 1.0)
        sq = branch_power(lam, 0.5)
        A = (v1 * self.nu - vp1) * yn[0] - sq * v1 * yn1[0]
        B = (vp1 - self.nu * v1) * jn[0] + sq * v1 * jn1[0]
        return A, B

    def coeff_C(self, lam: float) -> complex:
        """C_m(lam): the u_m-based Hankel matching coefficient."""
        self._check_lam(lam)
        u1 = float(self.ch.u(1.0, lam))
        up1 = float(self.ch.up(1.0, lam))
        jn, yn = bessel_pair_branch(self.nu, lam, 1.0)
        jn1, yn1 = bessel_pair_branch(self.nu + 1.0, lam, 1.0)
        sq = branch_power(lam, 0.5)
        re = (up1 - u1 * self.nu) * jn[0] + sq * u1 * jn1[0]
        im = (up1 - u1 * self.nu) * yn[0] + sq * u1 * yn1[0]
        return re + 1j * im

    def _kl_prefactor(self, lam: float) -> float:
        a = self.ch.kummer_a(lam)
        return core.gamma_real(a) * core.rgamma(self.b_kummer) / (2.0 * math.pi)

    def k_l(self, lam: float, r: float, t: float) -> tuple[float, float]:
        """(k_m, l_m)(lam; r, t) for r, t <= 1 (not symmetrized)."""
        c = self._kl_prefactor(lam)
        vr = float(self.ch.v(r, lam))
        return c * vr * float(self.ch.v(t, lam)), c * vr * float(self.ch.u(t, lam))

    def kernel(self, lam: float, r: float, t: float) -> complex:
        """R_{m,0}(lam; r, t); symmetric region dispatch."""
        if r <= 0 or t <= 0:
            raise ValueError("kernel requires r, t > 0")
        self._check_lam(lam)
        lo, hi = (r, t) if r <= t else (t, r)
        A, B = self.coeff_AB(lam)
        den = B - 1j * A
        if hi <= 1.0:
            km, lm = self.k_l(lam, lo, hi)
            return lm - self.coeff_C(lam) * km / den
        jh, yh = bessel_pair_branch(self.nu, lam, hi)
        out = jh[0] + 1j * yh[0]
        if lo < 1.0:
            return float(self.ch.v(lo, lam)) * out / (2.0 * math.pi * den)
        jl, yl = bessel_pair_branch(self.nu, lam, lo)
        return (A * jl[0] + B * yl[0]) * out / (4.0 * den)

    def kernel_matrix(self, lam: float, grid: RadialGrid) -> np.ndarray:
        """Grid matrix of R_{m,0}(lam); entry (i,j) at (r_i, r_j)."""
        self._check_lam(lam)
        r = grid.nodes
        n = len(r)
        K = np.empty((n, n), dtype=complex)
        A, B = self.coeff_AB(lam)
        den = B - 1j * A
        C = self.coeff_C(lam)
        inner = r <= 1.0
        ri, ro = r[inner], r[~inner]
        vi = np.atleast_1d(self.ch.v(ri, lam))
        ui = np.atleast_1d(self.ch.u(ri, lam))
        cpr = self._kl_prefactor(lam)
        # inner x inner: l(lo,hi) - C k(lo,hi)/den with lo/hi sorting
        less = ri[:, None] <= ri[None, :]
        v_lo = np.where(less, vi[:, None], vi[None, :])
        u_hi = np.where(less, ui[None, :], ui[:, None])
        Kii = cpr * v_lo * u_hi - (C / den) * cpr * np.outer(vi, vi)
        # outgoing factors outside
        jo, yo = bessel_pair_branch(self.nu, lam, ro)
        out = jo + 1j * yo
        w1 = A * jo + B * yo
        Kio = np.outer(vi, out) / (2.0 * math.pi * den)
        less_o = ro[:, None] <= ro[None, :]
        w1_lo = np.where(less_o, w1[:, None], w1[None, :])
        out_hi = np.where(less_o, out[None, :], out[:, None])
        Koo = w1_lo * out_hi / (4.0 * den)
        ni = int(inner.sum())
        K[:ni, :ni] = Kii
        K[:ni, ni:] = Kio
        K[ni:, :ni] = Kio.T
        K[ni:, ni:] = Koo
        return K


def exact_Rm(m: int, alpha: float, lam: float, r: float, t: float) -> complex:
    return ResolventChannel(m, alpha).kernel(lam, r, t)


def resolvent_ode_residual(rc: ResolventChannel, lam: float, r: float,
                           t: float, step: float = 1e-3) -> complex:
    """(-d_r^2 - (1/r) d_r + ((m/r)-a0(r))^2 - lam) R(lam; ., t) at r != t."""
    def f(x: float) -> complex:
        return rc.kernel(lam, x, t)

    h = step
    d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h)
    d1 = (f(r + h) - f(r - h)) / (2.0 * h)
    a0 = rc.alpha if r < 1.0 else rc.alpha / r
    return -d2 - d1 / r + (((rc.m / r) - a0) ** 2 - lam) * f(r)
