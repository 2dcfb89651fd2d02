"""Pure-Python implementation of the special-function kernels.

Scalar double-precision routines for the gamma family, Kummer's M, Tricomi's
U and the Bessel pair J/Y, written so that the compiled extension module can
mirror them line by line.  Each series routine returns ``(value, abs_error)``
where the error estimate is ``max |term| * eps`` plus the truncation tail, so
callers can refuse results that lost too many digits to cancellation.

Conventions:
  * ``f_nu(nu, z)`` is the entire function sum_k (-1)^k z^k / (4^k k! Gamma(nu+k+1)),
    so that J_nu(x) = (x/2)^nu * f_nu(x^2).
  * ``hyperu`` dispatches on the second parameter: the reflection formula for
    non-integer b, the logarithmic series for integer b, and the divergent
    asymptotic series for large argument.

No numpy in this module; the array helpers work on anything indexable.
"""

from __future__ import annotations

import math

EPS = 2.220446049250313e-16
SERIES_CAP = 500

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_2PI = 2.5066282746310002


class SeriesError(ArithmeticError):
    """A series exceeded its term cap without converging."""


def gamma_real(x: float) -> float:
    """Gamma function for real non-pole argument (Lanczos, g=7)."""
    if x != x:
        return x
    if x <= 0.0 and x == math.floor(x):
        raise ValueError("gamma pole at non-positive integer %g" % x)
    if x < 0.5:
        # reflection
        return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))
    x = x - 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    return _SQRT_2PI * t ** (x + 0.5) * math.exp(-t) * a


def rgamma(x: float) -> float:
    """Reciprocal gamma, entire; returns 0.0 at the poles of gamma."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x < 0.5:
        return math.sin(math.pi * x) * gamma_real(1.0 - x) / math.pi
    return 1.0 / gamma_real(x)


def gammaln_real(x: float) -> float:
    """log |Gamma(x)| for x > 0."""
    if x <= 0.0:
        raise ValueError("gammaln_real requires x > 0")
    if x < 40.0:
        return math.log(abs(gamma_real(x)))
    # Stirling with first correction terms, adequate beyond 40
    return (
        (x - 0.5) * math.log(x)
        - x
        + 0.5 * math.log(2.0 * math.pi)
        + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x**3)
    )


def digamma_real(x: float) -> float:
    """Digamma; any real non-pole argument via reflection + recurrence."""
    if x <= 0.0:
        if x == math.floor(x):
            raise ValueError("digamma pole at %g" % x)
        # psi(1-x) - psi(x) = pi cot(pi x)
        return digamma_real(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 12.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # asymptotic series, Bernoulli coefficients B_2..B_10
    tail = inv2 * (
        1.0 / 12.0
        - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0)))
    )
    return acc + math.log(x) - 0.5 * inv - tail


def kummer_m(a: float, b: float, z: float) -> tuple[float, float]:
    """Kummer's M(a,b,z) by power series; returns (value, abs error estimate)."""
    if b <= 0.0 and b == math.floor(b):
        raise ValueError("kummer_m pole: b is a non-positive integer")
    term = 1.0
    total = 1.0
    peak = 1.0
    for k in range(SERIES_CAP):
        term *= (a + k) * z / ((b + k) * (k + 1.0))
        total += term
        at = abs(term)
        if at > peak:
            peak = at
        if at <= EPS * abs(total) and at <= EPS * peak:
            return total, peak * EPS * (k + 2.0)
    raise SeriesError("kummer_m: no convergence within %d terms" % SERIES_CAP)


def f_nu(nu: float, z: float) -> tuple[float, float]:
    """Entire Bessel-type series sum_k (-1)^k z^k / (4^k k! Gamma(nu+k+1))."""
    term = rgamma(nu + 1.0)
    total = term
    peak = abs(term)
    for k in range(SERIES_CAP):
        d = nu + k + 1.0
        if d == 0.0:
            raise ValueError("f_nu: negative integer order")
        term *= -z / (4.0 * (k + 1.0) * d)
        total += term
        at = abs(term)
        if at > peak:
            peak = at
        if at <= EPS * max(abs(total), peak * EPS) and k > 2:
            return total, peak * EPS * (k + 2.0)
    raise SeriesError("f_nu: no convergence within %d terms" % SERIES_CAP)


def _hyperu_asymptotic(a: float, b: float, z: float) -> tuple[float, float]:
    # U ~ z^-a * sum_k (a)_k (a-b+1)_k / (k! (-z)^k); truncate at smallest term
    term = 1.0
    total = 1.0
    best = abs(term)
    for k in range(SERIES_CAP):
        term *= (a + k) * (a - b + 1.0 + k) / (-(z) * (k + 1.0))
        if abs(term) > best and k > 1:
            break
        total += term
        best = abs(term)
    scale = math.exp(-a * math.log(z))
    return total * scale, (best + EPS * abs(total)) * scale


def _hyperu_int_b(a: float, n: int, z: float) -> tuple[float, float]:
    """U(a, n+1, z) for integer n >= 0 via the logarithmic series."""
    lnz = math.log(z)
    # sum_1 = -(-1)^n/(n! Gamma(a-n)) sum_k (a)_k/((n+1)_k k!) z^k [lnz + psi(a+k) - psi(1+k) - psi(n+1+k)]
    # (-1)^(n+1) / (n! Gamma(a-n))
    pref1 = rgamma(a - n) / gamma_real(n + 1.0)
    if n % 2 == 0:
        pref1 = -pref1
    total = 0.0
    peak = 0.0
    if pref1 != 0.0:
        poch = 1.0  # (a)_k z^k / ((n+1)_k k!)
        k = 0
        while k < SERIES_CAP:
            ak = a + k
            if ak <= 0.0 and ak == math.floor(ak):
                # psi pole: the factor (a)_k of the *next* terms vanishes
                # first; a itself a non-positive integer is handled by rgamma
                raise ValueError("hyperu: a + k hit a digamma pole")
            bracket = lnz + digamma_real(ak) - digamma_real(1.0 + k) - digamma_real(n + 1.0 + k)
            term = pref1 * poch * bracket
            total += term
            at = abs(term)
            if at > peak:
                peak = at
            if at <= EPS * max(abs(total), 1e-300) and k > 3:
                break
            poch *= (a + k) * z / ((n + 1.0 + k) * (k + 1.0))
            k += 1
        else:
            raise SeriesError("hyperu integer-b series: no convergence")
    # finite part: (n-1)!/Gamma(a) z^-n sum_{k=0}^{n-1} (a-n)_k/((1-n)_k k!) z^k
    if n > 0:
        pref2 = gamma_real(float(n)) * rgamma(a) * z ** (-n)
        if pref2 != 0.0:
            poch = 1.0  # (a-n)_k z^k / ((1-n)_k k!)
            fin = 0.0
            for k in range(n):
                term = pref2 * poch
                fin += term
                at = abs(term)
                if at > peak:
                    peak = at
                if k < n - 1:
                    poch *= (a - n + k) * z / ((1.0 - n + k) * (k + 1.0))
            total += fin
    return total, peak * EPS * 8.0


def hyperu(a: float, b: float, z: float) -> tuple[float, float]:
    """Tricomi's U(a,b,z) for z > 0; returns (value, abs error estimate)."""
    if z <= 0.0:
        raise ValueError("hyperu requires z > 0")
    if a <= 0.0 and a == math.floor(a):
        # terminating case: U(-m,b,z) = (-1)^m (b)_m M(-m,b,z)
        m = int(-a)
        poch = 1.0
        for i in range(m):
            poch *= b + i
        mv, me = kummer_m(a, b, z)
        sign = -1.0 if m % 2 else 1.0
        return sign * poch * mv, poch * me
    if z > 40.0:
        return _hyperu_asymptotic(a, b, z)
    nb = round(b)
    if abs(b - nb) < 1e-6:
        if nb < 1:
            # U(a,b,z) = z^(1-b) U(a-b+1, 2-b, z)
            v, e = _hyperu_int_b(a - b + 1.0, int(1 - nb), z)
            s = z ** (1.0 - b)
            return v * s, e * s
        return _hyperu_int_b(a, int(nb) - 1, z)
    # reflection formula through M
    m1, e1 = kummer_m(a, b, z)
    m2, e2 = kummer_m(a - b + 1.0, 2.0 - b, z)
    c1 = gamma_real(1.0 - b) * rgamma(a - b + 1.0)
    c2 = gamma_real(b - 1.0) * rgamma(a) * z ** (1.0 - b)
    val = c1 * m1 + c2 * m2
    err = abs(c1) * e1 + abs(c2) * e2 + EPS * (abs(c1 * m1) + abs(c2 * m2))
    return val, err


def _bessel_asymptotic(nu: float, x: float) -> tuple[float, float, float]:
    """Hankel's expansion of (J_nu, Y_nu) for large x; returns (J, Y, err)."""
    mu = 4.0 * nu * nu
    p = 1.0
    q = (mu - 1.0) / (8.0 * x)
    term_p = 1.0
    term_q = q
    best = abs(term_q)
    k = 1
    while k < 30:
        # P: even terms, Q: odd terms of the 1/8x series
        term_p *= -(mu - (4.0 * k - 3.0) ** 2) * (mu - (4.0 * k - 1.0) ** 2) / (
            (2.0 * k - 1.0) * (2.0 * k) * 64.0 * x * x
        )
        term_q *= -(mu - (4.0 * k - 1.0) ** 2) * (mu - (4.0 * k + 1.0) ** 2) / (
            (2.0 * k) * (2.0 * k + 1.0) * 64.0 * x * x
        )
        if abs(term_p) + abs(term_q) > best and k > 2:
            break
        p += term_p
        q += term_q
        best = abs(term_p) + abs(term_q)
        k += 1
    chi = x - (0.5 * nu + 0.25) * math.pi
    amp = math.sqrt(2.0 / (math.pi * x))
    j = amp * (math.cos(chi) * p - math.sin(chi) * q)
    y = amp * (math.sin(chi) * p + math.cos(chi) * q)
    return j, y, amp * best


def _bessely_int(n: int, x: float, jn: float) -> tuple[float, float]:
    """Y_n(x) for integer n >= 0 by the logarithmic series."""
    half = 0.5 * x
    lnh = math.log(half)
    total = (2.0 / math.pi) * lnh * jn
    peak = abs(total)
    # finite sum
    if n > 0:
        fac = gamma_real(float(n))  # (n-1)!
        t = fac * half ** (-n)
        fin = 0.0
        for k in range(n):
            fin += t
            at = abs(t)
            if at > peak:
                peak = at
            if k < n - 1:
                t *= half * half / ((k + 1.0) * (n - k - 1.0))
        total -= fin / math.pi
    # psi series
    t = half**n * rgamma(n + 1.0)
    s = 0.0
    for k in range(SERIES_CAP):
        c = digamma_real(k + 1.0) + digamma_real(n + k + 1.0)
        s += t * c
        at = abs(t * c)
        if at > peak:
            peak = at
        if at <= EPS * max(abs(s), 1.0e-300) and k > 3:
            break
        t *= -half * half / ((k + 1.0) * (n + k + 1.0))
    else:
        raise SeriesError("bessely_int: no convergence")
    total -= s / math.pi
    return total, peak * EPS * 8.0


def bessel_jy(nu: float, x: float) -> tuple[float, float, float]:
    """(J_nu(x), Y_nu(x), abs error estimate) for nu >= 0, x > 0."""
    if x <= 0.0:
        raise ValueError("bessel_jy requires x > 0")
    if nu < 0.0:
        raise ValueError("bessel_jy requires nu >= 0")
    if x > 12.0:
        j, y, err = _bessel_asymptotic(nu, x)
        return j, y, err
    z2 = x * x
    fj, ej = f_nu(nu, z2)
    half_pow = (0.5 * x) ** nu
    j = half_pow * fj
    n = round(nu)
    if abs(nu - n) < 1e-8:
        y, ey = _bessely_int(int(n), x, j)
        return j, y, half_pow * ej + ey
    fm, em = f_nu(-nu, z2)
    jm = (0.5 * x) ** (-nu) * fm
    s = math.sin(nu * math.pi)
    y = (j * math.cos(nu * math.pi) - jm) / s
    err = (half_pow * ej + (0.5 * x) ** (-nu) * em + EPS * (abs(j) + abs(jm))) / abs(s)
    return j, y, err


# ---------------------------------------------------------------------------
# array loops (the hot paths when kernels are assembled on radial grids)

def kummer_m_array(a: float, b: float, z, out) -> None:
    for i in range(len(z)):
        out[i] = kummer_m(a, b, z[i])[0]


def f_nu_array(nu: float, z, out) -> None:
    for i in range(len(z)):
        out[i] = f_nu(nu, z[i])[0]


def hyperu_array(a: float, b: float, z, out) -> None:
    for i in range(len(z)):
        out[i] = hyperu(a, b, z[i])[0]


def bessel_j_array(nu: float, x, out) -> None:
    for i in range(len(x)):
        out[i] = bessel_jy(nu, x[i])[0]
