# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled special-function kernels.

Line-for-line mirror of ``_kernels_py``; see that module for the math notes.
The scalar routines are plain C on doubles, the ``*_array`` helpers run the
per-node loops that dominate kernel assembly on radial grids.
"""

from libc.math cimport (atan, cos, exp, floor, log, fabs, pi, pow, sin, sqrt,
                        tan, NAN)

cdef double EPS = 2.220446049250313e-16
cdef int SERIES_CAP = 500

cdef double LANCZOS_G = 7.0
cdef double[9] LANCZOS
LANCZOS[0] = 0.99999999999980993
LANCZOS[1] = 676.5203681218851
LANCZOS[2] = -1259.1392167224028
LANCZOS[3] = 771.32342877765313
LANCZOS[4] = -176.61502916214059
LANCZOS[5] = 12.507343278686905
LANCZOS[6] = -0.13857109526572012
LANCZOS[7] = 9.9843695780195716e-6
LANCZOS[8] = 1.5056327351493116e-7

cdef double SQRT_2PI = 2.5066282746310002


class SeriesError(ArithmeticError):
    """A series exceeded its term cap without converging."""


cdef double c_gamma(double x) except? -1e308:
    cdef double a, t
    cdef int i
    if x != x:
        return x
    if x <= 0.0 and x == floor(x):
        raise ValueError("gamma pole at non-positive integer %g" % x)
    if x < 0.5:
        return pi / (sin(pi * x) * c_gamma(1.0 - x))
    x = x - 1.0
    a = LANCZOS[0]
    t = x + LANCZOS_G + 0.5
    for i in range(1, 9):
        a += LANCZOS[i] / (x + i)
    return SQRT_2PI * pow(t, x + 0.5) * exp(-t) * a


cdef double c_rgamma(double x) except? -1e308:
    if x <= 0.0 and x == floor(x):
        return 0.0
    if x < 0.5:
        return sin(pi * x) * c_gamma(1.0 - x) / pi
    return 1.0 / c_gamma(x)


cdef double c_digamma(double x) except? -1e308:
    cdef double acc, inv, inv2, tail
    if x <= 0.0:
        if x == floor(x):
            raise ValueError("digamma pole at %g" % x)
        return c_digamma(1.0 - x) - pi / tan(pi * x)
    acc = 0.0
    while x < 12.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = inv2 * (
        1.0 / 12.0
        - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0)))
    )
    return acc + log(x) - 0.5 * inv - tail


cdef int c_kummer_m(double a, double b, double z, double* val, double* err) except -1:
    cdef double term = 1.0, total = 1.0, peak = 1.0, at
    cdef int k
    if b <= 0.0 and b == floor(b):
        raise ValueError("kummer_m pole: b is a non-positive integer")
    for k in range(SERIES_CAP):
        term *= (a + k) * z / ((b + k) * (k + 1.0))
        total += term
        at = fabs(term)
        if at > peak:
            peak = at
        if at <= EPS * fabs(total) and at <= EPS * peak:
            val[0] = total
            err[0] = peak * EPS * (k + 2.0)
            return 0
    raise SeriesError("kummer_m: no convergence within %d terms" % SERIES_CAP)


cdef int c_f_nu(double nu, double z, double* val, double* err) except -1:
    cdef double term = c_rgamma(nu + 1.0)
    cdef double total = term, peak = fabs(term), at, d
    cdef int k
    for k in range(SERIES_CAP):
        d = nu + k + 1.0
        if d == 0.0:
            raise ValueError("f_nu: negative integer order")
        term *= -z / (4.0 * (k + 1.0) * d)
        total += term
        at = fabs(term)
        if at > peak:
            peak = at
        if at <= EPS * max(fabs(total), peak * EPS) and k > 2:
            val[0] = total
            err[0] = peak * EPS * (k + 2.0)
            return 0
    raise SeriesError("f_nu: no convergence within %d terms" % SERIES_CAP)


cdef int c_hyperu_asymptotic(double a, double b, double z, double* val, double* err) except -1:
    cdef double term = 1.0, total = 1.0, best = 1.0, scale
    cdef int k
    for k in range(SERIES_CAP):
        term *= (a + k) * (a - b + 1.0 + k) / (-z * (k + 1.0))
        if fabs(term) > best and k > 1:
            break
        total += term
        best = fabs(term)
    scale = exp(-a * log(z))
    val[0] = total * scale
    err[0] = (best + EPS * fabs(total)) * scale
    return 0


cdef int c_hyperu_int_b(double a, int n, double z, double* val, double* err) except -1:
    cdef double lnz = log(z)
    cdef double pref1, pref2, total = 0.0, peak = 0.0, poch, bracket, term, at, fin, ak
    cdef int k, converged
    pref1 = c_rgamma(a - n) / c_gamma(n + 1.0)
    if n % 2 == 0:
        pref1 = -pref1
    if pref1 != 0.0:
        poch = 1.0
        converged = 0
        for k in range(SERIES_CAP):
            ak = a + k
            if ak <= 0.0 and ak == floor(ak):
                raise ValueError("hyperu: a + k hit a digamma pole")
            bracket = lnz + c_digamma(ak) - c_digamma(1.0 + k) - c_digamma(n + 1.0 + k)
            term = pref1 * poch * bracket
            total += term
            at = fabs(term)
            if at > peak:
                peak = at
            if at <= EPS * max(fabs(total), 1e-300) and k > 3:
                converged = 1
                break
            poch *= (a + k) * z / ((n + 1.0 + k) * (k + 1.0))
        if not converged:
            raise SeriesError("hyperu integer-b series: no convergence")
    if n > 0:
        pref2 = c_gamma(<double> n) * c_rgamma(a) * pow(z, -n)
        if pref2 != 0.0:
            poch = 1.0
            fin = 0.0
            for k in range(n):
                term = pref2 * poch
                fin += term
                at = fabs(term)
                if at > peak:
                    peak = at
                if k < n - 1:
                    poch *= (a - n + k) * z / ((1.0 - n + k) * (k + 1.0))
            total += fin
    val[0] = total
    err[0] = peak * EPS * 8.0
    return 0


cdef int c_hyperu(double a, double b, double z, double* val, double* err) except -1:
    cdef double m1, e1, m2, e2, c1, c2, poch, s
    cdef int nb, i, m
    if z <= 0.0:
        raise ValueError("hyperu requires z > 0")
    if a <= 0.0 and a == floor(a):
        m = <int> (-a)
        poch = 1.0
        for i in range(m):
            poch *= b + i
        c_kummer_m(a, b, z, &m1, &e1)
        s = -1.0 if m % 2 else 1.0
        val[0] = s * poch * m1
        err[0] = poch * e1
        return 0
    if z > 40.0:
        return c_hyperu_asymptotic(a, b, z, val, err)
    nb = <int> floor(b + 0.5)
    if fabs(b - nb) < 1e-6:
        if nb < 1:
            c_hyperu_int_b(a - b + 1.0, 1 - nb, z, val, err)
            s = pow(z, 1.0 - b)
            val[0] *= s
            err[0] *= s
            return 0
        return c_hyperu_int_b(a, nb - 1, z, val, err)
    c_kummer_m(a, b, z, &m1, &e1)
    c_kummer_m(a - b + 1.0, 2.0 - b, z, &m2, &e2)
    c1 = c_gamma(1.0 - b) * c_rgamma(a - b + 1.0)
    c2 = c_gamma(b - 1.0) * c_rgamma(a) * pow(z, 1.0 - b)
    val[0] = c1 * m1 + c2 * m2
    err[0] = fabs(c1) * e1 + fabs(c2) * e2 + EPS * (fabs(c1 * m1) + fabs(c2 * m2))
    return 0


cdef int c_bessel_asymptotic(double nu, double x, double* jv, double* yv, double* err) except -1:
    cdef double mu = 4.0 * nu * nu
    cdef double p = 1.0, q, term_p = 1.0, term_q, best, chi, amp
    cdef int k
    q = (mu - 1.0) / (8.0 * x)
    term_q = q
    best = fabs(term_q)
    k = 1
    while k < 30:
        term_p *= -(mu - (4.0 * k - 3.0) ** 2) * (mu - (4.0 * k - 1.0) ** 2) / (
            (2.0 * k - 1.0) * (2.0 * k) * 64.0 * x * x
        )
        term_q *= -(mu - (4.0 * k - 1.0) ** 2) * (mu - (4.0 * k + 1.0) ** 2) / (
            (2.0 * k) * (2.0 * k + 1.0) * 64.0 * x * x
        )
        if fabs(term_p) + fabs(term_q) > best and k > 2:
            break
        p += term_p
        q += term_q
        best = fabs(term_p) + fabs(term_q)
        k += 1
    chi = x - (0.5 * nu + 0.25) * pi
    amp = sqrt(2.0 / (pi * x))
    jv[0] = amp * (cos(chi) * p - sin(chi) * q)
    yv[0] = amp * (sin(chi) * p + cos(chi) * q)
    err[0] = amp * best
    return 0


cdef int c_bessely_int(int n, double x, double jn, double* val, double* err) except -1:
    cdef double half = 0.5 * x
    cdef double lnh = log(half)
    cdef double total, peak, fac, t, fin, s, c, at
    cdef int k, converged
    total = (2.0 / pi) * lnh * jn
    peak = fabs(total)
    if n > 0:
        fac = c_gamma(<double> n)
        t = fac * pow(half, -n)
        fin = 0.0
        for k in range(n):
            fin += t
            at = fabs(t)
            if at > peak:
                peak = at
            if k < n - 1:
                t *= half * half / ((k + 1.0) * (n - k - 1.0))
        total -= fin / pi
    t = pow(half, n) * c_rgamma(n + 1.0)
    s = 0.0
    converged = 0
    for k in range(SERIES_CAP):
        c = c_digamma(k + 1.0) + c_digamma(n + k + 1.0)
        s += t * c
        at = fabs(t * c)
        if at > peak:
            peak = at
        if at <= EPS * max(fabs(s), 1e-300) and k > 3:
            converged = 1
            break
        t *= -half * half / ((k + 1.0) * (n + k + 1.0))
    if not converged:
        raise SeriesError("bessely_int: no convergence")
    total -= s / pi
    val[0] = total
    err[0] = peak * EPS * 8.0
    return 0


cdef int c_bessel_jy(double nu, double x, double* jv, double* yv, double* err) except -1:
    cdef double z2, fj, ej, fm, em, half_pow, j, jm, y, ey, s
    cdef int n
    if x <= 0.0:
        raise ValueError("bessel_jy requires x > 0")
    if nu < 0.0:
        raise ValueError("bessel_jy requires nu >= 0")
    if x > 12.0:
        return c_bessel_asymptotic(nu, x, jv, yv, err)
    z2 = x * x
    c_f_nu(nu, z2, &fj, &ej)
    half_pow = pow(0.5 * x, nu)
    j = half_pow * fj
    n = <int> floor(nu + 0.5)
    if fabs(nu - n) < 1e-8:
        c_bessely_int(n, x, j, &y, &ey)
        jv[0] = j
        yv[0] = y
        err[0] = half_pow * ej + ey
        return 0
    c_f_nu(-nu, z2, &fm, &em)
    jm = pow(0.5 * x, -nu) * fm
    s = sin(nu * pi)
    y = (j * cos(nu * pi) - jm) / s
    jv[0] = j
    yv[0] = y
    err[0] = (half_pow * ej + pow(0.5 * x, -nu) * em + EPS * (fabs(j) + fabs(jm))) / fabs(s)
    return 0


# -- python-visible wrappers -------------------------------------------------

def gamma_real(double x):
    return c_gamma(x)


def rgamma(double x):
    return c_rgamma(x)


def gammaln_real(double x):
    if x <= 0.0:
        raise ValueError("gammaln_real requires x > 0")
    if x < 40.0:
        return log(fabs(c_gamma(x)))
    return (x - 0.5) * log(x) - x + 0.5 * log(2.0 * pi) + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x)


def digamma_real(double x):
    return c_digamma(x)


def kummer_m(double a, double b, double z):
    cdef double v, e
    c_kummer_m(a, b, z, &v, &e)
    return v, e


def f_nu(double nu, double z):
    cdef double v, e
    c_f_nu(nu, z, &v, &e)
    return v, e


def hyperu(double a, double b, double z):
    cdef double v, e
    c_hyperu(a, b, z, &v, &e)
    return v, e


def bessel_jy(double nu, double x):
    cdef double j, y, e
    c_bessel_jy(nu, x, &j, &y, &e)
    return j, y, e


def kummer_m_array(double a, double b, double[:] z, double[:] out):
    cdef Py_ssize_t i
    cdef double v, e
    for i in range(z.shape[0]):
        c_kummer_m(a, b, z[i], &v, &e)
        out[i] = v


def f_nu_array(double nu, double[:] z, double[:] out):
    cdef Py_ssize_t i
    cdef double v, e
    for i in range(z.shape[0]):
        c_f_nu(nu, z[i], &v, &e)
        out[i] = v


def hyperu_array(double a, double b, double[:] z, double[:] out):
    cdef Py_ssize_t i
    cdef double v, e
    for i in range(z.shape[0]):
        c_hyperu(a, b, z[i], &v, &e)
        out[i] = v


def bessel_j_array(double nu, double[:] x, double[:] out):
    cdef Py_ssize_t i
    cdef double j, y, e
    for i in range(x.shape[0]):
        c_bessel_jy(nu, x[i], &j, &y, &e)
        out[i] = j
