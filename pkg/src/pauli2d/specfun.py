"""Special functions with explicit accuracy accounting.

Public wrappers around the compiled/pure core.  Every evaluation returns a
:class:`SpecialValue` carrying an absolute error estimate; a result whose
estimate exceeds the caller's tolerance raises :class:`AccuracyError` instead
of silently returning garbage.

Also houses the two conventions used everywhere downstream:

  * ``branch_power``/``branch_log``: complex powers and logarithms evaluated
    as boundary values from the upper half-plane, i.e. for x < 0 one has
    x^nu = |x|^nu e^{i pi nu} and log x = log|x| + i pi.
  * ``zeta_coeff``: the coefficient function
    zeta(t) = -4^(t-1) Gamma(t) e^{i pi t} / (pi Gamma(1-t)),
    defined for positive non-integer t.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from pauli2d.backend import core

EULER_GAMMA = 0.5772156649015328606


class AccuracyError(ArithmeticError):
    """The error estimate of an evaluation exceeded the requested tolerance."""


@dataclass(frozen=True)
class SpecialValue:
    value: complex
    abs_error_estimate: float

    def require(self, tol: float) -> complex:
        if not self.abs_error_estimate >= 0.0:
            raise AccuracyError("invalid error estimate")
        if self.abs_error_estimate > tol:
            raise AccuracyError(
                "error estimate %.3e exceeds tolerance %.3e"
                % (self.abs_error_estimate, tol)
            )
        return self.value

    @property
    def real(self) -> float:
        return self.value.real if isinstance(self.value, complex) else self.value


def gamma_fn(z: float | complex) -> SpecialValue:
    """Gamma(z); complex arguments via Lanczos with the reflection formula."""
    if isinstance(z, complex) and z.imag != 0.0:
        v = _gamma_complex(z)
        return SpecialValue(v, abs(v) * 1e-13)
    x = float(z.real) if isinstance(z, complex) else float(z)
    v = core.gamma_real(x)
    return SpecialValue(v, abs(v) * 1e-14)


def _gamma_complex(z: complex) -> complex:
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _gamma_complex(1.0 - z))
    lanczos = (
        0.99999999999980993, 676.5203681218851, -1259.1392167224028,
        771.32342877765313, -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
    )
    z = z - 1.0
    a = lanczos[0]
    t = z + 7.5
    for i in range(1, 9):
        a += lanczos[i] / (z + i)
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * a


def rgamma(x: float) -> float:
    """1/Gamma(x), entire (zero at the poles of Gamma)."""
    return core.rgamma(x)


def digamma(z: float) -> SpecialValue:
    """psi_0(z) for z > 0."""
    if z <= 0.0:
        raise ValueError("digamma requires z > 0")
    return SpecialValue(core.digamma_real(z), 1e-13 * max(1.0, abs(math.log(z))))


def kummer_m(a: float, b: float, z: float) -> SpecialValue:
    v, e = core.kummer_m(a, b, z)
    return SpecialValue(v, e)


def tricomi_u(a: float, b: float, z: float) -> SpecialValue:
    v, e = core.hyperu(a, b, z)
    return SpecialValue(v, e)


def bessel_jy(nu: float, x: float) -> tuple[SpecialValue, SpecialValue]:
    j, y, e = core.bessel_jy(nu, x)
    return SpecialValue(j, e), SpecialValue(y, e)


def f_nu(nu: float, z: float) -> SpecialValue:
    """The entire series with J_nu(x) = (x/2)^nu f_nu(x^2)."""
    v, e = core.f_nu(nu, z)
    return SpecialValue(v, e)


def zeta_coeff(t: float) -> complex:
    """zeta(t) = -4^(t-1) Gamma(t) e^{i pi t} / (pi Gamma(1-t)), t > 0 non-integer."""
    if t <= 0.0 or abs(t - round(t)) < 1e-6:
        raise ValueError("zeta_coeff requires positive t at distance >= 1e-6 from integers")
    mag = 4.0 ** (t - 1.0) * core.gamma_real(t) * core.rgamma(1.0 - t) / math.pi
    return -mag * cmath.exp(1j * math.pi * t)


# -- branch conventions -------------------------------------------------------

def branch_power(x: float, nu: float) -> complex:
    """x^nu with the upper-boundary branch on the negative axis."""
    if x > 0.0:
        return complex(x**nu)
    if x == 0.0:
        return complex(0.0 if nu > 0 else math.inf)
    return (-x) ** nu * cmath.exp(1j * math.pi * nu)


def branch_log(x: float) -> complex:
    """log x with log(-z) = log z + i pi for z > 0."""
    if x > 0.0:
        return complex(math.log(x))
    if x == 0.0:
        raise ValueError("branch_log(0)")
    return complex(math.log(-x), math.pi)


def branch_sqrt(x: float) -> complex:
    """sqrt with the upper-boundary branch: sqrt(-z) = i sqrt(z)."""
    return branch_power(x, 0.5)


# -- numeric parameter derivatives --------------------------------------------

def dlambda(fn, lam0: float = 0.0, scale: float = 1.0, order: int = 1):
    """Derivative of ``fn`` w.r.t. its scalar argument at ``lam0``.

    Central differences with one Richardson extrapolation; ``fn`` may return
    a scalar or a numpy array.  Step follows h = 1e-5 * max(1, scale).
    """
    h = 1.0e-5 * max(1.0, abs(scale))
    if order == 1:
        d_h = (fn(lam0 + h) - fn(lam0 - h)) / (2.0 * h)
        h2 = 0.5 * h
        d_h2 = (fn(lam0 + h2) - fn(lam0 - h2)) / (2.0 * h2)
        return (4.0 * d_h2 - d_h) / 3.0
    if order == 2:
        d_h = (fn(lam0 + h) - 2.0 * fn(lam0) + fn(lam0 - h)) / (h * h)
        h2 = 0.5 * h
        d_h2 = (fn(lam0 + h2) - 2.0 * fn(lam0) + fn(lam0 - h2)) / (h2 * h2)
        return (4.0 * d_h2 - d_h) / 3.0
    raise ValueError("order must be 1 or 2")
