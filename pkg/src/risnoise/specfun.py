"""Special-function kernels behind the outage expressions.

The closed-form signal-outage factor needs G^{2,1}_{1,2}(z | a1; 0, 1/2), a
Meijer G restricted to second-parameter offsets {0, 1/2}.  Two independent
evaluators are kept side by side on purpose:

  * meijer_g_2_1_1_2      residue (Slater) expansion: two Kummer 1F1 terms.
    The terms grow like exp(z + 2*sqrt(z*alpha)) while the result decays, so
    the difference is formed in mpmath with enough guard digits.
  * meijer_g_2_1_1_2_contour   numeric Mellin-Barnes integral on a vertical
    line.  Slower, but structurally unrelated to the expansion; it exists to
    cross-check the primary route and must not be removed in favor of it.

Both raise UnsupportedShapeError outside the parameter region they were
built for (alpha = 1 - a1 must be positive).
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate, special


class UnsupportedShapeError(ValueError):
    """Parameter combination outside the implemented special-function region."""


class AccuracyError(ArithmeticError):
    """Requested tolerance not met; .best_estimate holds the unconverged value."""

    def __init__(self, message: str, best_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) (scalar or array)."""
    a_arr = np.asarray(a, dtype=float)
    if np.any(a_arr <= 0.0):
        raise UnsupportedShapeError(f"shape parameter must be positive, got {a!r}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError(f"argument must be nonnegative, got {x!r}")
    out = special.gammainc(a_arr, x_arr)
    if out.ndim == 0:
        return float(out)
    return out


_MAX_TERMS = 200_000


def kummer_1f1(a: float, b: float, z: float) -> float:
    """Kummer's confluent hypergeometric 1F1(a; b; z) in double precision.

    Plain Taylor series; for z < 0 the Kummer transform
    1F1(a;b;z) = e^z 1F1(b-a;b;-z) is applied first so the summed series has
    nonnegative argument.  Terminating cases (a a nonpositive integer) sum
    exactly.
    """
    if b <= 0.0 and b == math.floor(b):
        raise UnsupportedShapeError(f"1F1 pole: b must not be a nonpositive integer, got {b!r}")
    if z < 0.0:
        return math.exp(z) * kummer_1f1(b - a, b, -z)
    term = 1.0
    total = 1.0
    for k in range(_MAX_TERMS):
        term *= (a + k) * z / ((b + k) * (k + 1.0))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
    raise AccuracyError(f"1F1({a}, {b}, {z}) did not converge in {_MAX_TERMS} terms",
                        best_estimate=total)


def kummer_1f1_mpf(a, b, z) -> mp.mpf:
    """1F1 by the same series in mpmath at the caller's working precision."""
    b = mp.mpf(b)
    if b <= 0 and b == mp.floor(b):
        raise UnsupportedShapeError(f"1F1 pole: b must not be a nonpositive integer, got {b!r}")
    a = mp.mpf(a)
    z = mp.mpf(z)
    if z < 0:
        return mp.e ** z * kummer_1f1_mpf(b - a, b, -z)
    term = mp.mpf(1)
    total = mp.mpf(1)
    tol = mp.mpf(10) ** (-(mp.mp.dps + 5))
    for k in range(_MAX_TERMS):
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        if abs(term) <= tol * abs(total):
            return total
    raise AccuracyError(f"1F1({a}, {b}, {z}) did not converge in {_MAX_TERMS} terms",
                        best_estimate=float(total))


def meijer_g_1_1_1_2(delta: float, x: float) -> float:
    """G^{1,1}_{1,2}(x | 1; delta, 0) = lower incomplete gamma(delta, x)."""
    if delta <= 0.0:
        raise UnsupportedShapeError(f"shape must be positive, got {delta!r}")
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x!r}")
    return math.exp(math.lgamma(delta)) * special.gammainc(delta, x)


def meijer_g_2_0_0_2(z: float) -> float:
    """G^{2,0}_{0,2}(z | -; 0, 1/2) = sqrt(pi) * exp(-2 sqrt(z)).

    Only appears while reshaping the outage kernel; kept so the whole
    restricted Meijer family used by the model is covered by identity tests.
    """
    if z < 0.0:
        raise UnsupportedShapeError(f"argument must be nonnegative, got {z!r}")
    return math.sqrt(math.pi) * math.exp(-2.0 * math.sqrt(z))


def _slater_loss_digits(alpha: float, z: float) -> float:
    # both 1F1 terms reach ~exp(z + 2 sqrt(z alpha)) while G ~ exp(z - ...):
    # the subtraction cancels about 4 sqrt(z alpha)/ln10 decimal digits
    return 1.7372 * math.sqrt(max(z, 0.0) * (alpha + 0.5))


def meijer_g_2_1_1_2_mpf(a1, z) -> mp.mpf:
    """Slater expansion of G^{2,1}_{1,2}(z | a1; 0, 1/2) at caller precision.

    sqrt(pi) * [Gamma(al) 1F1(al; 1/2; z) - 2 sqrt(z) Gamma(al + 1/2) 1F1(al + 1/2; 3/2; z)]

    with al = 1 - a1.  The caller's mp.dps must include headroom for the
    cancellation (about 1.74*sqrt(z*al) digits); use meijer_g_2_1_1_2 for a
    self-managing double-precision result.
    """
    al = 1 - mp.mpf(a1)
    if al <= 0:
        raise UnsupportedShapeError(f"need 1 - a1 > 0, got a1={a1!r}")
    z = mp.mpf(z)
    if z < 0:
        raise UnsupportedShapeError(f"argument must be nonnegative, got {z!r}")
    half = mp.mpf(1) / 2
    t1 = mp.gamma(al) * kummer_1f1_mpf(al, half, z)
    t2 = 2 * mp.sqrt(z) * mp.gamma(al + half) * kummer_1f1_mpf(al + half, 3 * half, z)
    return mp.sqrt(mp.pi) * (t1 - t2)


def meijer_g_2_1_1_2(a1: float, z: float) -> float:
    """G^{2,1}_{1,2}(z | a1; 0, 1/2) for 1 - a1 > 0, z >= 0, as a float."""
    # builtin floats so repr() round-trips through the mpf constructor
    a1, z = float(a1), float(z)
    alpha = 1.0 - a1
    if alpha <= 0.0:
        raise UnsupportedShapeError(f"need 1 - a1 > 0, got a1={a1!r}")
    if z < 0.0:
        raise UnsupportedShapeError(f"argument must be nonnegative, got {z!r}")
    dps = 16 + int(_slater_loss_digits(alpha, z)) + 10
    with mp.workdps(dps):
        return float(meijer_g_2_1_1_2_mpf(repr(a1), repr(z)))


def meijer_g_2_1_1_2_contour(a1: float, z: float, dps: int | None = None) -> float:
    """Independent check route: Mellin-Barnes integral on Re s = sigma0.

    G = (1/2 pi i) int Gamma(-s) Gamma(1/2 - s) Gamma(al + s) z^s ds with the
    line -min(al, 1/2) < sigma0 < 0 separating the two pole families.  The
    integrand decays like exp(-pi |t|), so truncation at T costs e^{-pi T}.

    dps sets the working precision; the default resolves the full double
    mantissa, while wide agreement scans can pass something smaller (the
    result keeps roughly dps - 2 digits) to cut the contour length.
    """
    a1, z = float(a1), float(z)
    alpha = 1.0 - a1
    if alpha <= 0.0:
        raise UnsupportedShapeError(f"need 1 - a1 > 0, got a1={a1!r}")
    if z < 0.0:
        raise UnsupportedShapeError(f"argument must be nonnegative, got {z!r}")
    if z == 0.0:
        # only the Gamma(al) residue at s = 0 survives
        with mp.workdps(max(dps or 20, 20)):
            return float(mp.sqrt(mp.pi) * mp.gamma(alpha))
    if dps is None:
        dps = 20 + int(0.8686 * math.sqrt(z * (alpha + 0.5))) + 10
    else:
        dps = max(int(dps), 6)
    sigma0 = -min(alpha, 0.5) / 2.0
    with mp.workdps(dps):
        zz = mp.mpf(repr(z))
        lnz = mp.log(zz)
        al = 1 - mp.mpf(repr(a1))
        s0 = mp.mpf(repr(sigma0))

        def integrand(t):
            s = s0 + 1j * t
            w = (mp.loggamma(-s) + mp.loggamma(mp.mpf(1) / 2 - s)
                 + mp.loggamma(al + s) + s * lnz)
            return mp.re(mp.e ** w)

        t_max = (dps * mp.log(10) + 2 * mp.sqrt(zz * al) + 20) / mp.pi
        # panels of width ~2 resolve the Gamma(-s)Gamma(1/2-s) oscillation
        panels = np.linspace(0.0, float(t_max), max(6, int(float(t_max) / 2) + 2))
        val = mp.quad(integrand, list(panels))
        return float(val / mp.pi)


def integrate_semi_infinite(f, scale: float = 1.0, rtol: float = 1e-10) -> float:
    """Integrate f over [0, inf) after mapping y = scale * t / (1 - t).

    scale should sit near the integrand's mass (for a Gamma-type weight, its
    mean is a good choice) so the image on [0, 1) is well conditioned.
    Raises AccuracyError carrying .best_estimate when the quadrature error
    estimate does not reach rtol.
    """
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale!r}")

    def mapped(t):
        w = 1.0 - t
        if w <= 0.0:
            return 0.0
        y = scale * t / w
        return f(y) * scale / (w * w)

    out = integrate.quad(mapped, 0.0, 1.0, epsabs=0.0, epsrel=rtol,
                         limit=200, full_output=1)
    val, err = out[0], out[1]
    if len(out) > 3 or not math.isfinite(val) \
            or err > 10.0 * rtol * max(abs(val), 1e-300):
        if val == 0.0 and err == 0.0:
            return 0.0
        raise AccuracyError(
            f"semi-infinite quadrature stalled (estimate {val!r}, error {err!r})",
            best_estimate=val)
    return val
