"""Arbitrary-precision evaluation of gamma, log-gamma, and digamma on the real axis.

The production path is the Stirling series with exact Bernoulli-number
coefficients after raising the argument into the asymptotic region; the
independent (and deliberately slow) oracle is the finite Euler product
n! n^z / (z (z+1) ... (z+n)).  Arguments within 1/2 of a pole are always
evaluated through the recurrence form Gamma(1+x) / (x (x-1) ... (x-n)),
which confines all function-approximation error to the smooth factor
Gamma(1+x); the remaining factors are exact-structure arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

from .decmath import (
    as_decimal,
    bernoulli,
    fraction_to_decimal,
    ln2pi,
    magnitude_digits,
    pi,
    sin_pi,
    working_context,
)
from .errors import DomainError, PoleError
from .numerics import PrecisionContext

_MAX_ARGUMENT = Decimal(10) ** 6
_FACTORIAL_FAST_PATH = 400


@dataclass(frozen=True)
class GammaPoint:
    """A gamma evaluation together with the relative error the engine claims."""

    argument: Decimal
    value: Decimal
    claimed_relative_error: Decimal


def _reliable_digits(ctx: PrecisionContext) -> int:
    return max(ctx.working_digits - 2, ctx.target_digits)


def _stirling_threshold(prec: int) -> int:
    # Raise the argument to w >= threshold so the asymptotic tail bottoms out
    # below 10^-prec (minimum term ~ exp(-2 pi w)).
    return max(10, (2 * prec) // 5 + 6)


@lru_cache(maxsize=None)
def _stirling_coeffs(prec: int) -> tuple[Decimal, ...]:
    """B_{2n} / (2n (2n-1)) as decimals, enough terms for the threshold of ``prec``."""
    thresh = _stirling_threshold(prec)
    coeffs = []
    cutoff = Fraction(1, 10 ** (prec + 5))
    n = 1
    while True:
        b = bernoulli(2 * n)
        coeffs.append(fraction_to_decimal(b / ((2 * n) * (2 * n - 1)), prec + 5))
        if abs(b / ((2 * n) * (2 * n - 1))) / Fraction(thresh) ** (2 * n - 1) < cutoff:
            return tuple(coeffs)
        n += 1
        if n > 8 * prec:
            raise ArithmeticError("Stirling series failed to terminate")


@lru_cache(maxsize=None)
def _digamma_coeffs(prec: int) -> tuple[Decimal, ...]:
    """B_{2n} / (2n) as decimals for the digamma asymptotic series."""
    thresh = _stirling_threshold(prec)
    coeffs = []
    cutoff = Fraction(1, 10 ** (prec + 5))
    n = 1
    while True:
        b = bernoulli(2 * n)
        coeffs.append(fraction_to_decimal(b / (2 * n), prec + 5))
        if abs(b / (2 * n)) / Fraction(thresh) ** (2 * n) < cutoff:
            return tuple(coeffs)
        n += 1
        if n > 8 * prec:
            raise ArithmeticError("digamma series failed to terminate")


def _log_gamma_raw(z: Decimal, prec: int) -> Decimal:
    """ln Gamma(z) for z > 0 at ``prec`` digits (absolute error ~ 10^-prec * scale)."""
    P = prec + 5
    with localcontext(working_context(P)):
        thresh = _stirling_threshold(P)
        w = +z
        shift_product = Decimal(1)
        while w < thresh:
            shift_product *= w
            w += 1
        lnw = w.ln()
        result = (w - Decimal("0.5")) * lnw - w + ln2pi(P) / 2
        w2 = w * w
        wpow = w
        tol = Decimal(10) ** (-(P + 2))
        for coeff in _stirling_coeffs(P):
            term = coeff / wpow
            result += term
            if abs(term) < tol:
                break
            wpow *= w2
        if shift_product != 1:
            result -= shift_product.ln()
        return +result


def _gamma_positive(z: Decimal, prec: int) -> Decimal:
    """Gamma(z) for z > 0 via exp(ln Gamma) at ``prec`` reliable digits."""
    magf = 1.0
    try:
        magf = abs(math.lgamma(float(z)))
    except (OverflowError, ValueError):
        pass
    extra = len(str(int(magf))) + 2
    P = prec + 6 + extra
    with localcontext(working_context(P)):
        return _log_gamma_raw(z, P).exp()


def _check_argument(z: Decimal) -> None:
    if abs(z) > _MAX_ARGUMENT:
        raise DomainError(f"|z| = {abs(z)} exceeds the supported range {_MAX_ARGUMENT}")


def _nonpositive_integer(z: Decimal) -> bool:
    return z <= 0 and z == z.to_integral_value()


def gamma(z: Decimal | int | str, ctx: PrecisionContext) -> GammaPoint:
    """Gamma(z) on the real axis, z not a nonpositive integer."""
    z = as_decimal(z)
    _check_argument(z)
    if _nonpositive_integer(z):
        raise PoleError(int(z))
    reliable = _reliable_digits(ctx)
    claimed = Decimal(10) ** (-reliable)
    if z == z.to_integral_value() and z <= _FACTORIAL_FAST_PATH:
        with localcontext(ctx.context()):
            value = +Decimal(math.factorial(int(z) - 1))
        return GammaPoint(argument=z, value=value, claimed_relative_error=claimed)
    if z >= Decimal("0.5"):
        value = _gamma_positive(z, reliable + 4)
    else:
        nearest = int(z.to_integral_value(rounding=ROUND_HALF_EVEN))
        with localcontext(working_context(max(ctx.working_digits, -z.as_tuple().exponent + 5))):
            x = z - nearest
        if abs(x) < Decimal("0.5"):
            # z = -n + x with n = -nearest >= 0
            value = _near_pole_value(-nearest, x, reliable + 4)
        else:
            # exactly halfway between poles: reflection through positive axis
            P = reliable + 10
            with localcontext(working_context(P)):
                value = pi(P) / (sin_pi(z, P) * _gamma_positive(1 - z, P))
    with localcontext(ctx.context()):
        return GammaPoint(argument=z, value=+value, claimed_relative_error=claimed)


def log_gamma(z: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """ln Gamma(z) for z > 0."""
    z = as_decimal(z)
    _check_argument(z)
    if z <= 0:
        raise DomainError(f"log_gamma requires z > 0, got {z}")
    reliable = _reliable_digits(ctx)
    magf = 1.0
    try:
        magf = abs(math.lgamma(float(z)))
    except (OverflowError, ValueError):
        pass
    P = reliable + 8 + len(str(int(magf)))
    value = _log_gamma_raw(z, P)
    with localcontext(ctx.context()):
        return +value


def digamma(z: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """psi(z) = d/dz ln Gamma(z), z not a nonpositive integer."""
    z = as_decimal(z)
    _check_argument(z)
    if _nonpositive_integer(z):
        raise PoleError(int(z))
    reliable = _reliable_digits(ctx)
    # raising through z+k near an integer cancels ~log10(1/d) digits
    proximity = 0
    if z < Decimal("0.5"):
        dist = abs(z - z.to_integral_value(rounding=ROUND_HALF_EVEN))
        if dist != 0 and dist < 1:
            proximity = max(0, -dist.adjusted())
    P = reliable + 10 + proximity
    with localcontext(working_context(P)):
        thresh = _stirling_threshold(P)
        w = +z
        raise_sum = Decimal(0)
        while w < thresh:
            raise_sum += 1 / w
            w += 1
        result = w.ln() - 1 / (2 * w) - raise_sum
        w2 = w * w
        wpow = w2
        tol = Decimal(10) ** (-(P + 2))
        for coeff in _digamma_coeffs(P):
            term = coeff / wpow
            result -= term
            if abs(term) < tol:
                break
            wpow *= w2
    with localcontext(ctx.context()):
        return +result


def euler_product_gamma(
    z: Decimal | int | str, terms: int, ctx: PrecisionContext
) -> Decimal:
    """The finite Euler product n! n^z / (z (z+1) ... (z+n)) with n = terms.

    Converges to Gamma(z) with O(1/n) error; kept as an independent slow
    oracle for the production evaluator, never used as a production path.
    """
    z = as_decimal(z)
    _check_argument(z)
    if _nonpositive_integer(z):
        raise PoleError(int(z))
    if not isinstance(terms, int) or terms < 1:
        raise ValueError(f"terms must be a positive integer, got {terms!r}")
    P = ctx.working_digits + len(str(terms)) + 5
    with localcontext(working_context(P)):
        acc = Decimal(1)
        zk = +z
        for k in range(1, terms + 1):
            zk += 1
            acc = acc * k / zk
        n = Decimal(terms)
        npow = n ** int(z) if z == z.to_integral_value() else (z * n.ln()).exp()
        value = acc * npow / z
    with localcontext(ctx.context()):
        return +value


def _near_pole_value(n: int, x: Decimal, prec: int) -> Decimal:
    """Gamma(-n + x) = Gamma(1+x) / (x (x-1) ... (x-n)) at ``prec`` reliable digits."""
    P = prec + 8 + len(str(n + 1))
    with localcontext(working_context(P)):
        numerator = _gamma_positive(1 + x, P)
        denominator = +x
        for k in range(1, n + 1):
            denominator *= x - k
        return numerator / denominator


def gamma_near_pole(n: int, x: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """Gamma(-n + x) for 0 < |x| < 1/2 via the pole-proximate recurrence form.

    Only the smooth factor Gamma(1+x) carries function-approximation error;
    the pole factor x (x-1) ... (x-n) is exact-structure arithmetic, so the
    result keeps full relative accuracy arbitrarily close to the pole.
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    x = as_decimal(x)
    if x == 0:
        raise PoleError(-n)
    if abs(x) >= Decimal("0.5"):
        raise DomainError(f"|x| must be < 1/2 near a pole, got {x} (use gamma directly)")
    value = _near_pole_value(n, x, _reliable_digits(ctx) + 4)
    with localcontext(ctx.context()):
        return +value
