"""Elementary arbitrary-precision building blocks on top of ``decimal``.

Every routine takes an explicit precision (significant decimal digits) and
computes inside its own local context, so nothing here depends on or mutates
the ambient thread context.  Cached constants are keyed by precision and are
read-only after creation, which keeps concurrent callers safe.
"""

from __future__ import annotations

import math
from decimal import Context, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .errors import PrecisionLossError

_EMAX = 10**7
_EMIN = -(10**7)


def working_context(prec: int) -> Context:
    """A decimal context with ``prec`` significant digits and a wide exponent range."""
    if prec < 1:
        raise ValueError(f"precision must be >= 1, got {prec}")
    return Context(prec=prec, Emax=_EMAX, Emin=_EMIN)


def as_decimal(value: Decimal | int | str) -> Decimal:
    """Exact conversion to Decimal; rejects floats to avoid silent binary noise."""
    if isinstance(value, Decimal):
        return value
    if isinstance(value, (int, str)):
        return Decimal(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Decimal exactly")


def fraction_to_decimal(fr: Fraction, prec: int) -> Decimal:
    """Round an exact rational to ``prec`` significant digits."""
    with localcontext(working_context(prec)):
        return Decimal(fr.numerator) / Decimal(fr.denominator)


def magnitude_digits(x: Decimal) -> int:
    """Decimal digits to the left of the point for |x| >= 1, else 0."""
    if x == 0:
        return 0
    return max(0, x.adjusted() + 1)


def cancellation_digits(x: Decimal) -> int:
    """Leading digits lost when 1/x-sized terms cancel: ~ceil(log10(1/|x|)) for |x| < 1."""
    if x == 0:
        raise ValueError("cancellation_digits undefined at 0")
    return max(0, -x.adjusted())


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number B_m (B_1 = -1/2 convention)."""
    if m < 0:
        raise ValueError("Bernoulli index must be >= 0")
    if m == 0:
        return Fraction(1)
    if m == 1:
        return Fraction(-1, 2)
    if m % 2 == 1:
        return Fraction(0)
    acc = Fraction(0)
    for k in range(m):
        acc += math.comb(m + 1, k) * bernoulli(k)
    return -acc / (m + 1)


@lru_cache(maxsize=None)
def pi(prec: int) -> Decimal:
    """pi to ``prec`` digits via Machin's arctangent identity."""
    with localcontext(working_context(prec + 10)):

        def atan_inv(n: int) -> Decimal:
            # arctan(1/n) = sum (-1)^k / ((2k+1) n^(2k+1))
            n2 = n * n
            term = Decimal(1) / n
            total = term
            k = 1
            while True:
                term /= n2
                piece = term / (2 * k + 1)
                if piece == 0:
                    break
                total = total - piece if k % 2 else total + piece
                k += 1
            return total

        value = 16 * atan_inv(5) - 4 * atan_inv(239)
    with localcontext(working_context(prec)):
        return +value


@lru_cache(maxsize=None)
def ln2pi(prec: int) -> Decimal:
    with localcontext(working_context(prec + 5)):
        value = (2 * pi(prec + 5)).ln()
    with localcontext(working_context(prec)):
        return +value


def sin_pi(z: Decimal, prec: int) -> Decimal:
    """sin(pi*z) with exact rational argument reduction (z is an exact decimal)."""
    frac = Fraction(z) % 2  # in [0, 2)
    sign = 1
    if frac > 1:
        frac -= 1
        sign = -1
    if frac > Fraction(1, 2):
        frac = 1 - frac
    P = prec + 10
    with localcontext(working_context(P)):
        y = pi(P) * fraction_to_decimal(frac, P)
        total = term = y
        y2 = y * y
        tol = Decimal(10) ** (-(P + 2))
        k = 1
        while term != 0 and abs(term) >= tol:
            term = -term * y2 / ((2 * k) * (2 * k + 1))
            total += term
            k += 1
        total *= sign
    with localcontext(working_context(prec)):
        return +total


def integrate_unit_interval(
    f: Callable[[Decimal], Decimal], prec: int, max_level: int = 12
) -> Decimal:
    """Tanh-sinh quadrature of ``f`` over [0, 1] to roughly ``prec`` digits.

    Assumes the integrand is analytic on the open interval and bounded by
    ~10^8 near the endpoints, which holds for every integrand in this
    package.  Raises PrecisionLossError if the level doubling stalls.
    """
    P = prec + 10
    with localcontext(working_context(P)):
        half_pi = pi(P) / 2
        quarter_pi = half_pi / 2
        tiny = Decimal(10) ** (-(P + 8))
        tol = Decimal(10) ** (-(prec + 2))

        def contrib(u: Decimal) -> Decimal:
            # weight w(u) = (pi/4) cosh(u) sech^2(s),  s = (pi/2) sinh(u);
            # abscissae t(u) = 1/(1+q), t(-u) = q/(1+q) with q = exp(-2s).
            eu = u.exp()
            inv_eu = 1 / eu
            cosh_u = (eu + inv_eu) / 2
            sinh_u = (eu - inv_eu) / 2
            s = half_pi * sinh_u
            q = (-2 * s).exp()
            onepq = 1 + q
            w = pi(P) * cosh_u * q / (onepq * onepq)
            if w < tiny:
                return Decimal(0)
            t_plus = 1 / onepq
            t_minus = q / onepq
            return w * (f(t_plus) + f(t_minus))

        # level 0: h = 1
        total = quarter_pi * f(Decimal("0.5"))
        j = 1
        while True:
            c = contrib(Decimal(j))
            if c == 0 and j > 4:
                break
            total += c
            j += 1
        previous = total  # h = 1 estimate

        h = Decimal(1)
        for level in range(1, max_level + 1):
            h /= 2
            new = Decimal(0)
            j = 1
            while True:
                c = contrib(j * h)
                if c == 0 and j * h > 4:
                    break
                new += c
                j += 2
            current = previous / 2 + h * new
            if level >= 3 and abs(current - previous) <= tol * max(Decimal(1), abs(current)):
                with localcontext(working_context(prec)):
                    return +current
            previous = current
    raise PrecisionLossError(
        f"tanh-sinh quadrature did not converge to {prec} digits in {max_level} levels"
    )
