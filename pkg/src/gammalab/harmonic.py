"""Exact harmonic numbers and factorials, plus their integral cross-checks.

Harmonic numbers are kept as exact reduced fractions (H_0 = 0 by
convention).  Two quadrature checks tie them to the gamma machinery
without ever computing Euler's constant here: the integral of
(1 - t^n) / (1 - t) over [0, 1] reproduces H_n, and the integral of
psi(1 + t) over [0, 1] vanishes (it telescopes to ln Gamma(2) - ln
Gamma(1)).  A reference value for Euler's constant, when one is needed,
is always injected by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .decmath import fraction_to_decimal, integrate_unit_interval
from .engine import digamma
from .numerics import PrecisionContext


@dataclass(frozen=True)
class HarmonicValue:
    """H_n = sum_{k=1..n} 1/k as an exact reduced fraction."""

    index: int
    value: Fraction


def factorial(n: int) -> int:
    """Exact n!."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return math.factorial(n)


def harmonic(n: int) -> HarmonicValue:
    """Exact H_n, with H_0 = 0."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    total = Fraction(0)
    for k in range(1, n + 1):
        total += Fraction(1, k)
    return HarmonicValue(index=n, value=total)


def harmonic_via_euler_integral(n: int, ctx: PrecisionContext) -> Decimal:
    """H_n as the integral of (1 - t^n) / (1 - t) over [0, 1].

    The integrand equals the polynomial 1 + t + ... + t^(n-1) (value n at
    the removable point t = 1), which is the form actually evaluated: it is
    free of the 0/0 cancellation near t = 1.
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if n == 0:
        return Decimal(0)
    prec = ctx.working_digits + 5

    def integrand(t: Decimal) -> Decimal:
        acc = Decimal(1)
        for _ in range(n - 1):
            acc = acc * t + 1
        return acc

    value = integrate_unit_interval(integrand, prec)
    with localcontext(ctx.context()):
        return +value


def digamma_unit_integral(ctx: PrecisionContext) -> Decimal:
    """Integral of psi(1 + t) over [0, 1]; exactly zero in the limit.

    This is the non-circular form of the fractional-harmonic identity: the
    fractional harmonic number H_t equals psi(1 + t) plus Euler's constant,
    so integrating H_t over [0, 1] returns the constant itself iff this
    integral vanishes.
    """
    prec = ctx.working_digits + 5
    inner = PrecisionContext(prec, 10, prec + 10)

    def integrand(t: Decimal) -> Decimal:
        return digamma(1 + t, inner)

    value = integrate_unit_interval(integrand, prec)
    with localcontext(ctx.context()):
        return +value


def vanishing_term(n: int, gamma_ref: Decimal, ctx: PrecisionContext) -> Decimal:
    """(-1)^(n+1) (gamma_ref - H_n) / n!, the closed form that decays to zero."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    h = harmonic(n).value
    scale = Fraction((-1) ** (n + 1), factorial(n))
    with localcontext(ctx.context(extra_digits=5)):
        value = (gamma_ref - fraction_to_decimal(h, ctx.working_digits + 5)) * fraction_to_decimal(
            scale, ctx.working_digits + 5
        )
    with localcontext(ctx.context()):
        return +value
