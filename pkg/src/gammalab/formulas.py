"""The limit-formula family tying gamma's pole neighborhoods to Euler's constant.

Six bracketed expressions, each with a closed-form limit as the step x
approaches 0 (gamma below is Euler's constant, H_n the n-th harmonic
number):

  demys       x - Gamma(1/x)                                   -> gamma   (x -> +inf)
  clubsuit    1/x - Gamma(x)                                   -> gamma
  heart(n)    (-1)^(n+1)/(n! x) + Gamma(-n+x)                  -> (-1)^(n+1) (gamma - H_n) / n!
  spade(n)    1/x + (1/x - Gamma(-n+x)) / (-1 - x Gamma(-n-x)) -> (-1)^(n+1) 2/(n! + (-1)^(n+1)) (gamma - H_n),  n >= 1
  diamond     (1/x - Gamma(x)) / (-1 + x Gamma(-x))            -> -gamma/2
  unified(n)  chi/x + (1/x - Gamma(-n+x)) / (-1 - (-1)^delta x Gamma(-n-x))
              -> (-1)^(n+1) (2/(n! + chi (-1)^(n+1)))^epsilon (gamma - H_n)

with the n = 0 selectors chi = 0, delta = 1, epsilon = -1 and chi = 1,
delta = 0, epsilon = +1 otherwise, so unified(0) is exactly diamond and
unified(n >= 1) is exactly spade(n).

Every inner gamma evaluation routes through the pole-proximate recurrence
form, and each expression is evaluated at a working precision escalated by
the number of digits the leading 1/x cancellation destroys.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .decmath import as_decimal, cancellation_digits, fraction_to_decimal, magnitude_digits
from .engine import gamma_near_pole
from .errors import DomainError, OrderUndefinedError, PoleError
from .harmonic import factorial, harmonic
from .numerics import (
    ExtrapolationTable,
    PrecisionContext,
    empirical_order,
    matched_digits,
    richardson_extrapolate,
)

_MINUS_ONE = Decimal(-1)
_HALF = Decimal("0.5")

DEFAULT_X0 = Decimal(1) / Decimal(2) ** 10
DEFAULT_DEMYS_X0 = Decimal(2) ** 10
DEFAULT_NODES = 16
SCHEDULE_RATIO = Decimal(2)


class Family(str, Enum):
    DEMYS = "demys"
    CLUBSUIT = "clubsuit"
    HEART = "heart"
    SPADE = "spade"
    DIAMOND = "diamond"
    UNIFIED = "unified"


_INDEXED = {Family.HEART, Family.SPADE, Family.UNIFIED}


@dataclass(frozen=True)
class FormulaId:
    """Tagged identifier for one formula in the family (n where applicable)."""

    family: Family
    n: int | None = None

    def __post_init__(self) -> None:
        if self.family in _INDEXED:
            if not isinstance(self.n, int) or self.n < 0:
                raise ValueError(f"{self.family.value} requires an integer n >= 0, got {self.n!r}")
            if self.family is Family.SPADE and self.n < 1:
                raise ValueError(f"spade requires n >= 1, got {self.n}")
        elif self.n is not None:
            raise ValueError(f"{self.family.value} does not take an index, got n={self.n!r}")

    @classmethod
    def demys(cls) -> "FormulaId":
        return cls(Family.DEMYS)

    @classmethod
    def clubsuit(cls) -> "FormulaId":
        return cls(Family.CLUBSUIT)

    @classmethod
    def heart(cls, n: int) -> "FormulaId":
        return cls(Family.HEART, n)

    @classmethod
    def spade(cls, n: int) -> "FormulaId":
        return cls(Family.SPADE, n)

    @classmethod
    def diamond(cls) -> "FormulaId":
        return cls(Family.DIAMOND)

    @classmethod
    def unified(cls, n: int) -> "FormulaId":
        return cls(Family.UNIFIED, n)

    @property
    def label(self) -> str:
        if self.n is None:
            return self.family.value
        return f"{self.family.value}({self.n})"


@dataclass(frozen=True)
class SelectorSymbols:
    """The n-vs-0 selector triple used by the unified formula."""

    chi: int
    delta: int
    epsilon: int


def selector(n: int) -> SelectorSymbols:
    """chi = [n != 0], delta = [n == 0] (Kronecker), epsilon = -1 iff n == 0."""
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if n == 0:
        return SelectorSymbols(chi=0, delta=1, epsilon=-1)
    return SelectorSymbols(chi=1, delta=0, epsilon=1)


def _escalated(formula: FormulaId, x: Decimal, ctx: PrecisionContext) -> PrecisionContext:
    if formula.family is Family.DEMYS:
        lost = magnitude_digits(x)
    else:
        lost = cancellation_digits(x)
    return ctx.escalated(lost + 4)


def _pole_ratio(n: int, x: Decimal, inv_x: Decimal, delta: int, ctx: PrecisionContext) -> Decimal:
    """(1/x - Gamma(-n+x)) / (-1 - (-1)^delta x Gamma(-n-x)), shared verbatim by
    spade (delta = 0), diamond (delta = 1), and unified (delta from the selector),
    so the dispatch identity holds bit for bit."""
    numerator = inv_x - gamma_near_pole(n, x, ctx)
    x_gamma = x * gamma_near_pole(n, -x, ctx)
    denominator = _MINUS_ONE - (_MINUS_ONE**delta) * x_gamma
    return numerator / denominator


def evaluate_expr(formula: FormulaId, x: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """Value of the bracketed expression at step x, at escalated working precision.

    x must be nonzero; for demys x >= 4 (the step is 1/x there), for all
    other families 0 < |x| < 1/2 so no inner gamma argument can cross the
    next pole.
    """
    x = as_decimal(x)
    if x == 0:
        raise PoleError(-(formula.n or 0), "step x = 0 lands every term on a pole")
    if formula.family is Family.DEMYS:
        if x < 4:
            raise DomainError(f"demys requires x >= 4, got {x}")
    elif abs(x) >= _HALF:
        raise DomainError(f"|x| must be < 1/2, got {x}")

    esc = _escalated(formula, x, ctx)
    n = formula.n if formula.n is not None else 0
    with localcontext(esc.context()):
        inv_x = 1 / x
        if formula.family is Family.DEMYS:
            return x - gamma_near_pole(0, inv_x, esc)
        if formula.family is Family.CLUBSUIT:
            return inv_x - gamma_near_pole(0, x, esc)
        if formula.family is Family.HEART:
            sign = _MINUS_ONE ** (n + 1)
            pole_term = sign / (Decimal(factorial(n)) * x)
            return pole_term + gamma_near_pole(n, x, esc)
        if formula.family is Family.SPADE:
            return inv_x + _pole_ratio(n, x, inv_x, 0, esc)
        if formula.family is Family.DIAMOND:
            return _pole_ratio(0, x, inv_x, 1, esc)
        sel = selector(n)
        ratio = _pole_ratio(n, x, inv_x, sel.delta, esc)
        return inv_x + ratio if sel.chi else ratio


def spade_first_form(n: int, x: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """The nested first printing of spade: (1/x) [1 + (1/x - Gamma(-n+x)) / (-1/x - Gamma(-n-x))].

    Algebraically identical to the normative form used by evaluate_expr;
    kept for the numerical form-agreement check.
    """
    formula = FormulaId.spade(n)
    x = as_decimal(x)
    if x == 0 or abs(x) >= _HALF:
        raise DomainError(f"need 0 < |x| < 1/2, got {x}")
    esc = _escalated(formula, x, ctx)
    with localcontext(esc.context()):
        inv_x = 1 / x
        a = inv_x - gamma_near_pole(n, x, esc)
        b = -inv_x - gamma_near_pole(n, -x, esc)
        return inv_x * (1 + a / b)


def diamond_first_form(x: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """The first printing of diamond: (1 - 1/x - Gamma(x)) / (x - 1/x + Gamma(-x)).

    As printed this expression tends to 1, not to -gamma/2; it disagrees
    with the normative second printing, which is why the second one is
    evaluated everywhere else.  The discrepancy is surfaced by the
    printed-form agreement check instead of being silently repaired.
    """
    x = as_decimal(x)
    if x == 0 or abs(x) >= _HALF:
        raise DomainError(f"need 0 < |x| < 1/2, got {x}")
    esc = _escalated(FormulaId.diamond(), x, ctx)
    with localcontext(esc.context()):
        inv_x = 1 / x
        numerator = 1 - inv_x - gamma_near_pole(0, x, esc)
        denominator = x - inv_x + gamma_near_pole(0, -x, esc)
        return numerator / denominator


def printed_form_gap(formula: FormulaId, x: Decimal | int | str, ctx: PrecisionContext) -> Decimal:
    """|first printed form - normative form| at step x (spade and diamond only)."""
    if formula.family is Family.SPADE:
        first = spade_first_form(formula.n, x, ctx)
    elif formula.family is Family.DIAMOND:
        first = diamond_first_form(x, ctx)
    else:
        raise DomainError(f"{formula.label} has a single printed form")
    second = evaluate_expr(formula, x, ctx)
    with localcontext(ctx.context(extra_digits=5)):
        return abs(first - second)


def affine_map(formula: FormulaId) -> tuple[Fraction, Fraction]:
    """Exact rationals (m, h) with  limit = m * (gamma - H_n)  and  H_n = h.

    Inverted during extraction as gamma = limit / m + h.
    """
    n = formula.n if formula.n is not None else 0
    if formula.family in (Family.DEMYS, Family.CLUBSUIT):
        return Fraction(1), Fraction(0)
    if formula.family is Family.HEART:
        return Fraction((-1) ** (n + 1), factorial(n)), harmonic(n).value
    if formula.family is Family.SPADE:
        return (
            Fraction(2 * (-1) ** (n + 1), factorial(n) + (-1) ** (n + 1)),
            harmonic(n).value,
        )
    if formula.family is Family.DIAMOND:
        return Fraction(-1, 2), Fraction(0)
    sel = selector(n)
    denom = factorial(n) + sel.chi * (-1) ** (n + 1)
    m = Fraction((-1) ** (n + 1)) * Fraction(2, denom) ** sel.epsilon
    return m, harmonic(n).value


def target_value(formula: FormulaId, gamma_ref: Decimal, ctx: PrecisionContext) -> Decimal:
    """Closed-form limit of the formula, from exact rationals and gamma_ref."""
    m, h = affine_map(formula)
    prec = ctx.working_digits + 5
    with localcontext(ctx.context(extra_digits=5)):
        value = (gamma_ref - fraction_to_decimal(h, prec)) * fraction_to_decimal(m, prec)
    with localcontext(ctx.context()):
        return +value


def _halving_schedule(start: Decimal, count: int) -> list[Decimal]:
    values = [start]
    for _ in range(count - 1):
        values.append(values[-1] / 2)
    return values


def sample_schedule(
    formula: FormulaId, x0: Decimal, num_nodes: int, ctx: PrecisionContext
) -> tuple[list[Decimal], list[Decimal], list[Decimal]]:
    """Evaluate the formula on its geometric schedule.

    Returns (steps, extrapolation_nodes, values).  For demys the steps grow
    as x0 * 2^k and the extrapolation runs against 1/step; for everything
    else the steps themselves halve.
    """
    if num_nodes < 2:
        raise ValueError(f"num_nodes must be >= 2, got {num_nodes}")
    x0 = as_decimal(x0)
    exactness = max(0, -x0.as_tuple().exponent) + num_nodes + 10
    with localcontext(ctx.context(extra_digits=exactness)):
        if formula.family is Family.DEMYS:
            steps = [x0 * 2**k for k in range(num_nodes)]
            nodes = _halving_schedule(1 / x0, num_nodes)
        else:
            steps = _halving_schedule(x0, num_nodes)
            nodes = steps
    values = [evaluate_expr(formula, x, ctx) for x in steps]
    return steps, nodes, values


@dataclass(frozen=True)
class LaurentExpansion:
    """Laurent data of gamma at the pole -n: coefficients c_-1, c_0, c_1, ..."""

    pole: int
    coefficients: list[Decimal]
    error_estimates: list[Decimal]


def laurent_of_gamma(n: int, ctx: PrecisionContext, num_coeffs: int = 6) -> LaurentExpansion:
    """Fit the Laurent coefficients of gamma at -n from pole-proximate samples.

    Samples gamma(-n + x) on the default halving schedule and solves the
    interpolation system with a simple pole.  The reported coefficients come
    from the fit on the finer (one step smaller) node set; the error
    estimates are the differences against the coarser fit, which bound the
    truncation error of the finer one.
    """
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if not isinstance(num_coeffs, int) or num_coeffs < 2:
        raise ValueError(f"num_coeffs must be an integer >= 2, got {num_coeffs!r}")
    xs = _halving_schedule(DEFAULT_X0, num_coeffs + 1)
    samples = []
    for x in xs:
        esc = ctx.escalated(cancellation_digits(x) + 4)
        samples.append((x, gamma_near_pole(n, x, esc)))
    coarse = fit_laurent_samples(samples[:num_coeffs], ctx)
    fine = fit_laurent_samples(samples[1:], ctx)
    with localcontext(ctx.context(extra_digits=5)):
        estimates = [abs(a - b) for a, b in zip(coarse, fine)]
    return LaurentExpansion(pole=n, coefficients=fine, error_estimates=estimates)


def fit_laurent_samples(
    samples: Sequence[tuple[Decimal, Decimal]], ctx: PrecisionContext
) -> list[Decimal]:
    from .numerics import fit_laurent

    return fit_laurent(samples, pole_order=1, num_coeffs=len(samples), ctx=ctx)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of extrapolating one formula against its closed-form limit."""

    formula: FormulaId
    context: PrecisionContext
    x0: Decimal
    num_nodes: int
    samples: tuple[tuple[Decimal, Decimal], ...]
    extrapolated: Decimal
    target: Decimal
    abs_error: Decimal
    digits_matched: int
    empirical_order: Decimal | None
    status: str
    diagnostic: str | None = None


def verify_formula(
    formula: FormulaId,
    x0: Decimal | int | str,
    num_nodes: int,
    ctx: PrecisionContext,
    gamma_ref: Decimal,
) -> VerificationReport:
    """Extrapolate the formula on its schedule and compare with the closed form.

    The report passes when the extrapolation matches the target to at least
    target_digits - 2 digits and the raw sample errors shrink monotonically.
    """
    x0 = as_decimal(x0)
    steps, nodes, values = sample_schedule(formula, x0, num_nodes, ctx)
    table: ExtrapolationTable = richardson_extrapolate(
        list(zip(nodes, values)), SCHEDULE_RATIO, assumed_order=1, ctx=ctx
    )
    target = target_value(formula, gamma_ref, ctx)
    with localcontext(ctx.context(extra_digits=5)):
        abs_error = abs(table.estimate - target)
        raw_errors = [abs(v - target) for v in values]
    digits = matched_digits(abs_error, target, cap=ctx.working_digits)

    diagnostic = None
    order: Decimal | None = None
    attained = any(e == 0 for e in raw_errors)
    if attained:
        diagnostic = "limit attained at working precision on the raw schedule"
        monotone = True
    else:
        monotone = all(raw_errors[k + 1] < raw_errors[k] for k in range(len(raw_errors) - 1))
        if not monotone:
            diagnostic = "raw errors do not decrease monotonically along the schedule"
        try:
            order = empirical_order(list(zip(nodes, raw_errors)), ctx)
        except OrderUndefinedError:
            diagnostic = "empirical order undefined (zero raw error)"

    status = "pass" if (digits >= ctx.target_digits - 2 and monotone) else "fail"
    return VerificationReport(
        formula=formula,
        context=ctx,
        x0=x0,
        num_nodes=num_nodes,
        samples=tuple(zip(steps, values)),
        extrapolated=table.estimate,
        target=target,
        abs_error=abs_error,
        digits_matched=digits,
        empirical_order=order,
        status=status,
        diagnostic=diagnostic,
    )
