"""Precision bookkeeping, Richardson acceleration, and Laurent-coefficient fitting.

Nothing in this module knows about the gamma function; it provides the
generic machinery: a precision context threaded through all arithmetic,
limit acceleration on geometric step schedules, a linear solve that fits
Laurent coefficients through sampled values, and an empirical convergence
order diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Context, Decimal, localcontext
from typing import Sequence

from .decmath import working_context
from .errors import OrderUndefinedError, PrecisionLossError

BigReal = Decimal

_DEFAULT_GUARD = 10


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal-digit accounting for a computation.

    target_digits is what the caller wants to trust, guard_digits absorb
    rounding and cancellation, and all arithmetic runs at working_digits.
    """

    target_digits: int
    guard_digits: int
    working_digits: int

    def __post_init__(self) -> None:
        for name in ("target_digits", "guard_digits", "working_digits"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.working_digits < self.target_digits + self.guard_digits:
            raise ValueError(
                "working_digits must be >= target_digits + guard_digits "
                f"({self.working_digits} < {self.target_digits} + {self.guard_digits})"
            )

    def escalated(self, extra_digits: int) -> "PrecisionContext":
        """Same targets, wider working precision (for cancellation-prone steps)."""
        if extra_digits < 0:
            raise ValueError("extra_digits must be >= 0")
        return PrecisionContext(
            self.target_digits, self.guard_digits, self.working_digits + extra_digits
        )

    def context(self, extra_digits: int = 0) -> Context:
        return working_context(self.working_digits + extra_digits)


def make_context(target_digits: int, guard_digits: int = _DEFAULT_GUARD) -> PrecisionContext:
    """Build a PrecisionContext with working = target + guard digits."""
    if not isinstance(target_digits, int) or target_digits < 1:
        raise ValueError(f"target_digits must be a positive integer, got {target_digits!r}")
    if not isinstance(guard_digits, int) or guard_digits < 1:
        raise ValueError(f"guard_digits must be a positive integer, got {guard_digits!r}")
    return PrecisionContext(target_digits, guard_digits, target_digits + guard_digits)


@dataclass(frozen=True)
class ExtrapolationTable:
    """Richardson tableau over a geometric node schedule.

    Column 0 holds the raw samples; entry [k][j] has error orders
    assumed_order .. assumed_order+j-1 eliminated.  The estimate is the
    deepest diagonal entry, the error estimate the gap between the last
    two diagonal entries.
    """

    nodes: tuple[Decimal, ...]
    samples: tuple[Decimal, ...]
    tableau: tuple[tuple[Decimal, ...], ...]
    estimate: Decimal
    error_estimate: Decimal


def _check_geometric(nodes: Sequence[Decimal], ratio: Decimal, prec: int) -> None:
    tol = Decimal(10) ** (-(prec - 2))
    for k in range(len(nodes) - 1):
        if nodes[k + 1] == 0:
            raise ValueError("nodes must be nonzero")
        if abs(nodes[k] - ratio * nodes[k + 1]) > tol * abs(nodes[k]):
            raise ValueError(
                f"nodes are not geometric with ratio {ratio}: "
                f"nodes[{k}]={nodes[k]}, nodes[{k + 1}]={nodes[k + 1]}"
            )


def richardson_extrapolate(
    samples: Sequence[tuple[Decimal, Decimal]],
    ratio: Decimal,
    assumed_order: int,
    ctx: PrecisionContext,
) -> ExtrapolationTable:
    """Accelerate f(x) -> L as x -> 0 given samples on nodes x_k = x_0 / ratio^k.

    The error expansion is assumed to run through consecutive integer powers
    starting at ``assumed_order``; column j of the tableau removes the term
    of order assumed_order + j - 1.
    """
    if len(samples) < 2:
        raise ValueError("richardson_extrapolate needs at least 2 samples")
    if not isinstance(assumed_order, int) or assumed_order < 1:
        raise ValueError(f"assumed_order must be a positive integer, got {assumed_order!r}")
    if ratio <= 1:
        raise ValueError(f"ratio must be > 1, got {ratio}")
    nodes = tuple(x for x, _ in samples)
    values = tuple(v for _, v in samples)
    with localcontext(ctx.context(extra_digits=10)):
        _check_geometric(nodes, ratio, ctx.working_digits)
        tableau: list[tuple[Decimal, ...]] = []
        previous: tuple[Decimal, ...] = ()
        for k, value in enumerate(values):
            row = [value]
            for j in range(1, k + 1):
                factor = ratio ** (assumed_order + j - 1)
                row.append(row[j - 1] + (row[j - 1] - previous[j - 1]) / (factor - 1))
            previous = tuple(row)
            tableau.append(previous)
        estimate = tableau[-1][-1]
        error_estimate = abs(tableau[-1][-1] - tableau[-2][-2])
    return ExtrapolationTable(
        nodes=nodes,
        samples=values,
        tableau=tuple(tableau),
        estimate=estimate,
        error_estimate=error_estimate,
    )


def _solve_square(matrix: list[list[Decimal]], rhs: list[Decimal], prec: int) -> list[Decimal]:
    """Gaussian elimination with partial pivoting at ``prec`` digits."""
    n = len(matrix)
    with localcontext(working_context(prec)):
        a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
        scale = max(abs(entry) for row in matrix for entry in row)
        if scale == 0:
            raise PrecisionLossError("zero matrix in linear solve")
        floor = scale * Decimal(10) ** (-(prec - 2))
        for col in range(n):
            pivot_row = max(range(col, n), key=lambda r: abs(a[r][col]))
            if abs(a[pivot_row][col]) <= floor:
                raise PrecisionLossError(
                    "linear system is singular or ill-conditioned beyond working precision"
                )
            if pivot_row != col:
                a[col], a[pivot_row] = a[pivot_row], a[col]
            pivot = a[col][col]
            for r in range(col + 1, n):
                if a[r][col] == 0:
                    continue
                m = a[r][col] / pivot
                for c in range(col, n + 1):
                    a[r][c] -= m * a[col][c]
        solution = [Decimal(0)] * n
        for r in range(n - 1, -1, -1):
            acc = a[r][n]
            for c in range(r + 1, n):
                acc -= a[r][c] * solution[c]
            solution[r] = acc / a[r][r]
        return solution


def fit_laurent(
    samples: Sequence[tuple[Decimal, Decimal]],
    pole_order: int,
    num_coeffs: int,
    ctx: PrecisionContext,
) -> list[Decimal]:
    """Fit c_{-pole_order} .. c_{num_coeffs-pole_order-1} through the samples.

    Solves V c = f where column j of V holds x^(j - pole_order).  With
    exactly num_coeffs samples this is a plain interpolatory solve; with
    more samples a least-squares solve via the normal equations.  The
    elimination runs with enough extra digits to cover the dynamic range
    of the basis columns, so returned coefficients are limited by the
    model truncation, not the solve.
    """
    if not isinstance(pole_order, int) or pole_order < 0:
        raise ValueError(f"pole_order must be a nonnegative integer, got {pole_order!r}")
    if not isinstance(num_coeffs, int) or num_coeffs < 1:
        raise ValueError(f"num_coeffs must be a positive integer, got {num_coeffs!r}")
    if len(samples) < num_coeffs:
        raise ValueError(f"need at least {num_coeffs} samples, got {len(samples)}")
    xs = [x for x, _ in samples]
    if any(x == 0 for x in xs):
        raise ValueError("sample abscissae must be nonzero")
    if len(set(xs)) != len(xs):
        raise ValueError("sample abscissae must be distinct")

    exponents = [j - pole_order for j in range(num_coeffs)]
    build_prec = ctx.working_digits + 10
    with localcontext(working_context(build_prec)):
        matrix = [[x ** e for e in exponents] for x in xs]
        values = [v for _, v in samples]
        entries = [entry for row in matrix for entry in row if entry != 0]
        spread = max(e.adjusted() for e in entries) - min(e.adjusted() for e in entries)
    solve_prec = ctx.working_digits + 10 + min(spread + 5, 400)
    if len(samples) == num_coeffs:
        solution = _solve_square(matrix, values, solve_prec)
    else:
        with localcontext(working_context(solve_prec)):
            m = len(samples)
            normal = [
                [sum(matrix[i][r] * matrix[i][c] for i in range(m)) for c in range(num_coeffs)]
                for r in range(num_coeffs)
            ]
            rhs = [sum(matrix[i][r] * values[i] for i in range(m)) for r in range(num_coeffs)]
        solution = _solve_square(normal, rhs, solve_prec)
    with localcontext(ctx.context(extra_digits=5)):
        return [+c for c in solution]


def empirical_order(
    samples: Sequence[tuple[Decimal, Decimal]], ctx: PrecisionContext
) -> Decimal:
    """Mean observed convergence order from (node, error) pairs on geometric nodes.

    Returns the average of log_r(e_k / e_{k+1}) over consecutive pairs, where
    r is the node ratio.  A zero error anywhere means the limit was already
    attained at working precision; that is signalled with OrderUndefinedError
    rather than a number.
    """
    if len(samples) < 2:
        raise ValueError("empirical_order needs at least 2 samples")
    nodes = [x for x, _ in samples]
    errors = [abs(e) for _, e in samples]
    if any(e == 0 for e in errors):
        raise OrderUndefinedError(
            "a sample error is exactly zero: limit attained at working precision"
        )
    with localcontext(ctx.context(extra_digits=5)):
        if nodes[1] == 0 or abs(nodes[0]) <= abs(nodes[1]):
            raise ValueError("nodes must decrease in magnitude")
        ratio = abs(nodes[0] / nodes[1])
        _check_geometric(nodes, ratio, ctx.working_digits)
        ln_ratio = ratio.ln()
        total = Decimal(0)
        for k in range(len(errors) - 1):
            total += (errors[k] / errors[k + 1]).ln() / ln_ratio
        return +(total / (len(errors) - 1))
