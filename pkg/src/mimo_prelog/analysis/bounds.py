"""Closed-form pre-log quantities in exact rational arithmetic."""

from fractions import Fraction
from math import ceil, floor
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..channel.types import Dims
from ..exceptions import InvalidDimsError, OutOfScopeError, ValidationError
from ..utils.logger import get_logger

logger = get_logger(__name__)

ZERO = Fraction(0)


class PrelogReport(BaseModel):
    """Every bound for one configuration; all values are exact rationals."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dims: Dims
    chi_low_per_T: Dict[int, Fraction] = Field(
        ..., description="chi_low(T') for T' in [1:min(T, R)]"
    )
    t_opt: Fraction
    eta: Fraction
    chi_star: Fraction
    chi_star_clamped: Fraction
    m_star: int
    zheng_tse: Fraction
    best_T: int
    best_chi: Fraction
    chi_star_ceiling: Fraction


def clamp(value: Fraction) -> Fraction:
    """Negative bounds carry no information; report them as zero."""
    return max(value, ZERO)


def chi_low(dims: Dims, Tprime: int) -> Fraction:
    """
    min{T'(1 - 1/L), R(1 - T'Q/L)} with T' transmit antennas switched on.

    Args:
        dims: Channel dimensions
        Tprime: Active transmit antennas, 1 <= Tprime <= R

    Returns:
        The exact bound; negative values are returned unclamped

    Raises:
        OutOfScopeError: If Tprime > R
    """
    if Tprime < 1:
        raise ValidationError(
            f"Tprime must be positive, got {Tprime}",
            field_name="Tprime",
            field_value=Tprime,
            validation_rule=">= 1",
        )
    if Tprime > dims.R:
        raise OutOfScopeError(
            f"the lower bound needs Tprime <= R, got Tprime={Tprime}, R={dims.R}",
            field_name="Tprime",
            field_value=Tprime,
            validation_rule="Tprime <= R",
        )
    L = dims.L
    increasing = Tprime * (1 - Fraction(1, L))
    decreasing = dims.R * (1 - Fraction(Tprime * dims.Q, L))
    return min(increasing, decreasing)


def t_opt(dims: Dims) -> Fraction:
    """RL / (L + RQ - 1), where the two branches of chi_low cross."""
    return Fraction(dims.R * dims.L, dims.L + dims.R * dims.Q - 1)


def eta(dims: Dims) -> Fraction:
    """max{R(1 - ceil(T_opt) Q / L), floor(T_opt)(1 - 1/L)}."""
    crossing = t_opt(dims)
    return max(
        dims.R * (1 - Fraction(ceil(crossing) * dims.Q, dims.L)),
        floor(crossing) * (1 - Fraction(1, dims.L)),
    )


def chi_star(dims: Dims) -> Fraction:
    """Best lower bound over antenna switch-off: T(1 - 1/L) up to T_opt, eta beyond."""
    if dims.T <= t_opt(dims):
        return dims.T * (1 - Fraction(1, dims.L))
    return eta(dims)


def zheng_tse(dims: Dims) -> Tuple[int, Fraction]:
    """Constant block-fading pre-log M*(1 - M*/L), M* = min{T, R, floor(L/2)}."""
    m_star = min(dims.T, dims.R, dims.L // 2)
    return m_star, m_star * (1 - Fraction(m_star, dims.L))


def best_T(dims: Dims) -> Tuple[int, Fraction]:
    """Exhaustive argmax of chi_low over T' in [1:min(T, R)], ties to the smaller T'."""
    best = (1, chi_low(dims, 1))
    for Tprime in range(2, min(dims.T, dims.R) + 1):
        value = chi_low(dims, Tprime)
        if value > best[1]:
            best = (Tprime, value)
    return best


def chi_star_ceiling(L: int, Q: int) -> Fraction:
    """Ceiling floor((L-1)/Q)(1 - 1/L) on chi_star over all antenna counts."""
    if not 1 <= Q <= L:
        raise ValidationError(
            f"need 1 <= Q <= L, got Q={Q}, L={L}", field_name="Q", validation_rule="1 <= Q <= L"
        )
    return ((L - 1) // Q) * (1 - Fraction(1, L))


def min_R_for_T(T: int, L: int, Q: int) -> int:
    """Smallest R with T <= T_opt, i.e. R >= T(L-1) / (L-TQ)."""
    if L <= T * Q:
        raise InvalidDimsError(
            f"T <= T_opt is unreachable when L <= TQ (L={L}, TQ={T * Q})",
            validation_rule="L > TQ",
        )
    return max(1, ceil(Fraction(T * (L - 1), L - T * Q)))


def prelog_report(dims: Dims) -> PrelogReport:
    """
    All closed-form quantities for ``dims`` in one report.

    Args:
        dims: Channel dimensions

    Returns:
        Exact rational bounds, with chi_star also given clamped at zero
    """
    per_T = {Tprime: chi_low(dims, Tprime) for Tprime in range(1, min(dims.T, dims.R) + 1)}
    m_star, constant_fading = zheng_tse(dims)
    tbest, best_value = best_T(dims)
    star = chi_star(dims)
    if star < 0:
        logger.info(f"chi_star for {dims} is negative ({star}); clamped to 0")
    return PrelogReport(
        dims=dims,
        chi_low_per_T=per_T,
        t_opt=t_opt(dims),
        eta=eta(dims),
        chi_star=star,
        chi_star_clamped=clamp(star),
        m_star=m_star,
        zheng_tse=constant_fading,
        best_T=tbest,
        best_chi=best_value,
        chi_star_ceiling=chi_star_ceiling(dims.L, dims.Q),
    )
