"""Row-selection, pilot and data index sets for the square Jacobian.

All index sets use 1-based positions in [1:L] and are stored as sorted lists.
"""

import itertools
from math import lcm
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..channel.types import Dims
from ..exceptions import AuxiliarySetsError, IndexConstructionError, InvalidDimsError
from ..utils.logger import get_logger

logger = get_logger(__name__)

IndexSets = List[List[int]]


def _normalize(sets: Sequence[Sequence[int]]) -> IndexSets:
    return [sorted(int(i) for i in s) for s in sets]


class IndexSelection(BaseModel):
    """The sets I_r, P_t, D_t together with theta_R and the row parameters k, ell."""

    model_config = ConfigDict(frozen=True)

    I: IndexSets = Field(..., description="Row selection I_r per receive antenna")
    P: IndexSets = Field(..., description="Pilot (conditioned) positions per transmit antenna")
    D: IndexSets = Field(..., description="Data positions D_t = [1:L] minus P_t")
    theta: Optional[int] = Field(None, description="theta_R = sum_t |P_t|")
    k: Optional[int] = None
    ell: Optional[int] = None

    @field_validator("I", "P", "D", mode="before")
    @classmethod
    def _sorted(cls, value: Sequence[Sequence[int]]) -> IndexSets:
        return _normalize(value)

    @property
    def rows(self) -> int:
        return sum(len(i) for i in self.I)

    @property
    def data_count(self) -> int:
        return sum(len(d) for d in self.D)

    def replace(self, **changes) -> "IndexSelection":
        update = {
            key: _normalize(value) if key in ("I", "P", "D") else value
            for key, value in changes.items()
        }
        return self.model_copy(update=update)


class Lemma5Sets(BaseModel):
    """Auxiliary sets used by the inductive step from R - 1 to R receive antennas."""

    model_config = ConfigDict(frozen=True)

    Ptilde: IndexSets
    Lsets: IndexSets
    Gsets: IndexSets
    anchors: List[int]

    @property
    def G(self) -> List[int]:
        return sorted(itertools.chain.from_iterable(self.Gsets))

    @property
    def L_union(self) -> List[int]:
        return sorted(itertools.chain.from_iterable(self.Lsets))


class SelectionReport(BaseModel):
    """Pass/fail outcome of every IndexSelection invariant."""

    checks: Dict[str, bool]
    messages: Dict[str, str] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


def _theta_formula(dims: Dims) -> int:
    return max(dims.T, dims.TQR - (dims.R - dims.T) * dims.L)


def theta_R(dims: Dims) -> int:
    """Total pilot count max{T, TQR - (R - T) L}."""
    dims.require_construction_domain()
    return _theta_formula(dims)


def row_parameters(dims: Dims) -> Tuple[int, int]:
    """(k, ell) with k = min{floor((TL-T)/(L-TQ)), R} and ell the division remainder."""
    dims.require_construction_domain()
    quotient, ell = divmod(dims.TL - dims.T, dims.L - dims.TQ)
    return min(quotient, dims.R), ell


def build_I(dims: Dims) -> IndexSets:
    """Row selections: as many full blocks [1:L] as possible, then [1:TQ+ell], then [1:TQ]."""
    k, ell = row_parameters(dims)
    sets: IndexSets = []
    for r in range(1, dims.R + 1):
        if r <= k:
            size = dims.L
        elif r == k + 1:
            size = dims.TQ + ell
        else:
            size = dims.TQ
        sets.append(list(range(1, size + 1)))
    return sets


def pilot_fill_order(dims: Dims) -> IndexSets:
    """Pilot sets in the order the cyclic fill visits them.

    Step j in [1:theta_R] places position ((j-1) mod L) + 1 into P_t with
    t = j + floor((j-1) / lcm(T, L)) taken mod T (representatives in [1:T]).
    At every wrap of the position counter the narrative rule (smallest t'
    among the emptiest sets without position 1) is evaluated as a cross-check.
    """
    theta = theta_R(dims)
    T, L = dims.T, dims.L
    period = lcm(T, L)
    order: IndexSets = [[] for _ in range(T)]
    members: List[Set[int]] = [set() for _ in range(T)]

    for j in range(1, theta + 1):
        position = (j - 1) % L + 1
        t = (j + (j - 1) // period - 1) % T + 1

        if j > 1 and position == 1:
            eligible = [u for u in range(1, T + 1) if 1 not in members[u - 1]]
            if not eligible:
                raise IndexConstructionError(
                    f"no transmit antenna without position 1 is left at step j={j} "
                    f"before theta_R={theta} was reached for {dims}",
                    claim="pilot restart rule",
                )
            smallest = min(len(members[u - 1]) for u in eligible)
            expected = min(u for u in eligible if len(members[u - 1]) == smallest)
            if expected != t:
                logger.warning(
                    f"pilot fill for {dims}: closed-form rule restarts at P_{t}, "
                    f"narrative rule would restart at P_{expected} (step j={j})"
                )

        if position in members[t - 1]:
            raise IndexConstructionError(
                f"position {position} would enter P_{t} twice at step j={j} for {dims}",
                claim="pilot sets are duplicate free",
            )
        members[t - 1].add(position)
        order[t - 1].append(position)

    return order


def build_P(dims: Dims) -> IndexSets:
    """
    Pilot sets P_t, each sorted ascending.

    Args:
        dims: Channel dimensions inside the construction domain

    Returns:
        T lists of pilot positions in [1:L]

    Raises:
        IndexConstructionError: If the cyclic fill cannot continue
    """
    return _normalize(pilot_fill_order(dims))


def build_D(dims: Dims, P: Sequence[Sequence[int]]) -> IndexSets:
    """Data sets D_t = [1:L] minus P_t."""
    full = range(1, dims.L + 1)
    return [[i for i in full if i not in set(p)] for p in P]


def build_selection(dims: Dims) -> IndexSelection:
    """The canonical selection (I, P, D, theta_R, k, ell) for ``dims``."""
    k, ell = row_parameters(dims)
    P = build_P(dims)
    selection = IndexSelection(
        I=build_I(dims), P=P, D=build_D(dims, P), theta=theta_R(dims), k=k, ell=ell
    )
    logger.debug(f"selection for {dims}: theta={selection.theta}, k={k}, ell={ell}")
    return selection


def _partition_G(
    available: List[int], P: IndexSets, Q: int, t: int = 0
) -> Optional[IndexSets]:
    """Backtracking search for disjoint Q-subsets G_t of ``available`` meeting P_t."""
    if t == len(P):
        return [] if not available else None
    pilots = set(P[t])
    for combo in itertools.combinations(available, Q):
        if not pilots.intersection(combo):
            continue
        rest = [i for i in available if i not in combo]
        tail = _partition_G(rest, P, Q, t + 1)
        if tail is not None:
            return [list(combo)] + tail
    return None


def lemma5_sets(dims: Dims) -> Lemma5Sets:
    """
    Auxiliary sets for going from R - 1 to R receive antennas.

    L_t = Ptilde_t minus P_t, where Ptilde comes from the same construction
    with R - 1 antennas. G_t partitions I_R minus the union of L_t into
    Q-sets, each meeting P_t; the search is exhaustive, smallest index first.

    Args:
        dims: Channel dimensions with R > T

    Returns:
        Ptilde, L, G and the anchor index of each G_t inside P_t

    Raises:
        InvalidDimsError: If R <= T or dims lie outside the construction domain
        AuxiliarySetsError: If the L sets overlap or no partition G exists
    """
    if dims.R <= dims.T:
        raise InvalidDimsError(
            f"the R-1 to R step needs R > T, got {dims}",
            dims=dims,
            validation_rule="R > T",
        )
    dims.require_construction_domain()

    P = build_P(dims)
    Ptilde = build_P(dims.with_R(dims.R - 1))
    I_R = set(build_I(dims)[-1])
    Lsets = [sorted(set(pt) - set(p)) for pt, p in zip(Ptilde, P)]

    seen: Set[int] = set()
    for t, lt in enumerate(Lsets, start=1):
        if seen.intersection(lt):
            raise AuxiliarySetsError(
                f"L_{t} overlaps an earlier L set for {dims}", claim="L_t pairwise disjoint"
            )
        seen.update(lt)
    if not seen <= I_R:
        raise AuxiliarySetsError(
            f"union of L_t {sorted(seen)} is not inside I_R for {dims}",
            claim="L_t subset of I_R",
        )

    available = sorted(I_R - seen)
    if len(available) != dims.TQ:
        raise AuxiliarySetsError(
            f"|I_R minus L| = {len(available)} but T*Q = {dims.TQ} for {dims}",
            claim="G partition exists",
        )
    Gsets = _partition_G(available, P, dims.Q)
    if Gsets is None:
        raise AuxiliarySetsError(
            f"no partition of {available} into Q-sets meeting each P_t for {dims}",
            claim="G partition exists",
        )
    anchors = [min(set(g) & set(p)) for g, p in zip(Gsets, P)]
    return Lemma5Sets(Ptilde=Ptilde, Lsets=Lsets, Gsets=Gsets, anchors=anchors)


def validate_selection(dims: Dims, sel: IndexSelection) -> SelectionReport:
    """Check every IndexSelection invariant; never raises."""
    full = set(range(1, dims.L + 1))
    checks: Dict[str, bool] = {}
    messages: Dict[str, str] = {}

    def record(name: str, ok: bool, message: str) -> None:
        checks[name] = bool(ok)
        if not ok:
            messages[name] = message

    shapes_ok = len(sel.I) == dims.R and len(sel.P) == dims.T and len(sel.D) == dims.T
    record("shapes", shapes_ok, "expected R row sets and T pilot/data sets")

    in_range = all(
        set(s) <= full and len(set(s)) == len(s) for s in (*sel.I, *sel.P, *sel.D)
    )
    record("index_range", in_range, "indices must be distinct and inside [1:L]")

    rows_target = dims.jacobian_size
    record(
        "rows_total",
        sel.rows == rows_target,
        f"sum |I_r| = {sel.rows}, expected {rows_target}",
    )

    theta = _theta_formula(dims)
    pilots = [len(p) for p in sel.P]
    record(
        "pilot_total",
        sum(pilots) == theta,
        f"sum |P_t| = {sum(pilots)}, expected {theta}",
    )
    if sel.theta is not None:
        record("theta_recorded", sel.theta == theta, f"theta={sel.theta}, expected {theta}")

    record(
        "pilot_size_cap",
        all(size <= dims.TQ for size in pilots),
        f"some |P_t| exceeds TQ={dims.TQ}: {pilots}",
    )
    record(
        "pilot_balance",
        bool(pilots) and max(pilots) - min(pilots) <= 1,
        f"pilot sizes differ by more than one: {pilots}",
    )

    complement_ok = shapes_ok and all(
        not (set(d) & set(p)) and (set(d) | set(p)) == full
        for d, p in zip(sel.D, sel.P)
    )
    record("data_complement", complement_ok, "D_t must be the complement of P_t")

    columns = dims.TQR + sel.data_count
    record(
        "squareness",
        sel.rows == columns,
        f"rows {sel.rows} != columns TQR + sum |D_t| = {columns}",
    )

    report = SelectionReport(checks=checks, messages=messages)
    if not report.passed:
        logger.info(f"selection for {dims} failed: {report.failures}")
    return report


def selection_matrix(dims: Dims, I: Sequence[Sequence[int]]) -> np.ndarray:
    """0/1 matrix P = diag([I_L]_{I_1}, ..., [I_L]_{I_R}) of shape (sum |I_r|) x RL."""
    rows = [(r * dims.L + i - 1) for r, idx in enumerate(I) for i in idx]
    matrix = np.zeros((len(rows), dims.RL))
    matrix[np.arange(len(rows)), rows] = 1.0
    return matrix


def sweep_grid(max_R: int = 6, max_Q: int = 3, max_L: int = 8) -> Iterator[Dims]:
    """All dims with 1 <= T <= R <= max_R, 1 <= Q <= max_Q, TQ < L <= max_L."""
    for T in range(1, max_R + 1):
        for R in range(T, max_R + 1):
            for Q in range(1, max_Q + 1):
                for L in range(T * Q + 1, max_L + 1):
                    yield Dims(T=T, R=R, L=L, Q=Q)
