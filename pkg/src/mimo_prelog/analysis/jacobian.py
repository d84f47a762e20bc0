"""Square Jacobian of the degree-2 channel map, its determinant and the witness.

Rows are the selected outputs (r, l), l in I_r, in r-major order. Columns are
the TQR fading coordinates s[t, r, q] (t-major, then r, then q) followed by the
data symbols x[t, l], l in D_t, grouped by t.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from ..channel.model import complex_normal, ybar
from ..channel.types import (
    ChannelInput,
    ColoringMatrix,
    Dims,
    FadingRealization,
)
from ..exceptions import (
    ConstructionError,
    DimensionError,
    InvalidDimsError,
    ValidationError,
)
from ..utils.config import get_config
from ..utils.logger import get_logger, log_performance
from ..utils.streams import chunk_plan, spawn_generators
from .index_sets import (
    IndexSelection,
    Lemma5Sets,
    build_selection,
    lemma5_sets,
    selection_matrix,
    validate_selection,
)

logger = get_logger(__name__)

MatrixLike = Union["JacobianAssembly", np.ndarray]


class JacobianLayout(BaseModel):
    """Row/column descriptor plus the index arrays used to fill J in one shot."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dims: Dims
    N: int = Field(..., description="Rows = columns of the square Jacobian")
    rows: List[Tuple[int, int]] = Field(..., description="(r, l) per row, 1-based")
    columns: List[str] = Field(..., description="s[t,r,q] then x[t,l] labels, 1-based")
    xi_index: np.ndarray = Field(..., description="(row, col, r, t, l, q) of x-times-Z entries")
    data_index: np.ndarray = Field(..., description="(row, col, r, t, l) of a_{r,t}^(l) entries")

    @property
    def fading_columns(self) -> int:
        return self.dims.TQR

    @property
    def data_columns(self) -> int:
        return self.N - self.dims.TQR

    def describe(self) -> dict:
        """Row and column labels, as printed in the witness report."""
        return {
            "rows": [list(rc) for rc in self.rows],
            "columns": list(self.columns),
        }


def build_layout(dims: Dims, sel: IndexSelection) -> JacobianLayout:
    """Precompute where every nonzero entry of J goes for (dims, sel)."""
    dims.require_construction_domain()
    report = validate_selection(dims, sel)
    if not report.passed:
        raise InvalidDimsError(
            f"index selection is invalid for {dims}: {', '.join(report.failures)}",
            dims=dims,
            validation_rule="index selection invariants",
        )

    row_of = {}
    rows: List[Tuple[int, int]] = []
    for r, selected in enumerate(sel.I):
        for l in selected:
            row_of[(r, l - 1)] = len(rows)
            rows.append((r + 1, l))

    columns: List[str] = []
    xi_entries: List[Tuple[int, ...]] = []
    for t in range(dims.T):
        for r in range(dims.R):
            for q in range(dims.Q):
                col = len(columns)
                columns.append(f"s[{t + 1},{r + 1},{q + 1}]")
                xi_entries.extend(
                    (row_of[(r, l - 1)], col, r, t, l - 1, q) for l in sel.I[r]
                )

    data_entries: List[Tuple[int, ...]] = []
    for t, data in enumerate(sel.D):
        for l in data:
            col = len(columns)
            columns.append(f"x[{t + 1},{l}]")
            data_entries.extend(
                (row_of[(r, l - 1)], col, r, t, l - 1)
                for r in range(dims.R)
                if (r, l - 1) in row_of
            )

    if len(columns) != len(rows):
        raise InvalidDimsError(
            f"Jacobian for {dims} would be {len(rows)} x {len(columns)}",
            dims=dims,
            validation_rule="square Jacobian",
        )

    return JacobianLayout(
        dims=dims,
        N=len(rows),
        rows=rows,
        columns=columns,
        xi_index=np.array(xi_entries, dtype=np.intp).reshape(-1, 6),
        data_index=np.array(data_entries, dtype=np.intp).reshape(-1, 5),
    )


class JacobianAssembly(BaseModel):
    """The N x N Jacobian together with its layout."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    N: int
    layout: JacobianLayout

    @model_validator(mode="after")
    def _square(self) -> "JacobianAssembly":
        if self.matrix.shape != (self.N, self.N):
            raise DimensionError(
                f"Jacobian has shape {self.matrix.shape}, expected ({self.N}, {self.N})",
                expected_shape=(self.N, self.N),
                actual_shape=self.matrix.shape,
            )
        return self


class BezoutExponent(BaseModel):
    """Exponent e of the preimage-count bound 2^e; never expanded."""

    model_config = ConfigDict(frozen=True)

    exponent: int = Field(..., ge=0)

    def describe(self) -> str:
        return f"2^{self.exponent}"


class LogDet(BaseModel):
    """log|det J|, its phase and the numerical-singularity flag."""

    model_config = ConfigDict(frozen=True)

    log_abs: float
    phase: complex
    singular: bool
    ratio: float = Field(..., ge=0, description="smallest / largest singular value")

    @property
    def det(self) -> complex:
        if self.singular:
            return 0j
        return self.phase * np.exp(self.log_abs)


class GenericityResult(BaseModel):
    """Outcome of a batch of seeded random Jacobian draws."""

    trials: int
    nonsingular: int
    seed: int
    tol: float
    min_ratio: float
    median_ratio: float
    zero_input: bool = False
    constant_fading: bool = False

    @computed_field  # type: ignore[misc]
    @property
    def fraction(self) -> float:
        return self.nonsingular / self.trials


class WitnessResult(BaseModel):
    """An explicit (Z, x, s) with nonsingular Jacobian and its certificate."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dims: Dims
    seed: int
    Z: ColoringMatrix
    x: ChannelInput
    s: FadingRealization
    selection: IndexSelection
    steps: List[Lemma5Sets]
    certificate: LogDet
    attempts: int


def _require_trailing(array: np.ndarray, shape: Tuple[int, ...], name: str) -> None:
    if array.ndim < len(shape) or array.shape[array.ndim - len(shape):] != shape:
        raise DimensionError(
            f"{name} has shape {array.shape}, trailing axes must be {shape}",
            expected_shape=shape,
            actual_shape=array.shape,
        )


def assemble_batch(
    layout: JacobianLayout, Z: np.ndarray, x: np.ndarray, s: np.ndarray
) -> np.ndarray:
    """Jacobians for stacks Z (..., R, T, L, Q), x (..., T, L), s (..., R, T, Q).

    Leading batch axes broadcast, so one Z may be shared by many (x, s) draws.
    """
    d = layout.dims
    Z = np.asarray(Z, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    s = np.asarray(s, dtype=np.complex128)
    _require_trailing(Z, (d.R, d.T, d.L, d.Q), "coloring blocks")
    _require_trailing(x, (d.T, d.L), "channel input")
    _require_trailing(s, (d.R, d.T, d.Q), "fading realization")

    xi = layout.xi_index
    xi_values = x[..., xi[:, 3], xi[:, 4]] * Z[..., xi[:, 2], xi[:, 3], xi[:, 4], xi[:, 5]]

    da = layout.data_index
    rows_of_Z = Z[..., da[:, 2], da[:, 3], da[:, 4], :]
    a_values = (rows_of_Z * s[..., da[:, 2], da[:, 3], :]).sum(axis=-1)

    batch = np.broadcast_shapes(xi_values.shape[:-1], a_values.shape[:-1])
    matrix = np.zeros(batch + (layout.N, layout.N), dtype=np.complex128)
    matrix[..., xi[:, 0], xi[:, 1]] = xi_values
    matrix[..., da[:, 0], da[:, 1]] = a_values
    return matrix


def assemble(
    dims: Dims,
    sel: IndexSelection,
    Z: ColoringMatrix,
    x: ChannelInput,
    s: FadingRealization,
    layout: Optional[JacobianLayout] = None,
) -> JacobianAssembly:
    """
    J = [Xi~_1 ... Xi~_T | A] evaluated at (Z, x, s).

    Args:
        dims: Channel dimensions
        sel: Index selection fixing the rows and the A columns
        Z: Coloring matrix
        x: Channel input
        s: Fading realization
        layout: Precomputed layout; built from ``sel`` when omitted

    Returns:
        The square Jacobian together with its layout
    """
    layout = layout or build_layout(dims, sel)
    matrix = assemble_batch(
        layout, Z.check(dims).blocks, x.check(dims).x, s.check(dims).s
    )
    return JacobianAssembly(matrix=matrix, N=layout.N, layout=layout)


def mapping_phi(
    dims: Dims,
    sel: IndexSelection,
    Z: ColoringMatrix,
    x: ChannelInput,
    s: FadingRealization,
) -> np.ndarray:
    """The selected noise-free outputs P ybar as a function of (s, x_D)."""
    return selection_matrix(dims, sel.I) @ ybar(dims, Z, x, s)


def _as_matrix(J: MatrixLike) -> np.ndarray:
    matrix = J.matrix if isinstance(J, JacobianAssembly) else np.asarray(J)
    if matrix.ndim < 2 or matrix.shape[-1] != matrix.shape[-2]:
        raise DimensionError(
            f"expected square matrices, got shape {matrix.shape}",
            actual_shape=matrix.shape,
        )
    return matrix


def singular_value_ratio(J: MatrixLike) -> Union[float, np.ndarray]:
    """sigma_min / sigma_max, batched over leading axes; 0 for the zero matrix."""
    sv = np.linalg.svd(_as_matrix(J), compute_uv=False)
    largest = sv[..., 0]
    safe = np.where(largest > 0, largest, 1.0)
    ratio = np.where(largest > 0, sv[..., -1] / safe, 0.0)
    return float(ratio) if ratio.ndim == 0 else ratio


def is_nonsingular(J: MatrixLike, tol: Optional[float] = None) -> Union[bool, np.ndarray]:
    """Scale-free test sigma_min > tol * sigma_max."""
    tol = get_config().nonsingular_tol if tol is None else tol
    ratio = singular_value_ratio(J)
    return ratio > tol if isinstance(ratio, float) else np.asarray(ratio) > tol


def log_abs_det(J: MatrixLike, tol: Optional[float] = None) -> LogDet:
    """
    log|det J| and phase from an LU factorization.

    Args:
        J: One square matrix or an assembled Jacobian
        tol: Ratio sigma_min / sigma_max at or below which J counts as singular

    Returns:
        LogDet with ``log_abs = -inf`` and zero phase for singular matrices
    """
    matrix = _as_matrix(J)
    if matrix.ndim != 2:
        raise DimensionError("log_abs_det takes one matrix", actual_shape=matrix.shape)
    tol = get_config().nonsingular_tol if tol is None else tol
    phase, log_abs = np.linalg.slogdet(matrix)
    ratio = float(singular_value_ratio(matrix))
    singular = bool(phase == 0 or ratio <= tol)
    if singular:
        return LogDet(log_abs=float("-inf"), phase=0j, singular=True, ratio=ratio)
    return LogDet(log_abs=float(log_abs), phase=complex(phase), singular=False, ratio=ratio)


def bezout_exponent(dims: Dims, sel: IndexSelection) -> BezoutExponent:
    """sum_t |D_t| + TQR."""
    return BezoutExponent(exponent=sel.data_count + dims.TQR)


def _permutation_sign(order: Sequence[int]) -> int:
    inversions = sum(
        1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j]
    )
    return -1 if inversions % 2 else 1


def complementary_minors(
    M: np.ndarray, rows: Iterable[int], cols: Iterable[int]
) -> Tuple[int, complex, complex]:
    """Factor det M for a block-triangular zero pattern.

    Requires [M]_I^{J^c} = 0 or [M]_{I^c}^J = 0 (0-based I = rows, J = cols).
    Returns (sign, det [M]_I^J, det [M]_{I^c}^{J^c}) with
    det M = sign * det [M]_I^J * det [M]_{I^c}^{J^c}.
    """
    M = _as_matrix(M)
    n = M.shape[0]
    I = sorted(set(rows))
    J = sorted(set(cols))
    if len(I) != len(J):
        raise ValidationError(
            f"row and column sets differ in size ({len(I)} vs {len(J)})",
            field_name="cols",
            validation_rule="|I| = |J|",
        )
    Ic = [i for i in range(n) if i not in I]
    Jc = [j for j in range(n) if j not in J]
    upper_zero = not np.any(M[np.ix_(I, Jc)])
    lower_zero = not np.any(M[np.ix_(Ic, J)])
    if not (upper_zero or lower_zero):
        raise ValidationError(
            "neither off-diagonal block vanishes",
            field_name="M",
            validation_rule="block-triangular zero pattern",
        )
    sign = _permutation_sign(I + Ic) * _permutation_sign(J + Jc)
    block = complex(np.linalg.det(M[np.ix_(I, J)])) if I else 1 + 0j
    rest = complex(np.linalg.det(M[np.ix_(Ic, Jc)])) if Ic else 1 + 0j
    return sign, block, rest


def constant_fading_Z(dims: Dims, base: np.ndarray) -> ColoringMatrix:
    """Every block Z_{r,t} equal to ``base`` (L x Q, rank Q)."""
    base = np.asarray(base, dtype=np.complex128)
    if base.shape != (dims.L, dims.Q):
        raise DimensionError(
            f"base has shape {base.shape}, expected ({dims.L}, {dims.Q})",
            expected_shape=(dims.L, dims.Q),
            actual_shape=base.shape,
        )
    blocks = np.broadcast_to(base, (dims.R, dims.T, dims.L, dims.Q)).copy()
    return ColoringMatrix(blocks=blocks)


def genericity_trial(
    dims: Dims,
    sel: IndexSelection,
    trials: int,
    seed: int,
    tol: Optional[float] = None,
    *,
    Z: Optional[ColoringMatrix] = None,
    zero_input: bool = False,
    constant_fading: bool = False,
    max_workers: Optional[int] = None,
) -> GenericityResult:
    """Fraction of i.i.d. CN(0, 1) draws of (Z, x, s) with a nonsingular Jacobian.

    Trial i draws from its own generator spawned from ``seed``, in the order
    Z (or the constant-fading base), x, s. A fixed ``Z`` skips the first draw.

    Args:
        dims: Channel dimensions inside the construction domain
        sel: Index selection that fixes the Jacobian layout
        trials: Number of independent draws
        seed: Master seed; results do not depend on ``max_workers``
        tol: Nonsingularity threshold on sigma_min / sigma_max
        Z: Keep the coloring matrix fixed instead of drawing it
        zero_input: Force x = 0, which must make every draw singular
        constant_fading: Use one shared block for every Z_rt
        max_workers: Threads evaluating chunks of draws

    Returns:
        Counts and singular-value ratio statistics of the sweep
    """
    if trials < 1:
        raise ValidationError(
            f"trials must be positive, got {trials}",
            field_name="trials",
            field_value=trials,
            validation_rule=">= 1",
        )
    config = get_config()
    tol = config.nonsingular_tol if tol is None else tol
    workers = config.max_workers if max_workers is None else max_workers
    layout = build_layout(dims, sel)
    fixed = Z.check(dims).blocks if Z is not None else None
    block_shape = (dims.R, dims.T, dims.L, dims.Q)

    def draw(rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if fixed is not None:
            blocks = fixed
        elif constant_fading:
            blocks = np.broadcast_to(complex_normal(rng, (dims.L, dims.Q)), block_shape)
        else:
            blocks = complex_normal(rng, block_shape)
        x = complex_normal(rng, (dims.T, dims.L))
        if zero_input:
            x = np.zeros_like(x)
        s = complex_normal(rng, (dims.R, dims.T, dims.Q))
        return blocks, x, s

    generators = spawn_generators(seed, trials)
    bounds = np.cumsum([0] + chunk_plan(trials, config.chunk_size))

    def evaluate(span: Tuple[int, int]) -> np.ndarray:
        draws = [draw(rng) for rng in generators[span[0]:span[1]]]
        Zs, xs, ss = (np.stack(parts) for parts in zip(*draws))
        return np.atleast_1d(singular_value_ratio(assemble_batch(layout, Zs, xs, ss)))

    spans = list(zip(bounds[:-1], bounds[1:]))
    started = time.perf_counter()
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ratios = np.concatenate(list(pool.map(evaluate, spans)))
    else:
        ratios = np.concatenate([evaluate(span) for span in spans])

    result = GenericityResult(
        trials=trials,
        nonsingular=int(np.count_nonzero(ratios > tol)),
        seed=seed,
        tol=tol,
        min_ratio=float(ratios.min()),
        median_ratio=float(np.median(ratios)),
        zero_input=zero_input,
        constant_fading=constant_fading,
    )
    log_performance(
        "genericity_trial",
        time.perf_counter() - started,
        dims=str(dims),
        trials=trials,
        fraction=result.fraction,
    )
    return result


def _witness_draw(
    dims: Dims, steps: Sequence[Lemma5Sets], rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Coloring blocks and fading vectors following the inductive construction."""
    Z = complex_normal(rng, (dims.R, dims.T, dims.L, dims.Q))
    s = np.zeros((dims.R, dims.T, dims.Q), dtype=np.complex128)

    # base case on the first T receive antennas: s_{r,t} = 0 unless r = t
    for t in range(dims.T):
        s[t, t] = complex_normal(rng, (dims.Q,))

    for r, aux in enumerate(steps, start=dims.T):
        G = set(aux.G)
        L_union = set(aux.L_union)
        for t in range(dims.T):
            G_t = aux.Gsets[t]
            zero_rows = sorted((G - set(G_t)) | (L_union - set(aux.Lsets[t])))
            Z[r, t, [l - 1 for l in zero_rows], :] = 0

            pivot = np.zeros(dims.Q, dtype=np.complex128)
            pivot[G_t.index(aux.anchors[t])] = 1.0
            vector = np.linalg.solve(Z[r, t, [l - 1 for l in G_t], :], pivot)
            s[r, t] = vector / np.linalg.norm(vector)

            for l in aux.Lsets[t]:
                if abs(Z[r, t, l - 1] @ s[r, t]) == 0:
                    raise ConstructionError(
                        f"a^({l}) vanished for antenna pair ({r + 1}, {t + 1})",
                        attempts=0,
                    )
        logger.debug(f"witness step R'={r + 1}: G={aux.Gsets}, L={aux.Lsets}")
    return Z, s


def witness(
    dims: Dims,
    seed: int,
    tol: Optional[float] = None,
    retries: Optional[int] = None,
) -> WitnessResult:
    """Explicit nonsingular Jacobian: base case at R' = T, then R' = T+1, ..., R.

    x is all ones. Free entries are seeded CN(0, 1) draws; each attempt is
    certified by sigma_min > tol * sigma_max and retried on failure.

    Args:
        dims: Channel dimensions with T <= R and L > TQ
        seed: Master seed; attempt i uses the i-th spawned stream
        tol: Certificate threshold, ``witness_tol`` when omitted
        retries: Attempt budget, ``witness_retries`` when omitted

    Returns:
        The certified (Z, x, s) with its log-determinant certificate

    Raises:
        InvalidDimsError: If dims lie outside the construction domain
        ConstructionError: If no attempt passes the certificate
    """
    dims.require_construction_domain()
    config = get_config()
    tol = config.witness_tol if tol is None else tol
    retries = config.witness_retries if retries is None else retries

    selection = build_selection(dims)
    layout = build_layout(dims, selection)
    steps = [lemma5_sets(dims.with_R(R)) for R in range(dims.T + 1, dims.R + 1)]
    x = np.ones((dims.T, dims.L), dtype=np.complex128)

    best = 0.0
    for attempt, rng in enumerate(spawn_generators(seed, retries), start=1):
        try:
            Z, s = _witness_draw(dims, steps, rng)
        except (ConstructionError, np.linalg.LinAlgError) as exc:
            logger.debug(f"witness attempt {attempt} for {dims} rejected: {exc}")
            continue
        matrix = assemble_batch(layout, Z, x, s)
        certificate = log_abs_det(matrix, tol=tol)
        best = max(best, certificate.ratio)
        if not certificate.singular:
            logger.info(
                f"witness for {dims} certified on attempt {attempt}: "
                f"ratio={certificate.ratio:.3e}, log|det|={certificate.log_abs:.6f}"
            )
            return WitnessResult(
                dims=dims,
                seed=seed,
                Z=ColoringMatrix(blocks=Z),
                x=ChannelInput(x=x),
                s=FadingRealization(s=s),
                selection=selection,
                steps=steps,
                certificate=certificate,
                attempts=attempt,
            )
        logger.debug(f"witness attempt {attempt} for {dims}: ratio {certificate.ratio:.3e}")

    raise ConstructionError(
        f"no certified witness for {dims} after {retries} attempts "
        f"(best singular value ratio {best:.3e}, tolerance {tol:g})",
        attempts=retries,
    )
