"""Report encoding: JSON (sorted keys, no timestamps) and CSV through pandas.

Complex numbers become ``[re, im]``, matrices row-major nested lists, exact
rationals ``"p/q"`` strings and non-finite floats the strings ``"inf"``,
``"-inf"`` or ``"nan"``.
"""

import json
import math
import sys
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..exceptions import FileOperationError
from .config import OutputSettings
from .logger import get_logger

logger = get_logger(__name__)


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"


def rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def rational_fields(name: str, value: Fraction) -> Dict[str, Any]:
    """``{name: "p/q", name_float: p/q}``."""
    return {name: rational(value), f"{name}_float": float(value)}


def _float(value: float) -> Any:
    if math.isfinite(value):
        return value
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


def encode(value: Any) -> Any:
    """Convert a report value to plain JSON-compatible Python objects."""
    if isinstance(value, BaseModel):
        return encode(value.model_dump())
    if isinstance(value, Mapping):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, Fraction):
        return rational(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _float(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return [_float(value.real), _float(value.imag)]
    if isinstance(value, np.ndarray):
        return [encode(item) for item in value] if value.ndim else encode(value.item())
    if isinstance(value, (list, tuple)):
        return [encode(item) for item in value]
    if isinstance(value, Path):
        return str(value)
    return value


def to_json(report: Mapping[str, Any]) -> str:
    return json.dumps(encode(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def to_csv(rows: Sequence[Mapping[str, Any]], columns: Optional[List[str]] = None) -> str:
    """One CSV row per mapping; values encoded exactly as in the JSON report."""
    frame = pd.DataFrame([encode(row) for row in rows], columns=columns)
    return frame.to_csv(index=False, lineterminator="\n")


def write_report(text: str, out: Optional[Path] = None) -> Optional[Path]:
    """
    Write to ``out`` (relative paths honour PRELOG_OUTPUT_DIR) or to stdout.

    Args:
        text: Rendered report
        out: Destination file; stdout when None

    Returns:
        The resolved path written, or None for stdout

    Raises:
        FileOperationError: If the file cannot be written
    """
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    target = OutputSettings().resolve(Path(out))
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FileOperationError(
            f"cannot write report to {target}: {exc}",
            file_path=str(target),
            operation="write",
            original_exception=exc,
        ) from exc
    logger.info(f"report written to {target}")
    return target
