"""Observation matrix with optional labels, a missing-value mask and raw text cells."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass
class DataMatrix:
    """An ``n x D`` table of observations.

    Missing cells hold ``NaN`` and are flagged in ``missing_mask``.  Cells
    that held non-numeric, non-missing text (Likert endpoint labels, free
    text) also hold ``NaN`` and keep their original string in
    ``text_cells`` until :func:`typicality.pipeline.clean_likert` maps or
    drops them.
    """

    values: np.ndarray
    column_labels: list[str] | None = None
    missing_mask: np.ndarray | None = None
    text_cells: dict[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DomainError(f"data must be a non-empty n x D matrix, got shape {values.shape}")
        if self.missing_mask is None:
            mask = np.zeros(values.shape, dtype=bool)
        else:
            mask = np.array(self.missing_mask, dtype=bool)
            if mask.shape != values.shape:
                raise DomainError("missing_mask shape does not match values")
        values[mask] = np.nan
        if self.column_labels is not None:
            self.column_labels = [str(c) for c in self.column_labels]
            if len(self.column_labels) != values.shape[1]:
                raise DomainError("column_labels length does not match column count")
        self.values = values
        self.missing_mask = mask

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def labels(self) -> list[str]:
        if self.column_labels is None:
            return [f"x{j}" for j in range(self.dim)]
        return list(self.column_labels)

    @property
    def is_complete(self) -> bool:
        return not self.missing_mask.any() and not self.text_cells

    def to_array(self) -> np.ndarray:
        """Return a copy of the values, refusing if any cell is missing or text."""
        if self.missing_mask.any():
            raise DomainError("data contains missing cells; impute before numeric use")
        if self.text_cells:
            raise DomainError("data contains unmapped text cells; run clean_likert first")
        return self.values.copy()


def as_array(data) -> np.ndarray:
    """Coerce a DataMatrix or array-like into a finite 2-D float array."""
    if isinstance(data, DataMatrix):
        return data.to_array()
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DomainError(f"expected a 2-D array, got {arr.ndim} dimensions")
    if arr.shape[0] == 0:
        raise DomainError("data has no rows")
    if not np.all(np.isfinite(arr)):
        raise DomainError("data contains non-finite values")
    return arr
