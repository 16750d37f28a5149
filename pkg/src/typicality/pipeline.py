"""Preparation of survey-style tables: load, clean Likert labels, impute, standardize.

Stages must run in order (clean -> impute -> standardize); each later stage
refuses input that still carries text or missing cells.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import stats

from .datamatrix import DataMatrix, as_array
from .errors import DataFormatError, DomainError
from .geometry import expected_norm
from .report import ExperimentReport, substream, write_csv

DEFAULT_MISSING_TOKENS = frozenset({"", "NA", "N/A", "NaN", "nan", "null", "-"})

# Default synthetic profile: respondents, Likert items, fraction of missing cells.
SYNTH_N = 6811
SYNTH_D = 58
SYNTH_MISSING_RATE = 0.079
SYNTH_LEVELS = 11
SYNTH_CORRELATION = 0.2


@dataclass
class CleaningReport:
    n_rows: int
    n_cols_kept: int
    imputation_rate: dict[str, float]
    overall_imputation_rate: float
    label_mappings: dict[str, dict[str, int]] = field(default_factory=dict)
    dropped_columns: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ImputationRates:
    per_column: dict[str, float]
    overall: float


def load_table(path, missing_tokens=DEFAULT_MISSING_TOKENS, delimiter: str = ",") -> DataMatrix:
    """Read a delimited text table with a header row.

    Leading lines starting with ``#`` are skipped.  Cells equal to one of
    ``missing_tokens`` (after stripping whitespace) are masked; other
    non-numeric cells are kept as text for :func:`clean_likert`.
    """
    path = Path(path)
    missing_tokens = {t.strip() for t in missing_tokens}
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        line = path.read_bytes()[: exc.start].count(b"\n") + 1
        raise DataFormatError("file is not valid UTF-8", line=line) from exc
    lines = text.splitlines()
    skip = 0
    while skip < len(lines) and lines[skip].startswith("#"):
        skip += 1
    reader = csv.reader(lines[skip:], delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("missing header row", line=skip + 1) from None
    except csv.Error as exc:
        raise DataFormatError(str(exc), line=skip + 1) from exc
    header = [h.strip() for h in header]

    rows, mask, text_cells = [], [], {}
    try:
        for row in reader:
            line_no = skip + reader.line_num
            if not row or all(not c.strip() for c in row) and len(row) <= 1:
                continue
            if len(row) != len(header):
                raise DataFormatError(f"expected {len(header)} fields, found {len(row)}", line=line_no)
            i = len(rows)
            vals, miss = [], []
            for j, cell in enumerate(row):
                cell = cell.strip()
                if cell in missing_tokens:
                    vals.append(np.nan)
                    miss.append(True)
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    vals.append(np.nan)
                    text_cells[(i, j)] = cell
                miss.append(False)
            rows.append(vals)
            mask.append(miss)
    except csv.Error as exc:
        raise DataFormatError(str(exc), line=skip + reader.line_num) from exc
    if not rows:
        raise DomainError(f"{path} has a header but no data rows (n=0)")
    return DataMatrix(np.array(rows), header, np.array(mask), text_cells)


def write_table(path, data: DataMatrix, header: dict | None = None) -> Path:
    """Write a DataMatrix as CSV; missing cells become ``NA`` and text cells are kept."""
    cols = {}
    for j, label in enumerate(data.labels):
        col = []
        for i in range(data.n):
            if data.missing_mask[i, j]:
                col.append("NA")
            elif (i, j) in data.text_cells:
                col.append(data.text_cells[(i, j)])
            else:
                v = data.values[i, j]
                col.append(str(int(v)) if float(v).is_integer() else repr(float(v)))
        cols[label] = col
    return write_csv(path, cols, header)


def load_endpoint_map(path=None) -> dict[str, dict[str, int]]:
    """Load a Likert endpoint map from JSON; ``None`` loads the bundled example."""
    if path is None:
        raw = resources.files("typicality").joinpath("data/likert_endpoints.json").read_text("utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    mapping = json.loads(raw)
    return {col: {str(k): int(v) for k, v in m.items()}
            for col, m in mapping.items() if not col.startswith("_")}


def _normalize(token: str) -> str:
    return " ".join(token.lower().split())


def clean_likert(data: DataMatrix, endpoint_map: dict | None = None) -> tuple[DataMatrix, CleaningReport]:
    """Replace endpoint text labels with integers and drop non-Likert columns.

    ``endpoint_map`` maps a column label (or ``"*"`` for every column) to a
    ``{text: integer}`` dict; matching ignores case and extra whitespace.
    A column with its own entry that still contains an unmapped token is an
    error.  A column relying on ``"*"`` (or on nothing) that cannot be fully
    mapped is treated as non-Likert and dropped.
    """
    endpoint_map = load_endpoint_map() if endpoint_map is None else endpoint_map
    default = {_normalize(k): v for k, v in endpoint_map.get("*", {}).items()}
    by_col: dict[int, dict[int, str]] = {}
    for (i, j), tok in data.text_cells.items():
        by_col.setdefault(j, {})[i] = tok

    values = data.values.copy()
    keep, dropped, applied = [], [], {}
    labels = data.labels
    for j, label in enumerate(labels):
        cells = by_col.get(j)
        if not cells:
            keep.append(j)
            continue
        own = label in endpoint_map
        mapping = {_normalize(k): v for k, v in endpoint_map[label].items()} if own else default
        unmapped = sorted({t for t in cells.values() if _normalize(t) not in mapping})
        if unmapped:
            if own:
                raise DomainError(f"column {label!r} has unmapped text token(s): {unmapped}")
            dropped.append(label)
            continue
        used = {}
        for i, tok in cells.items():
            values[i, j] = mapping[_normalize(tok)]
            used[tok] = mapping[_normalize(tok)]
        applied[label] = dict(sorted(used.items()))
        keep.append(j)

    cleaned = DataMatrix(values[:, keep], [labels[j] for j in keep], data.missing_mask[:, keep])
    rates = cleaned.missing_mask.mean(axis=0)
    report = CleaningReport(
        n_rows=cleaned.n,
        n_cols_kept=cleaned.dim,
        imputation_rate={label: float(r) for label, r in zip(cleaned.labels, rates)},
        overall_imputation_rate=float(cleaned.missing_mask.mean()),
        label_mappings=applied,
        dropped_columns=dropped,
    )
    return cleaned, report


def mean_impute(data: DataMatrix) -> tuple[DataMatrix, ImputationRates]:
    """Fill masked cells with the mean of the observed cells in the same column."""
    if data.text_cells:
        raise DomainError("data still holds text cells; run clean_likert before imputing")
    values = data.values.copy()
    mask = data.missing_mask
    observed = (~mask).sum(axis=0)
    for j in np.flatnonzero(observed == 0):
        raise DomainError(f"column {data.labels[j]!r} has no observed values")
    means = np.where(mask, 0.0, values).sum(axis=0) / observed
    values[mask] = np.broadcast_to(means, values.shape)[mask]
    rates = mask.mean(axis=0)
    result = DataMatrix(values, data.column_labels)
    return result, ImputationRates({lab: float(r) for lab, r in zip(data.labels, rates)},
                                   float(mask.mean()))


def _column_sd(X, labels):
    sd = X.std(axis=0, ddof=1)
    for j in np.flatnonzero(~(sd > 0)):
        raise DomainError(f"column {labels[j]!r} has zero variance")
    return sd


def standardize(data) -> DataMatrix:
    """Per-column z-scores with the (n-1) standard deviation."""
    X = as_array(data)
    labels = data.labels if isinstance(data, DataMatrix) else [f"x{j}" for j in range(X.shape[1])]
    if X.shape[0] < 2:
        raise DomainError("need at least 2 rows to standardize")
    mean = X.mean(axis=0)
    Z = (X - mean) / _column_sd(X, labels)
    Z -= Z.mean(axis=0)
    return DataMatrix(Z, data.column_labels if isinstance(data, DataMatrix) else None)


def correlation_matrix(data) -> np.ndarray:
    """Pearson correlation matrix; symmetric with unit diagonal."""
    Z = standardize(data).values
    R = Z.T @ Z / (Z.shape[0] - 1)
    R = np.clip(0.5 * (R + R.T), -1.0, 1.0)
    np.fill_diagonal(R, 1.0)
    return R


def _check_standardized(X, tol=1e-8):
    if X.shape[0] < 2:
        raise DomainError("need at least 2 rows")
    if np.abs(X.mean(axis=0)).max() > tol or np.abs(X.std(axis=0, ddof=1) - 1).max() > tol:
        raise DomainError("subset_norm_experiment expects standardized data (run standardize first)")


def subset_norm_experiment(data, D_list=None, n_reps: int = 1000, seed: int = 0) -> ExperimentReport:
    """Average row norm over random subsets of D columns.

    For each D, ``n_reps`` random column subsets of size D are drawn; for
    each subset the Euclidean norm of every row is taken and averaged.  The
    reported curve is the mean of those averages.  The 1-99% interval pools
    all row norms over all repetitions.
    """
    X = as_array(data)
    _check_standardized(X)
    n, p = X.shape
    D_list = list(range(3, p + 1)) if D_list is None else [int(d) for d in D_list]
    if not D_list or min(D_list) < 1 or max(D_list) > p:
        raise DomainError(f"D values must lie in [1, {p}]")
    if n_reps < 1:
        raise DomainError(f"n_reps must be >= 1, got {n_reps}")
    X2 = X * X
    mean_norm, p01, p99, rep_sd = [], [], [], []
    for D in D_list:
        rng = substream(seed, "subset_norm", D)
        pooled = np.empty((n_reps, n))
        for r in range(n_reps):
            cols = np.arange(p) if D == p else np.sort(rng.choice(p, D, replace=False))
            pooled[r] = np.sqrt(X2[:, cols].sum(axis=1))
        rep_means = pooled.mean(axis=1)
        mean_norm.append(rep_means.mean())
        rep_sd.append(rep_means.std())
        lo, hi = np.percentile(pooled, [1, 99])
        p01.append(lo)
        p99.append(hi)
    dims = np.array(D_list)
    mean_norm = np.array(mean_norm)
    sqrt_d = np.sqrt(dims)
    rel = np.abs(mean_norm / sqrt_d - 1.0)
    big = dims >= 10
    return ExperimentReport(
        name="subset_norm",
        params={"D_list": D_list, "n_reps": n_reps, "seed": seed, "n_rows": n, "n_cols": p},
        series={"by_dim": {
            "D": dims, "mean_norm": mean_norm, "p01": np.array(p01), "p99": np.array(p99),
            "rep_sd": np.array(rep_sd), "sqrt_D": sqrt_d,
            "chi_mean": np.array([expected_norm(int(d))[1] for d in dims]),
        }},
        summary={
            "monotone_increasing": bool(np.all(np.diff(mean_norm) > 0)),
            "max_rel_dev_from_sqrt_D_for_D_ge_10": float(rel[big].max()) if big.any() else None,
        },
    )


def synth_likert(n: int = SYNTH_N, D: int = SYNTH_D, levels: int = SYNTH_LEVELS,
                 correlation: float = SYNTH_CORRELATION, missing_rate: float = SYNTH_MISSING_RATE,
                 seed: int = 0, endpoint_labels: tuple[str, str] | None = None) -> DataMatrix:
    """Synthetic Likert table from a discretized equicorrelated Gaussian.

    Each latent column is ``sqrt(rho) g + sqrt(1 - rho) e`` with a shared
    factor ``g``; it is cut into ``levels`` equiprobable bins labelled
    ``0 .. levels-1``.  Cells are then masked independently with probability
    ``missing_rate``.  With ``endpoint_labels=(low, high)`` the extreme
    categories are written as those strings instead of integers, which is
    what :func:`clean_likert` undoes.  As ``levels`` grows, standardized
    columns approach the latent Gaussian.
    """
    if levels < 2:
        raise DomainError(f"levels must be >= 2, got {levels}")
    if not 0 <= correlation < 1:
        raise DomainError(f"correlation must lie in [0, 1), got {correlation}")
    if not 0 <= missing_rate < 1:
        raise DomainError(f"missing_rate must lie in [0, 1), got {missing_rate}")
    if n < 1 or D < 1:
        raise DomainError(f"need n >= 1 and D >= 1, got n={n}, D={D}")
    rng = substream(seed, "synth_likert")
    shared = rng.standard_normal((n, 1))
    latent = np.sqrt(correlation) * shared + np.sqrt(1.0 - correlation) * rng.standard_normal((n, D))
    codes = np.clip(np.floor(stats.norm.cdf(latent) * levels), 0, levels - 1)
    mask = rng.random((n, D)) < missing_rate
    labels = [f"q{j + 1:02d}" for j in range(D)]
    text_cells = {}
    if endpoint_labels is not None:
        low, high = endpoint_labels
        for code, tok in ((0, low), (levels - 1, high)):
            for i, j in zip(*np.nonzero((codes == code) & ~mask)):
                text_cells[(int(i), int(j))] = tok
    out = DataMatrix(codes, labels, mask, text_cells)
    for i, j in text_cells:
        out.values[i, j] = np.nan
    return out
