"""Human-evaluation statistics over Likert annotations.

Covers the full reporting chain: loading annotation CSVs, per-annotator
and per-model aggregates, Krippendorff's alpha (nominal, ordinal, or
interval) via the coincidence matrix, Cohen's kappa with a co-rated-count
weighted pairwise variant, and the three rating treatments (identity,
adjacent-category merging, annotator outlier dropping).

Rating matrices are items x raters with None for missing cells; every
coefficient here tolerates missing data that way.
"""
from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    IntegrityError,
    ParseError,
    TreatmentError,
    UndefinedAgreementError,
)

MODELS = ("gpt35", "gpt4")
METRICS = ("usefulness", "readability", "relevance")
PREFERENCES = ("multimodal", "text_only", "same")
TREATMENTS = ("normal", "merging", "drop_outliers")
ALPHA_LEVELS = ("nominal", "ordinal", "interval")

# adjacent-category merge: 2-3 collapse to one band, 4-5 to another
MERGING_MAP = {1: 1, 2: 2, 3: 2, 4: 3, 5: 3}

CSV_HEADER = (
    "item_id",
    "model",
    "annotator_id",
    "usefulness",
    "readability",
    "relevance",
    "preference",
)

DEFAULT_Z = 1.0


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's judgment of one generated answer.

    Likert fields may be None for preference-only rows (votes collected
    without a scoring pass).
    """

    item_id: str
    model: str
    annotator_id: int
    usefulness: int | None
    readability: int | None
    relevance: int | None
    preference: str

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.preference not in PREFERENCES:
            raise ValueError(f"unknown preference {self.preference!r}")
        for metric in METRICS:
            value = getattr(self, metric)
            if value is not None and not 1 <= value <= 5:
                raise ValueError(f"{metric} must be in [1, 5], got {value}")

    def rating(self, metric: str) -> int | None:
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        return getattr(self, metric)


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    """Read annotation records from CSV, enforcing header and uniqueness."""
    records: list[AnnotationRecord] = []
    seen: set[tuple[str, int]] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ParseError(
                f"expected header {','.join(CSV_HEADER)}", line=1
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise ParseError(
                    f"expected {len(CSV_HEADER)} fields, got {len(row)}",
                    line=line_no,
                )
            try:
                record = AnnotationRecord(
                    item_id=row[0].strip(),
                    model=row[1].strip(),
                    annotator_id=int(row[2]),
                    usefulness=_likert_cell(row[3]),
                    readability=_likert_cell(row[4]),
                    relevance=_likert_cell(row[5]),
                    preference=row[6].strip(),
                )
            except ValueError as exc:
                raise ParseError(str(exc), line=line_no) from exc
            key = (record.item_id, record.annotator_id)
            if key in seen:
                raise IntegrityError(
                    f"duplicate annotation for item {record.item_id!r} "
                    f"by annotator {record.annotator_id}"
                )
            seen.add(key)
            records.append(record)
    return records


def _likert_cell(cell: str) -> int | None:
    cell = cell.strip()
    return int(cell) if cell else None


def write_annotations(path: str | Path, records: Sequence[AnnotationRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(_csv_row(record))


def append_annotation(path: str | Path, record: AnnotationRecord) -> None:
    """Append one record, writing the header first on a fresh file."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        if fresh:
            writer.writerow(CSV_HEADER)
        writer.writerow(_csv_row(record))


def _csv_row(record: AnnotationRecord) -> list[str]:
    return [
        record.item_id,
        record.model,
        str(record.annotator_id),
        "" if record.usefulness is None else str(record.usefulness),
        "" if record.readability is None else str(record.readability),
        "" if record.relevance is None else str(record.relevance),
        record.preference,
    ]


# ---------------------------------------------------------------------------
# aggregates


@dataclass
class AnnotatorSummary:
    annotator_id: int
    answers: int
    means: dict[str, float | None]
    preference_count: int
    preference_rate: float


@dataclass
class ModelSummary:
    model: str  # gpt35 | gpt4 | both
    answers: int
    means: dict[str, float | None]
    stdevs: dict[str, float | None]  # population standard deviation
    preference_count: int
    preference_rate: float


@dataclass
class AggregateReport:
    annotators: list[AnnotatorSummary]
    models: dict[str, ModelSummary]

    def to_dict(self) -> dict:
        return {
            "annotators": [vars(a).copy() for a in self.annotators],
            "models": {name: vars(m).copy() for name, m in self.models.items()},
        }


def aggregate(records: Sequence[AnnotationRecord]) -> AggregateReport:
    """Per-annotator means and preference rates, per-model means and
    population standard deviations."""
    if not records:
        raise ValueError("no records to aggregate")

    annotators: list[AnnotatorSummary] = []
    for annotator_id in sorted({r.annotator_id for r in records}):
        rows = [r for r in records if r.annotator_id == annotator_id]
        preferred = sum(r.preference == "multimodal" for r in rows)
        annotators.append(
            AnnotatorSummary(
                annotator_id=annotator_id,
                answers=len(rows),
                means={m: _mean([r.rating(m) for r in rows]) for m in METRICS},
                preference_count=preferred,
                preference_rate=preferred / len(rows),
            )
        )

    models: dict[str, ModelSummary] = {}
    for name in (*MODELS, "both"):
        rows = [r for r in records if name == "both" or r.model == name]
        if not rows:
            continue
        preferred = sum(r.preference == "multimodal" for r in rows)
        models[name] = ModelSummary(
            model=name,
            answers=len(rows),
            means={m: _mean([r.rating(m) for r in rows]) for m in METRICS},
            stdevs={m: _pstdev([r.rating(m) for r in rows]) for m in METRICS},
            preference_count=preferred,
            preference_rate=preferred / len(rows),
        )
    return AggregateReport(annotators=annotators, models=models)


def _present(values: Sequence[int | None]) -> list[int]:
    return [v for v in values if v is not None]


def _mean(values: Sequence[int | None]) -> float | None:
    present = _present(values)
    return sum(present) / len(present) if present else None


def _pstdev(values: Sequence[int | None]) -> float | None:
    present = _present(values)
    if not present:
        return None
    mu = sum(present) / len(present)
    return math.sqrt(sum((v - mu) ** 2 for v in present) / len(present))


# ---------------------------------------------------------------------------
# agreement coefficients

Matrix = Sequence[Sequence[float | None]]


def krippendorff_alpha(matrix: Matrix, level: str = "ordinal") -> float:
    """1 - D_o/D_e over the coincidence matrix of pairable values.

    Rows are items, columns raters, None marks a missing rating. Items
    with fewer than two ratings cannot form pairs and drop out; if every
    item drops out the coefficient is undefined. D_e of zero means only
    one category was ever used, which reads as perfect agreement.
    """
    if level not in ALPHA_LEVELS:
        raise ValueError(f"unknown alpha level {level!r}")
    units = [_present_row(row) for row in matrix]
    units = [u for u in units if len(u) >= 2]
    if not units:
        raise UndefinedAgreementError("every item has fewer than two ratings")

    categories = sorted({v for unit in units for v in unit})
    position = {c: i for i, c in enumerate(categories)}
    k = len(categories)

    coincidence = np.zeros((k, k), dtype=np.float64)
    for unit in units:
        weight = 1.0 / (len(unit) - 1)
        for i, a in enumerate(unit):
            for j, b in enumerate(unit):
                if i != j:
                    coincidence[position[a], position[b]] += weight

    marginals = coincidence.sum(axis=1)
    total = float(marginals.sum())
    delta = _squared_distances(categories, marginals, level)
    d_observed = float((coincidence * delta).sum())
    d_expected = float((np.outer(marginals, marginals) * delta).sum()) / (total - 1)
    if d_expected == 0.0:
        return 1.0
    return 1.0 - d_observed / d_expected


def _present_row(row: Sequence[float | None]) -> list[float]:
    return [v for v in row if v is not None]


def _squared_distances(
    categories: list, marginals: np.ndarray, level: str
) -> np.ndarray:
    """Pairwise squared distances between categories for one alpha level.

    Ordinal distances come from the coincidence-matrix marginals: the
    mass between two categories, counting half of each endpoint.
    """
    k = len(categories)
    delta = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(i + 1, k):
            if level == "nominal":
                d2 = 1.0
            elif level == "interval":
                d2 = (float(categories[i]) - float(categories[j])) ** 2
            else:
                between = float(marginals[i : j + 1].sum())
                d2 = (between - (marginals[i] + marginals[j]) / 2.0) ** 2
            delta[i, j] = delta[j, i] = d2
    return delta


def cohen_kappa(ratings_a: Sequence, ratings_b: Sequence) -> float:
    """(p_o - p_e)/(1 - p_e) over two aligned rating vectors."""
    if len(ratings_a) != len(ratings_b):
        raise ValueError("rating vectors differ in length")
    if not ratings_a:
        raise ValueError("need at least one paired rating")
    n = len(ratings_a)
    observed = sum(a == b for a, b in zip(ratings_a, ratings_b)) / n
    counts_a = Counter(ratings_a)
    counts_b = Counter(ratings_b)
    expected = sum(
        (counts_a[c] / n) * (counts_b[c] / n)
        for c in counts_a.keys() | counts_b.keys()
    )
    if expected == 1.0:
        if observed == 1.0:
            return 1.0
        raise UndefinedAgreementError(
            "chance agreement is 1 with observed disagreement"
        )
    return (observed - expected) / (1.0 - expected)


def pairwise_kappa(matrix: Matrix) -> float:
    """Mean Cohen's kappa over rater pairs, weighted by co-rated count."""
    rows = [list(row) for row in matrix]
    if not rows:
        raise UndefinedAgreementError("empty rating matrix")
    n_raters = len(rows[0])
    weighted = 0.0
    weight_total = 0
    for a in range(n_raters):
        for b in range(a + 1, n_raters):
            paired = [
                (row[a], row[b])
                for row in rows
                if row[a] is not None and row[b] is not None
            ]
            if not paired:
                continue
            ratings_a, ratings_b = zip(*paired)
            weighted += cohen_kappa(ratings_a, ratings_b) * len(paired)
            weight_total += len(paired)
    if weight_total == 0:
        raise UndefinedAgreementError("no rater pair shares a rated item")
    return weighted / weight_total


# ---------------------------------------------------------------------------
# treatments


def apply_treatment(
    records: Sequence[AnnotationRecord],
    treatment: str,
    z: float = DEFAULT_Z,
) -> list[AnnotationRecord]:
    """Normal (identity), merging (collapse 2-3 and 4-5), or
    drop_outliers (remove annotators whose mean rating is more than z
    standard deviations from the grand annotator mean)."""
    if treatment not in TREATMENTS:
        raise ValueError(f"unknown treatment {treatment!r}")
    if treatment == "normal":
        return list(records)
    if treatment == "merging":
        return [
            replace(
                record,
                **{
                    m: None if record.rating(m) is None else MERGING_MAP[record.rating(m)]
                    for m in METRICS
                },
            )
            for record in records
        ]
    return _drop_outliers(records, z)


def _drop_outliers(
    records: Sequence[AnnotationRecord], z: float
) -> list[AnnotationRecord]:
    by_annotator: dict[int, list[int]] = {}
    for record in records:
        values = by_annotator.setdefault(record.annotator_id, [])
        for metric in METRICS:
            value = record.rating(metric)
            if value is not None:
                values.append(value)

    means = {
        annotator: sum(values) / len(values)
        for annotator, values in by_annotator.items()
        if values
    }
    if len(means) < 2:
        return list(records)  # nothing to compare against
    grand = sum(means.values()) / len(means)
    spread = math.sqrt(
        sum((m - grand) ** 2 for m in means.values()) / len(means)
    )
    if spread == 0.0:
        return list(records)
    dropped = {
        annotator
        for annotator, mean in means.items()
        if abs(mean - grand) / spread > z
    }
    kept = [r for r in records if r.annotator_id not in dropped]
    if not kept:
        raise TreatmentError("outlier dropping removed every annotator")
    return kept


# ---------------------------------------------------------------------------
# report


@dataclass
class AgreementReport:
    treatment: str
    alpha_level: str
    overall_alpha: float | None
    overall_kappa: float | None
    per_metric: dict[str, dict[str, dict[str, float | None]]]
    annotators_kept: list[int]

    def to_dict(self) -> dict:
        return {
            "treatment": self.treatment,
            "alpha_level": self.alpha_level,
            "overall_alpha": self.overall_alpha,
            "overall_kappa": self.overall_kappa,
            "per_metric": {
                metric: {model: dict(cell) for model, cell in by_model.items()}
                for metric, by_model in self.per_metric.items()
            },
            "annotators_kept": list(self.annotators_kept),
        }


def rating_matrix(
    records: Sequence[AnnotationRecord],
    metrics: Sequence[str],
    model: str | None = None,
) -> list[list[int | None]]:
    """Items x raters matrix over the given metrics.

    One row per (item, model, metric) combination, so passing several
    metrics pools them as separate units. Column order is sorted
    annotator id over the whole record set, keeping matrices comparable
    across model slices.
    """
    annotators = sorted({r.annotator_id for r in records})
    column = {a: i for i, a in enumerate(annotators)}
    rows: dict[tuple, list[int | None]] = {}
    for record in records:
        if model is not None and record.model != model:
            continue
        for metric in metrics:
            value = record.rating(metric)
            if value is None:
                continue
            key = (record.item_id, record.model, metric)
            row = rows.setdefault(key, [None] * len(annotators))
            row[column[record.annotator_id]] = value
    return [rows[key] for key in sorted(rows)]


def agreement_report(
    records: Sequence[AnnotationRecord],
    treatment: str = "normal",
    level: str = "ordinal",
    z: float = DEFAULT_Z,
) -> AgreementReport:
    """Alpha and pairwise kappa per metric, per model, and pooled.

    Slices where a coefficient is undefined (too little overlap) report
    None rather than failing the whole run.
    """
    treated = apply_treatment(records, treatment, z)
    if not treated:
        raise TreatmentError("no records left to evaluate")

    per_metric: dict[str, dict[str, dict[str, float | None]]] = {}
    for metric in METRICS:
        per_metric[metric] = {}
        for model in (*MODELS, "both"):
            matrix = rating_matrix(
                treated, [metric], model=None if model == "both" else model
            )
            per_metric[metric][model] = {
                "alpha": _try_alpha(matrix, level),
                "kappa": _try_kappa(matrix),
            }

    pooled = rating_matrix(treated, METRICS)
    return AgreementReport(
        treatment=treatment,
        alpha_level=level,
        overall_alpha=_try_alpha(pooled, level),
        overall_kappa=_try_kappa(pooled),
        per_metric=per_metric,
        annotators_kept=sorted({r.annotator_id for r in treated}),
    )


def _try_alpha(matrix: list[list[int | None]], level: str) -> float | None:
    try:
        return krippendorff_alpha(matrix, level)
    except UndefinedAgreementError:
        return None


def _try_kappa(matrix: list[list[int | None]]) -> float | None:
    try:
        return pairwise_kappa(matrix)
    except UndefinedAgreementError:
        return None


def format_agreement_table(report: AgreementReport) -> str:
    """Fixed-width text table: one row per metric x model slice."""
    lines = [
        f"treatment: {report.treatment} (alpha level: {report.alpha_level})",
        f"annotators kept: {', '.join(str(a) for a in report.annotators_kept)}",
        "",
        f"{'metric':<12} {'model':<6} {'alpha':>10} {'kappa':>10}",
    ]
    for metric in METRICS:
        for model in (*MODELS, "both"):
            cell = report.per_metric[metric][model]
            lines.append(
                f"{metric:<12} {model:<6} "
                f"{_fmt(cell['alpha']):>10} {_fmt(cell['kappa']):>10}"
            )
    lines.append(
        f"{'overall':<12} {'both':<6} "
        f"{_fmt(report.overall_alpha):>10} {_fmt(report.overall_kappa):>10}"
    )
    return "\n".join(lines)


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def load_published_reference() -> dict:
    """Reference aggregates and agreement values from the original
    large-scale evaluation, for side-by-side report output."""
    data = resources.files("mmqa.data").joinpath("published_agreement.json")
    return json.loads(data.read_text(encoding="utf-8"))
