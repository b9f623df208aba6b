"""Query-log and recall parsing plus per-(drug, state, day) count aggregation."""
from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field

import numpy as np

from .lexicon import DrugEntry, DrugMatcher, SymptomLexicon, contains_symptom, normalize_text

US_STATES = (
    "AL AK AZ AR CA CO CT DE FL GA HI ID IL IN IA KS KY LA ME MD "
    "MA MI MN MS MO MT NE NV NH NJ NM NY NC ND OH OK OR PA RI SC "
    "SD TN TX UT VT VA WA WV WI WY"
).split()

RECALL_CLASSES = ("I", "II", "III")

DEFAULT_STUDY_START = dt.date(2015, 1, 1)
DEFAULT_STUDY_DAYS = 365


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class StudyWindow:
    """Calendar window mapped onto day indices 0..n_days-1."""
    start: dt.date = DEFAULT_STUDY_START
    n_days: int = DEFAULT_STUDY_DAYS

    def day_index(self, date: dt.date) -> int:
        return (date - self.start).days

    def contains(self, date: dt.date) -> bool:
        return 0 <= self.day_index(date) < self.n_days


@dataclass(frozen=True)
class QueryRecord:
    user_id: str
    date: dt.date
    state: str
    text: str


@dataclass(frozen=True)
class RecallRecord:
    drug: str
    initiation_date: dt.date
    states: frozenset[str]
    classification: str
    rx_otc: str = "UNCLASSIFIED"


@dataclass
class CountCube:
    """Sparse per-(drug, state) daily count series, two channels.

    counts maps (drug, state) to an int array of shape (n_days, 2) holding
    [total_count, symptom_count] per day. Missing keys mean all-zero.
    """
    n_days: int
    counts: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    rx_otc: dict[str, str] = field(default_factory=dict)

    def drugs(self) -> list[str]:
        return sorted({d for d, _ in self.counts})

    def states(self) -> list[str]:
        return sorted({s for _, s in self.counts})

    def series(self, drug: str, state: str) -> np.ndarray:
        """The (n_days, 2) series for a key, zeros when absent."""
        arr = self.counts.get((drug, state))
        if arr is None:
            arr = np.zeros((self.n_days, 2), dtype=np.int64)
        return arr

    def cell(self, drug: str, state: str, day: int) -> tuple[int, int]:
        arr = self.counts.get((drug, state))
        if arr is None:
            return (0, 0)
        return (int(arr[day, 0]), int(arr[day, 1]))

    def drug_total(self, drug: str) -> int:
        return int(sum(int(a[:, 0].sum()) for (d, _), a in self.counts.items() if d == drug))


def _parse_date(value) -> dt.date:
    if not isinstance(value, str):
        raise ValueError("date must be an ISO-8601 string")
    return dt.date.fromisoformat(value)


def parse_query_log(stream, window: StudyWindow | None = None,
                    state_universe=US_STATES):
    """Parse a JSONL query log into records plus row-level errors.

    Returns (records, errors); errors are (line_number, message) pairs.
    Bad rows are reported, never silently dropped.
    """
    window = window or StudyWindow()
    states = set(state_universe)
    records: list[QueryRecord] = []
    errors: list[tuple[int, str]] = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            date = _parse_date(obj["date"])
            state = str(obj["state"]).upper()
            if state not in states:
                raise ValueError(f"unknown state {state!r}")
            if not window.contains(date):
                raise ValueError(f"date {date.isoformat()} outside study window")
            records.append(QueryRecord(str(obj["user_id"]), date, state, str(obj["text"])))
        except (ValueError, KeyError, TypeError) as exc:
            errors.append((lineno, str(exc) or exc.__class__.__name__))
    return records, errors


def parse_recall_file(stream, state_universe=US_STATES,
                      window: StudyWindow | None = None):
    """Parse the recall JSONL; expand "nationwide" and collapse duplicates.

    Duplicate (drug, date, state) triples are collapsed (first row wins).
    Returns (records, errors).
    """
    window = window or StudyWindow()
    universe = list(state_universe)
    universe_set = set(universe)
    records: list[RecallRecord] = []
    errors: list[tuple[int, str]] = []
    seen: set[tuple[str, dt.date, str]] = set()
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            drug = normalize_text(str(obj["drug"]))
            if not drug:
                raise ValueError("empty drug name")
            date = _parse_date(obj["initiation_date"])
            if window.day_index(date) < 0:
                raise ValueError("initiation_date before study window start")
            dist = obj["distribution"]
            if dist == "nationwide":
                states = set(universe)
            else:
                states = {str(s).upper() for s in dist}
                unknown = states - universe_set
                if unknown:
                    raise ValueError(f"unknown state codes {sorted(unknown)}")
            if not states:
                raise ValueError("empty distribution")
            classification = str(obj["classification"]).strip().upper()
            if classification not in RECALL_CLASSES:
                raise ValueError(f"bad classification {classification!r}")
            rx_otc = str(obj.get("rx_otc", "UNCLASSIFIED")).strip().upper()
            if rx_otc not in ("RX", "OTC", "UNCLASSIFIED"):
                raise ValueError(f"bad rx_otc {rx_otc!r}")
            fresh = {s for s in states if (drug, date, s) not in seen}
            seen.update((drug, date, s) for s in fresh)
            if fresh:
                records.append(RecallRecord(drug, date, frozenset(fresh), classification, rx_otc))
        except (ValueError, KeyError, TypeError) as exc:
            errors.append((lineno, str(exc) or exc.__class__.__name__))
    return records, errors


def build_count_cube(records: list[QueryRecord], drugs: list[DrugEntry],
                     symptoms: SymptomLexicon,
                     window: StudyWindow | None = None) -> CountCube:
    """Aggregate query records into the sparse count cube.

    Cell increments are associative and commutative, so any sharded
    construction must match sequential processing exactly.
    """
    window = window or StudyWindow()
    matcher = DrugMatcher(drugs)
    cube = CountCube(n_days=window.n_days,
                     rx_otc={e.canonical_name: e.rx_otc for e in drugs})
    for rec in records:
        text = normalize_text(rec.text)
        matched = matcher.match(text)
        if not matched:
            continue
        day = window.day_index(rec.date)
        has_symptom = contains_symptom(text, symptoms)
        for drug in matched:
            arr = cube.counts.get((drug, rec.state))
            if arr is None:
                arr = np.zeros((window.n_days, 2), dtype=np.int64)
                cube.counts[(drug, rec.state)] = arr
            arr[day, 0] += 1
            if has_symptom:
                arr[day, 1] += 1
    return cube


def filter_drugs(cube: CountCube, min_queries: int = 1000) -> CountCube:
    """Drop drugs whose total query count over all states and days is below threshold."""
    if min_queries < 0:
        raise IngestError("min_queries must be >= 0")
    totals: dict[str, int] = {}
    for (drug, _), arr in cube.counts.items():
        totals[drug] = totals.get(drug, 0) + int(arr[:, 0].sum())
    keep = {d for d, t in totals.items() if t >= min_queries}
    return CountCube(
        n_days=cube.n_days,
        counts={k: v for k, v in cube.counts.items() if k[0] in keep},
        rx_otc={d: r for d, r in cube.rx_otc.items() if d in keep or d not in totals},
    )


def write_cube_csv(cube: CountCube, path) -> None:
    """Write the sparse cube CSV (zero cells omitted), canonical key order."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["drug", "state", "day", "total_count", "symptom_count"])
        for (drug, state) in sorted(cube.counts):
            arr = cube.counts[(drug, state)]
            for day in np.nonzero(arr[:, 0] | arr[:, 1])[0]:
                w.writerow([drug, state, int(day), int(arr[day, 0]), int(arr[day, 1])])


def read_cube_csv(path, n_days: int = DEFAULT_STUDY_DAYS,
                  rx_otc: dict[str, str] | None = None) -> CountCube:
    cube = CountCube(n_days=n_days, rx_otc=dict(rx_otc or {}))
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        for lineno, row in enumerate(reader, start=2):
            try:
                day = int(row["day"])
                total = int(row["total_count"])
                symptom = int(row["symptom_count"])
                if not 0 <= day < n_days:
                    raise ValueError(f"day {day} out of range")
                if symptom > total or total < 0 or symptom < 0:
                    raise ValueError("symptom_count must be in [0, total_count]")
            except (TypeError, ValueError, KeyError) as exc:
                raise IngestError(f"{path} row {lineno}: {exc}") from exc
            key = (row["drug"], row["state"])
            arr = cube.counts.get(key)
            if arr is None:
                arr = np.zeros((n_days, 2), dtype=np.int64)
                cube.counts[key] = arr
            arr[day, 0] += total
            arr[day, 1] += symptom
    return cube


def write_recalls_jsonl(records: list[RecallRecord], path,
                        state_universe=US_STATES) -> None:
    universe = set(state_universe)
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            dist = "nationwide" if rec.states == universe else sorted(rec.states)
            f.write(json.dumps({
                "drug": rec.drug,
                "initiation_date": rec.initiation_date.isoformat(),
                "distribution": dist,
                "classification": rec.classification,
                "rx_otc": rec.rx_otc,
            }) + "\n")


_OPENFDA_STATE_TOKENS = {s for s in US_STATES}


def convert_openfda(reports: list[dict], state_universe=US_STATES):
    """Best-effort mapping of openFDA enforcement reports to native recall rows.

    Returns (rows, skipped) where rows are JSON-serializable dicts in the
    native recall schema and skipped are (index, reason) pairs.
    """
    rows = []
    skipped = []
    for i, rep in enumerate(reports):
        try:
            generic = (rep.get("openfda") or {}).get("generic_name") or []
            if generic:
                drug = normalize_text(str(generic[0]))
            else:
                desc = normalize_text(str(rep.get("product_description", "")))
                drug = desc.split()[0] if desc else ""
            if not drug:
                raise ValueError("no drug name derivable")
            raw_date = str(rep["recall_initiation_date"]).strip()
            if "-" in raw_date:
                date = dt.date.fromisoformat(raw_date)
            else:
                date = dt.datetime.strptime(raw_date, "%Y%m%d").date()
            pattern = str(rep.get("distribution_pattern", "")).upper()
            if "NATIONWIDE" in pattern:
                dist = "nationwide"
            else:
                found = sorted({t for t in pattern.replace(",", " ").replace(".", " ").split()
                                if t in _OPENFDA_STATE_TOKENS})
                if not found:
                    raise ValueError("no states derivable from distribution_pattern")
                dist = found
            cls = str(rep["classification"]).upper().replace("CLASS", "").strip()
            if cls not in RECALL_CLASSES:
                raise ValueError(f"bad classification {rep['classification']!r}")
            rows.append({
                "drug": drug,
                "initiation_date": date.isoformat(),
                "distribution": dist,
                "classification": cls,
            })
        except (KeyError, ValueError, TypeError) as exc:
            skipped.append((i, str(exc)))
    return rows, skipped
