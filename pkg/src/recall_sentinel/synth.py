"""Seeded synthetic query/recall generator for desk-scale validation.

Baseline cell counts are Poisson with a per-drug popularity drawn from a
log-normal and per-state weights; the symptom channel is binomial. In
the days before each scheduled recall the affected (drug, state) rates
are multiplied toward gamma (flat or linear ramp) and the symptom
fraction is boosted, giving the features a planted signal to find.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, asdict

import numpy as np

from .features import WARMUP_DAYS
from .ingest import CountCube, QueryRecord, RecallRecord, StudyWindow, US_STATES
from .lexicon import DrugEntry, SymptomLexicon

DEFAULT_SYMPTOM_PHRASES = (
    "rash", "muscle pain", "nausea", "severe headache", "stomach ache",
    "dizziness", "chest pain",
)


class SynthError(ValueError):
    pass


@dataclass
class SynthConfig:
    n_drugs: int = 20
    n_states: int = 10
    n_days: int = 365
    popularity_median: float = 8.0     # median daily queries per drug across states
    popularity_sigma: float = 0.6      # log-normal dispersion
    state_weights: tuple | None = None  # defaults to a mildly skewed profile
    symptom_fraction: float = 0.1
    n_recalls: int = 40
    nationwide_prob: float = 0.7
    class_mix: tuple = (0.1, 0.7, 0.2)          # classes I, II, III
    rx_mix: tuple = (0.6, 0.3, 0.1)             # RX, OTC, UNCLASSIFIED
    injection_days: int = 7
    injection_gamma: float = 5.0
    ramp: str = "linear"               # "flat" | "linear"
    symptom_boost: float = 0.2
    seed: int = 0

    def validate(self) -> None:
        if min(self.n_drugs, self.n_states, self.n_days, self.n_recalls) < 1:
            raise SynthError("dimensions and recall count must be positive")
        if self.n_states > len(US_STATES):
            raise SynthError(f"at most {len(US_STATES)} states supported")
        if not 0 <= self.symptom_fraction <= 1:
            raise SynthError("symptom_fraction must be in [0, 1]")
        if self.injection_gamma < 1:
            raise SynthError("injection_gamma must be >= 1")
        if self.injection_days >= self.n_days:
            raise SynthError("injection window must be shorter than the study")
        if self.ramp not in ("flat", "linear"):
            raise SynthError(f"unknown ramp {self.ramp!r}")
        if self.popularity_median <= 0 or self.popularity_sigma < 0:
            raise SynthError("popularity parameters must be positive")
        if not 0 <= self.nationwide_prob <= 1:
            raise SynthError("nationwide_prob must be in [0, 1]")
        first_recall_day = WARMUP_DAYS + self.injection_days + 1
        if first_recall_day >= self.n_days:
            raise SynthError("study too short for warm-up plus injection window")


@dataclass
class InjectionTruth:
    drug: str
    states: list[str]
    recall_day: int
    window_start: int  # inclusive
    window_end: int    # inclusive, strictly before recall_day
    gamma: float


@dataclass
class SynthResult:
    cube: CountCube
    recalls: list[RecallRecord]
    truth: list[InjectionTruth]
    drug_entries: list[DrugEntry]
    symptom_lexicon: SymptomLexicon
    config: SynthConfig
    window: StudyWindow


def _drug_name(i: int) -> str:
    return f"synthdrug{i:02d}"


def _brand_name(i: int) -> str:
    return f"synthbrand{i:02d}"


def _pick(rng: np.random.Generator, values, mix) -> str:
    return values[rng.choice(len(values), p=np.asarray(mix) / np.sum(mix))]


def generate(config: SynthConfig) -> SynthResult:
    """Deterministic synthetic cube + recall schedule + injection ground truth."""
    config.validate()
    window = StudyWindow(n_days=config.n_days)
    states = list(US_STATES[:config.n_states])
    drugs = [_drug_name(i) for i in range(config.n_drugs)]
    master = np.random.default_rng([config.seed, 0x5e9])

    popularity = config.popularity_median * np.exp(
        master.normal(0.0, config.popularity_sigma, size=config.n_drugs))
    if config.state_weights is not None:
        weights = np.asarray(config.state_weights, dtype=float)
        if weights.shape != (config.n_states,) or np.any(weights < 0):
            raise SynthError("state_weights must be n_states non-negative values")
    else:
        weights = np.linspace(1.6, 0.4, config.n_states)
    weights = weights / weights.mean()

    # recall schedule
    first_day = WARMUP_DAYS + config.injection_days + 1
    recalls: list[RecallRecord] = []
    truth: list[InjectionTruth] = []
    rx_by_drug = {
        d: _pick(master, ("RX", "OTC", "UNCLASSIFIED"), config.rx_mix) for d in drugs
    }
    for _ in range(config.n_recalls):
        drug = drugs[master.integers(config.n_drugs)]
        day = int(master.integers(first_day, config.n_days))
        if master.random() < config.nationwide_prob:
            affected = list(states)
        else:
            n_aff = int(master.integers(1, min(3, config.n_states) + 1))
            affected = sorted(master.choice(states, size=n_aff, replace=False).tolist())
        classification = _pick(master, ("I", "II", "III"), config.class_mix)
        recalls.append(RecallRecord(
            drug, window.start + dt.timedelta(days=day), frozenset(affected),
            classification, rx_by_drug[drug],
        ))
        truth.append(InjectionTruth(
            drug, affected, day, day - config.injection_days, day - 1,
            config.injection_gamma,
        ))

    # per-(drug, state) injection multiplier profiles
    multiplier = {}
    boost = {}
    for t in truth:
        for state in t.states:
            key = (t.drug, state)
            if key not in multiplier:
                multiplier[key] = np.ones(config.n_days)
                boost[key] = np.zeros(config.n_days)
            win = np.arange(t.window_start, t.window_end + 1)
            if config.ramp == "flat":
                prof = np.full(win.size, t.gamma)
            else:
                prof = np.linspace(1.0, t.gamma, win.size + 1)[1:]
            multiplier[key][win] = np.maximum(multiplier[key][win], prof)
            boost[key][win] = np.maximum(boost[key][win], config.symptom_boost)

    cube = CountCube(n_days=config.n_days, rx_otc=dict(rx_by_drug))
    for di, drug in enumerate(drugs):
        for si, state in enumerate(states):
            rng = np.random.default_rng([config.seed, di, si])
            rate = popularity[di] * weights[si] * multiplier.get(
                (drug, state), np.ones(config.n_days))
            total = rng.poisson(rate)
            frac = np.minimum(
                config.symptom_fraction + boost.get((drug, state), 0.0), 1.0)
            symptom = rng.binomial(total, frac)
            arr = np.stack([total, symptom], axis=1).astype(np.int64)
            cube.counts[(drug, state)] = arr

    entries = [
        DrugEntry(_drug_name(i), (_brand_name(i),), rx_by_drug[_drug_name(i)])
        for i in range(config.n_drugs)
    ]
    symptoms = SymptomLexicon(frozenset(DEFAULT_SYMPTOM_PHRASES))
    return SynthResult(cube, recalls, truth, entries, symptoms, config, window)


def expand_query_log(result: SynthResult) -> list[QueryRecord]:
    """Templated query records that round-trip through ingest to the same cube.

    Symptom queries read "<brand> <phrase>", the rest just "<brand>".
    Phrase choice cycles deterministically; user ids are synthetic.
    """
    phrases = sorted(result.symptom_lexicon.phrases)
    brand = {e.canonical_name: e.brand_names[0] for e in result.drug_entries}
    records: list[QueryRecord] = []
    counter = 0
    for (drug, state) in sorted(result.cube.counts):
        arr = result.cube.counts[(drug, state)]
        for day in np.nonzero(arr[:, 0])[0]:
            date = result.window.start + dt.timedelta(days=int(day))
            total, symptom = int(arr[day, 0]), int(arr[day, 1])
            for i in range(total):
                if i < symptom:
                    text = f"{brand[drug]} {phrases[counter % len(phrases)]}"
                else:
                    text = brand[drug]
                records.append(QueryRecord(f"u{counter}", date, state, text))
                counter += 1
    return records


def write_truth_json(truth: list[InjectionTruth], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump([asdict(t) for t in truth], f, indent=1, sort_keys=True)
        f.write("\n")


def write_drug_lexicon_csv(entries: list[DrugEntry], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("canonical,brands,rx_otc\n")
        for e in entries:
            f.write(f"{e.canonical_name},{'|'.join(e.brand_names)},{e.rx_otc}\n")


def write_symptom_lexicon(symptoms: SymptomLexicon, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for phrase in sorted(symptoms.phrases):
            f.write(phrase + "\n")


def write_query_log_jsonl(records: list[QueryRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps({
                "user_id": r.user_id, "date": r.date.isoformat(),
                "state": r.state, "text": r.text,
            }) + "\n")
