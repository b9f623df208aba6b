import pytest
from hypothesis import given, strategies as st

from recall_sentinel.lexicon import (
    DrugEntry,
    LexiconError,
    SymptomLexicon,
    contains_symptom,
    load_drug_lexicon,
    load_symptom_lexicon,
    match_drugs,
    normalize_text,
)

STATINS = [
    DrugEntry("atorvastatin", ("lipitor",), "RX"),
    DrugEntry("rosuvastatin", ("crestor",), "RX"),
    DrugEntry("aspirin", (), "OTC"),
]

SYMPTOMS = SymptomLexicon(frozenset({"muscle pain", "rash"}))


class TestNormalizeText:
    @pytest.mark.parametrize("raw,expected", [
        ("Lipitor 20mg!!", "lipitor 20mg"),
        ("", ""),
        ("  ASPIRIN   Recall ", "aspirin recall"),
        ("a-b_c", "a b c"),
    ])
    def test_examples(self, raw, expected):
        assert normalize_text(raw) == expected

    @given(st.text(max_size=80))
    def test_idempotent(self, s):
        once = normalize_text(s)
        assert normalize_text(once) == once


class TestMatchDrugs:
    def test_brand_hit(self):
        assert match_drugs("lipitor side effects", STATINS) == {"atorvastatin"}

    def test_no_hit(self):
        assert match_drugs("weather in boston", STATINS) == set()

    def test_two_hits(self):
        got = match_drugs("switch from lipitor to crestor", STATINS)
        assert got == {"atorvastatin", "rosuvastatin"}

    def test_canonical_hit(self):
        assert match_drugs("atorvastatin dose", STATINS) == {"atorvastatin"}

    def test_token_boundary(self):
        # substring-within-token must not match
        assert match_drugs("aspiring jobs", STATINS) == set()

    def test_output_subset_of_canonicals(self):
        canonicals = {e.canonical_name for e in STATINS}
        got = match_drugs("aspirin lipitor crestor atorvastatin", STATINS)
        assert got <= canonicals

    def test_whitespace_invariance(self):
        a = match_drugs(normalize_text("lipitor   rash"), STATINS)
        b = match_drugs(normalize_text("lipitor rash"), STATINS)
        assert a == b

    def test_duplicate_canonical_rejected(self):
        dupes = [DrugEntry("aspirin"), DrugEntry("aspirin")]
        with pytest.raises(LexiconError):
            match_drugs("aspirin", dupes)


class TestContainsSymptom:
    def test_multiword_phrase(self):
        assert contains_symptom("lipitor muscle pain", SYMPTOMS)

    def test_miss(self):
        assert not contains_symptom("lipitor dosage", SYMPTOMS)

    def test_single_token_phrase(self):
        assert contains_symptom("painful rash from amoxicillin", SYMPTOMS)

    def test_partial_phrase_does_not_match(self):
        assert not contains_symptom("lipitor muscle cramp", SYMPTOMS)


class TestLoaders:
    def test_drug_csv_roundtrip(self, tmp_path):
        p = tmp_path / "drugs.csv"
        p.write_text(
            "canonical,brands,rx_otc\n"
            "atorvastatin,Lipitor|Torvast,RX\n"
            "aspirin,,OTC\n"
        )
        entries = load_drug_lexicon(p)
        assert entries[0].brand_names == ("lipitor", "torvast")
        assert entries[1] == DrugEntry("aspirin", (), "OTC")

    def test_bad_rx_otc_reports_row(self, tmp_path):
        p = tmp_path / "drugs.csv"
        p.write_text("canonical,brands,rx_otc\naspirin,,SOMETIMES\n")
        with pytest.raises(LexiconError, match="row 2"):
            load_drug_lexicon(p)

    def test_duplicate_canonical_rejected(self, tmp_path):
        p = tmp_path / "drugs.csv"
        p.write_text("canonical,brands,rx_otc\na,,RX\na,,RX\n")
        with pytest.raises(LexiconError, match="duplicate"):
            load_drug_lexicon(p)

    def test_missing_header(self, tmp_path):
        p = tmp_path / "drugs.csv"
        p.write_text("name\naspirin\n")
        with pytest.raises(LexiconError, match="header"):
            load_drug_lexicon(p)

    def test_symptom_file_with_comments(self, tmp_path):
        p = tmp_path / "symptoms.txt"
        p.write_text("# header comment\nmuscle pain\nRash  # trailing\n\n")
        lex = load_symptom_lexicon(p)
        assert lex.phrases == frozenset({"muscle pain", "rash"})
