"""Acceptance criteria, one test per criterion (C1..C7).

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary.

C3 needs the public SMS Spam Collection v.1 (``label<TAB>text``). Point
``SMISHDETECT_SMS_COLLECTION`` at it, or place it at
``data/SMSSpamCollection`` in the repository root.
"""

import math
import os
import random
import string
import time
from fractions import Fraction
from pathlib import Path

import pytest

from smishdetect.bayes import (
    ClassConditionalTable,
    SmoothingConfig,
    SmoothingMode,
    TrainedModel,
    UnknownTokenPolicy,
    classify_message,
    dumps_model,
    fit_tables,
    loads_model,
    train,
)
from smishdetect.cli import run
from smishdetect.corpus import Label, load_corpus, split_corpus
from smishdetect.errors import ModelChecksumError, ModelTruncatedError, ModelVersionError
from smishdetect.evaluation import ConfusionMatrix, evaluate, metrics, run_ablation
from smishdetect.pipeline import (
    NormalizedMessage,
    PipelineConfig,
    lowercase,
    normalize,
    preprocess,
    tokenize,
)
from tests.conftest import GOLDEN

H, S = Label.HAM, Label.SMISH
FP = "acceptance"
REPO = Path(__file__).resolve().parents[1]


# -- C1: metric formulas reproduce the reported rows -----------------------

REPORTED = {
    # (tp, fn, tn, fp): percentages
    (34, 1, 447, 18): {"tpr": 97.14, "tnr": 96.12, "fpr": 3.87, "fnr": 2.85, "accuracy": 96.2},
    (33, 2, 408, 57): {"tpr": 94.28, "tnr": 87.74, "fpr": 12.25, "fnr": 5.71, "accuracy": 88.2},
}


def test_c1_metric_formula_reproduction():
    for (tp, fn, tn, fp), expected in REPORTED.items():
        report = metrics(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
        for key, pct in expected.items():
            got = 100 * getattr(report, key)
            assert abs(got - pct) <= 0.01, f"{key}: {got:.4f}% vs {pct}% for {(tp, fn, tn, fp)}"


# -- C2: term probabilities are count ratios -------------------------------

def test_c2_term_probability_quantization(sample_corpus, config):
    smish = ClassConditionalTable({"call": 145, "prize": 75, "bank": 4}, 327)
    ham = ClassConditionalTable({"call": 271, "bank": 10}, 4342)
    cases = [(smish, "call", 0.443425), (smish, "prize", 0.229358), (smish, "bank", 0.012232),
             (ham, "call", 0.062414), (ham, "bank", 0.002303)]
    for table, term, value in cases:
        assert abs(table.probability(term) - value) <= 5e-7, (term, table.probability(term), value)

    models = [train(sample_corpus, config),
              train(sample_corpus, config.replace(enable_normalization=False))]
    rng = random.Random(2)
    for _ in range(50):
        models.append(_random_model(rng))
    for model in models:
        for table in (model.ham_table, model.smish_table):
            for p in table.probabilities.values():
                scaled = p * table.total_docs
                assert abs(scaled - round(scaled)) <= 1e-9


# -- C3: end-to-end proxy experiment on the public corpus ------------------

def _sms_collection_path():
    env = os.environ.get("SMISHDETECT_SMS_COLLECTION")
    candidates = [Path(env)] if env else []
    candidates += [REPO / "data" / "SMSSpamCollection", REPO / "data" / "SMSSpamCollection.tsv"]
    for path in candidates:
        if path.is_file():
            return path
    return None


def test_c3_end_to_end_proxy_experiment():
    path = _sms_collection_path()
    assert path is not None, (
        "SMS Spam Collection v.1 not found: set SMISHDETECT_SMS_COLLECTION or place the file "
        "at data/SMSSpamCollection"
    )
    start = time.perf_counter()
    corpus = load_corpus(path, "tsv")
    assert len(corpus) == 5574
    config = PipelineConfig()
    split = split_corpus(corpus, 0.9, seed=42, stratified=True)
    model = train(split.train, config, SmoothingConfig(mode=SmoothingMode.FLOOR))
    report = metrics(evaluate(model, split.test, config))
    ablation = run_ablation(corpus, 0.9, 42, smoothing=SmoothingConfig())
    elapsed = time.perf_counter() - start

    assert report.accuracy >= 0.90, report
    assert report.tpr >= 0.80, report
    assert ablation.test_indices == split.test_indices
    for arm in (ablation.with_normalization, ablation.without_normalization):
        assert arm.matrix.total == len(split.test)
    assert ablation.with_normalization.report == report
    assert elapsed < 30, f"took {elapsed:.1f}s"


# -- C4: golden files and pipeline fuzzing ---------------------------------

def _cli(argv):
    import io

    out = io.StringIO()
    code = run(argv, out=out)
    return code, out.getvalue()


def _fuzz_text(rng, keys):
    parts = []
    for _ in range(rng.randint(0, 12)):
        r = rng.random()
        if r < 0.3:
            word = rng.choice(keys)
            parts.append(word.upper() if rng.random() < 0.3 else word)
        elif r < 0.5:
            parts.append(rng.choice(["the", "YOU", "a", "Your", "won", "http://x.co/A", "$5",
                                      "𝐅𝐑𝐄𝐄", "ᏀᎪᏒ", "ǅemal", "İstanbul", "STRAẞE"]))
        elif r < 0.9:
            parts.append("".join(rng.choice(string.ascii_letters + string.digits + "'’-_.,!?")
                                 for _ in range(rng.randint(1, 10))))
        else:
            parts.append("".join(chr(rng.randint(0x80, 0x2FFF)) for _ in range(rng.randint(1, 4))))
    sep = rng.choice([" ", "  ", "\t", ", ", "!"])
    return sep.join(parts)


def test_c4_golden_files_and_fuzz():
    messages = GOLDEN / "messages.txt"
    assert len(messages.read_text(encoding="utf-8").splitlines()) >= 50
    for flags, golden in (([], "normalized.txt"), (["--no-normalize"], "normalized_no_lingo.txt")):
        code, out = _cli(["normalize", *flags, "--file", str(messages)])
        assert code == 0
        assert out.encode("utf-8") == (GOLDEN / golden).read_bytes(), golden

    config = PipelineConfig()
    unstemmed = config.replace(enable_stemming=False)
    stop = config.stopwords.words
    keys = sorted(config.dictionary.entries)
    rng = random.Random(10_000)
    for _ in range(10_000):
        text = _fuzz_text(rng, keys)
        msg = preprocess(text, config)
        assert msg == preprocess(text, config)
        for tok in msg.tokens:
            assert tok and not any(ch.isupper() for ch in tok), (text, tok)
        # stems may coincide with stop words ("wes" -> "we"); stemming runs last by design
        assert not set(preprocess(text, unstemmed).tokens) & stop, text
        lowered = lowercase(tokenize(text))
        expanded = normalize(lowered, config.dictionary)
        extra = sum(len(config.dictionary.lookup(t)) - 1 for t in lowered if t in config.dictionary)
        assert len(expanded) == len(lowered) + extra


# -- C5: log-space decisions equal a brute-force product classifier --------

def _bounded_corpus(rng):
    vocab = [f"t{i}" for i in range(rng.randint(1, 15))]
    n = rng.randint(2, 20)
    # one message per class holds the whole vocabulary, so no probability is 0
    docs, labels = [list(vocab), list(vocab)], [H, S]
    for _ in range(n - 2):
        docs.append(rng.sample(vocab, rng.randint(1, len(vocab))))
        labels.append(rng.choice([H, S]))
    return vocab, docs, labels


def _linear_decision(ham, smish, tokens):
    p_ham = p_smish = Fraction(1)
    for t in set(tokens):
        p_ham *= Fraction(ham.doc_count(t), ham.total_docs)
        p_smish *= Fraction(smish.doc_count(t), smish.total_docs)
    return S if p_smish > p_ham else H


def test_c5_classifier_oracle_equivalence():
    rng = random.Random(5)
    checked = 0
    for _ in range(1000):
        vocab, docs, labels = _bounded_corpus(rng)
        ham, smish = fit_tables(docs, labels)
        model = TrainedModel(ham, smish, SmoothingConfig(mode=SmoothingMode.NONE), FP)
        queries = docs + [rng.choices(vocab, k=rng.randint(1, 8)) for _ in range(5)]
        for q in queries:
            got = classify_message(model, NormalizedMessage(tuple(q), FP)).decision
            assert got is _linear_decision(ham, smish, q), (docs, labels, q)
            checked += 1
    assert checked >= 1000


# -- C6: doc-frequency and decision invariances ----------------------------

def _random_docs(rng):
    vocab = [f"w{i}" for i in range(rng.randint(1, 12))]
    n = rng.randint(2, 20)
    docs = [rng.choices(vocab, k=rng.randint(1, 6)) for _ in range(n)]
    labels = [H, S] + [rng.choice([H, S]) for _ in range(n - 2)]
    rng.shuffle(labels)
    return vocab, docs, labels


def test_c6_invariances():
    rng = random.Random(6)
    none = SmoothingConfig(mode=SmoothingMode.NONE)
    for _ in range(1000):
        _, docs, labels = _random_docs(rng)
        dup = [d + rng.choices(d, k=rng.randint(1, 5)) for d in docs]
        for d in dup:
            rng.shuffle(d)
        assert fit_tables(docs, labels) == fit_tables(dup, labels)

    for _ in range(1000):
        vocab, docs, labels = _random_docs(rng)
        ham, smish = fit_tables(docs, labels)
        base = TrainedModel(ham, smish, none, FP)
        k = rng.randint(2, 7)
        # every probability divided by k: same counts over k-times the totals
        scaled = TrainedModel(ClassConditionalTable(ham.counts, ham.total_docs * k),
                              ClassConditionalTable(smish.counts, smish.total_docs * k), none, FP)
        for q in docs + [rng.choices(vocab, k=rng.randint(1, 6)) for _ in range(3)]:
            m = NormalizedMessage(tuple(q), FP)
            assert classify_message(base, m).decision is classify_message(scaled, m).decision

    for _ in range(1000):
        _, docs, labels = _random_docs(rng)
        swapped = [S if lab is H else H for lab in labels]
        ham, smish = fit_tables(docs, labels)
        ham2, smish2 = fit_tables(docs, swapped)
        assert ham == smish2 and smish == ham2


# -- C7: persistence round-trip and corruption -----------------------------

def _random_model(rng):
    vocab = ["".join(rng.choice(string.ascii_lowercase + "é'") for _ in range(rng.randint(1, 8)))
             for _ in range(rng.randint(1, 30))]
    n = rng.randint(2, 40)
    docs = [rng.choices(vocab, k=rng.randint(1, 8)) for _ in range(n)]
    labels = [H, S] + [rng.choice([H, S]) for _ in range(n - 2)]
    ham, smish = fit_tables(docs, labels)
    smoothing = SmoothingConfig(
        mode=rng.choice(list(SmoothingMode)),
        epsilon=rng.choice([1e-6, 1e-9, rng.random() or 0.5]),
        alpha=rng.choice([1.0, 0.5, rng.uniform(0.01, 3)]),
        use_priors=rng.random() < 0.5,
        unknown=rng.choice(list(UnknownTokenPolicy)),
    )
    fingerprint = "%064x" % rng.getrandbits(256)
    pipeline = {"normalize": rng.choice("01"), "stopwords": "1", "stem": "1",
                "dictionary_version": "v%d" % rng.randint(0, 9), "stoplist_version": "en-1"}
    return TrainedModel(ham, smish, smoothing, fingerprint, pipeline)


def test_c7_persistence_round_trip():
    rng = random.Random(7)
    for _ in range(100):
        model = _random_model(rng)
        data = dumps_model(model)
        again = loads_model(data)
        assert again == model
        assert again.smoothing == model.smoothing
        assert again.pipeline_fingerprint == model.pipeline_fingerprint
        assert dumps_model(again) == data

        with pytest.raises(ModelVersionError):
            loads_model(data.replace(b" v1\n", b" v9\n", 1))
        corrupted = bytearray(data)
        header_end = data.index(b"\n", data.index(b"\n") + 1) + 1
        pos = rng.randrange(header_end, len(data))
        corrupted[pos] ^= 1 << rng.randrange(8)
        with pytest.raises(ModelChecksumError):
            loads_model(bytes(corrupted))
        with pytest.raises(ModelTruncatedError):
            loads_model(data[: rng.randrange(header_end, len(data))])


def test_no_float_drift_in_reloaded_scores(sample_corpus, config):
    model = train(sample_corpus, config)
    again = loads_model(dumps_model(model))
    for text in sample_corpus.texts:
        m = preprocess(text, config)
        a, b = classify_message(model, m), classify_message(again, m)
        assert a == b
        assert not math.isnan(a.log_score_ham)
