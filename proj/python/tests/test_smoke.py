import itertools
import math

import pytest

import cuediary


def brute_force_p(a, b):
    pooled = a + b
    ranks = {}
    ordered = sorted(pooled)
    for v in set(pooled):
        first = ordered.index(v) + 1
        ranks[v] = first + (ordered.count(v) - 1) / 2
    observed = sum(ranks[v] for v in a)
    expected = len(a) * (len(pooled) + 1) / 2
    extreme = total = 0
    for combo in itertools.combinations(range(len(pooled)), len(a)):
        w = sum(ranks[pooled[i]] for i in combo)
        total += 1
        extreme += abs(w - expected) >= abs(observed - expected) - 1e-9
    return extreme / total


def test_rank_sum_small_samples_match_enumeration():
    cases = [([1, 2, 3], [4, 5, 6]), ([1, 1, 2, 3], [2, 2, 3]), ([0, 1, 2, 2, 1], [2, 2, 1, 2])]
    for a, b in cases:
        r = cuediary.rank_sum_test(a, b)
        assert r["exact"]
        assert r["p_value"] == pytest.approx(brute_force_p(a, b), abs=1e-12)


def test_rank_sum_large_sample_uses_normal_approximation():
    a = list(range(10))
    b = list(range(5, 15))
    r = cuediary.rank_sum_test(a, b)
    assert not r["exact"]
    assert 0 < r["p_value"] < 1
    assert r["effect_size"] == pytest.approx(r["statistic"] / math.sqrt(20))


def test_bands_and_magnitudes():
    assert cuediary.classify_band(0.001) == "***"
    assert cuediary.classify_band(0.05) == "*"
    assert cuediary.classify_band(0.1001) == "-"
    assert cuediary.classify_magnitude(0.30) == "moderate"


def test_f1_and_emotions():
    assert cuediary.f1_score(0.76, 0.81) == pytest.approx(2 * 0.76 * 0.81 / 1.57)
    m = cuediary.emotion_metrics([("Positive", "Positive"), ("Negative", "Neutral"), ("Neutral", "Neutral")])
    assert m["accuracy"] == pytest.approx(2 / 3)


def test_parse_repairs_bare_tokens():
    raw = '{"Location": ["desk", "cafe", "park"], "Emotion": Neutral, "People": Alone, ' \
          '"Activity": ["a", "b", "c", "d", "e", "f"]}'
    out = cuediary.parse_and_validate(raw)
    assert out["ok"]
    assert out["prediction"]["Emotion"] == "Neutral"
    bad = cuediary.parse_and_validate('{"Location": []}')
    assert not bad["ok"]
    assert bad["violation"]["code"] == "VocabularyViolation"


def test_errors_are_translated():
    with pytest.raises(cuediary.CuediaryError):
        cuediary.rank_sum_test([], [1.0])
    with pytest.raises(cuediary.CuediaryError):
        cuediary.rank_sum_test([1.0], [2.0], alternative="sideways")
