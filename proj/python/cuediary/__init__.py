import json

from . import _core
from ._core import CuediaryError, classify_band, classify_magnitude, f1_score, round_half_up

__all__ = [
    "CuediaryError",
    "classify_band",
    "classify_magnitude",
    "emotion_metrics",
    "f1_score",
    "hit_report",
    "parse_and_validate",
    "rank_sum_test",
    "round_half_up",
]


def rank_sum_test(a, b, alternative="two-sided"):
    return json.loads(_core.rank_sum_test(list(map(float, a)), list(map(float, b)), alternative))


def emotion_metrics(pairs):
    return json.loads(_core.emotion_metrics([(p, t) for p, t in pairs]))


def parse_and_validate(raw):
    return json.loads(_core.parse_and_validate(raw))


def hit_report(memos, dimension):
    return json.loads(_core.hit_report(json.dumps(list(memos)), dimension))
