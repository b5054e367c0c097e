# Reward components for one generated sequence against the gold labels of its sample:
#
#   R_total = lambda_format * R_format + lambda_polarity * R_polarity + lambda_score * R_score
#
# R_format is 1 iff the text parses.  R_polarity is 1 iff the predicted polarity
# matches the gold polarity.  R_score is 1 - tanh(|s_pred - s_true| / (r_max - r_min))
# when the polarities match and 0 otherwise, so a score is only rewarded on top of a
# correct coarse judgment.  Unparseable text earns nothing at all: polarity and score
# only exist after a successful parse.

import math

from grammar.codec import parse
from util.errors import ConfigError, FormatError


class RewardWeights:

  def __init__(self, lambda_format = 1.0, lambda_polarity = 1.0, lambda_score = 1.0):
    self.lambda_format = float(lambda_format)
    self.lambda_polarity = float(lambda_polarity)
    self.lambda_score = float(lambda_score)

    for name, value in self.toDict().items():
      if not value >= 0:
        raise ConfigError("Reward weights must be non-negative.", "{}:".format(name), value)


  @property
  def maximum(self):
    return self.lambda_format + self.lambda_polarity + self.lambda_score


  def toDict(self):
    return { 'lambda_format' : self.lambda_format, 'lambda_polarity' : self.lambda_polarity,
             'lambda_score' : self.lambda_score }


class RewardBreakdown:

  __slots__ = ('format', 'polarity', 'score', 'total')

  def __init__(self, format, polarity, score, total):
    self.format = format
    self.polarity = polarity
    self.score = score
    self.total = total

  # Flat record, one column per reward component.
  def toRecord(self):
    return { 'format' : self.format, 'polarity' : self.polarity, 'score' : self.score,
             'total' : self.total }

  def __repr__(self):
    return "RewardBreakdown(format={}, polarity={}, score={:.6f}, total={:.6f})".format(
           self.format, self.polarity, self.score, self.total)


ZERO = RewardBreakdown(0, 0, 0.0, 0.0)


def format_reward (text, profile):
  try:
    parse(text, profile)
  except FormatError:
    return 0
  return 1


def polarity_reward (p_pred, p_true):
  return 1 if p_pred == p_true else 0


def score_reward (s_pred, s_true, p_pred, p_true, profile):
  if p_pred != p_true: return 0.0
  return 1.0 - math.tanh(abs(s_pred - s_true) / profile.span)


def total_reward (text, gold, weights, profile):
  try:
    out = parse(text, profile)
  except FormatError:
    return ZERO

  r_pol = polarity_reward(out.polarity, gold.gold_polarity)
  r_score = score_reward(out.score, gold.gold_score, out.polarity, gold.gold_polarity, profile)

  total = (weights.lambda_format * 1 + weights.lambda_polarity * r_pol
           + weights.lambda_score * r_score)

  return RewardBreakdown(1, r_pol, r_score, total)
