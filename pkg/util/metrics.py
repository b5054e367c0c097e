# Evaluation metrics for sentiment scores and the greedy-decoding evaluation harness.
#
# Classification metrics read scores at K classes.  K=7 and K=5 bin the score by the
# profile's class edges, with a score sitting exactly on an edge going to the class
# nearer zero (so K=7 is rounding to the nearest integer, halves toward zero).  K=3
# is the polarity.  K=2 is the sign of the prediction against non-neutral golds.
#
# Outputs that fail to parse have no score.  They are wrong for every classification
# metric and left out of MAE and correlation.

import numpy as np
from joblib import Parallel, delayed
from scipy import stats
from sklearn.metrics import f1_score

from grammar.codec import parse, score_to_polarity
from grammar.Polarity import Polarity
from util.MetricsReport import MetricsReport
from util.errors import DegenerateError, DimensionError, EmptyError, FormatError, ProfileError
from util.util import print

# Class of an output that failed to parse; never equal to a real class.
FAILED = -99


def _bin (s, edges):
  e = np.asarray(edges)
  return int(np.sum(s > e)) if s >= 0 else int(np.sum(s >= e))


def score_to_class (s, K, profile):
  if K not in profile.supportedClasses():
    raise ProfileError("Class count not supported by profile.", "K:", K,
                       "profile:", profile.name, "supported:", profile.supportedClasses())

  if K == 7: return _bin(s, profile.class_edges_acc7) - 3
  if K == 5: return _bin(s, profile.class_edges_acc5)
  if K == 3: return score_to_polarity(s, profile).value
  return int(s > 0)


def _checkLengths (a, b):
  if len(a) != len(b):
    raise DimensionError("Predictions and golds differ in length.", "preds:", len(a), "golds:", len(b))


def acc_k (preds, golds, K, profile):
  # preds may hold None for failed outputs.
  _checkLengths(preds, golds)
  if len(golds) == 0:
    raise EmptyError("Accuracy of an empty set.")

  hits = [p is not None and score_to_class(p, K, profile) == score_to_class(g, K, profile)
          for p, g in zip(preds, golds)]
  return float(np.mean(hits))


def acc2 (preds, golds, profile):
  _checkLengths(preds, golds)
  keep = [i for i, g in enumerate(golds) if score_to_polarity(g, profile) != Polarity.NEUTRAL]
  if not keep:
    raise EmptyError("Binary accuracy needs at least one non-neutral gold.", "n:", len(golds))

  hits = [preds[i] is not None and (preds[i] > 0) == (golds[i] > 0) for i in keep]
  return float(np.mean(hits))


def f1_macro (pred_classes, gold_classes, labels = None):
  # Unweighted mean of per-class F1.  By default the classes are those seen in
  # either predictions or golds.
  _checkLengths(pred_classes, gold_classes)
  if labels is None:
    labels = sorted(set(pred_classes) | set(gold_classes))
  if len(labels) == 0:
    raise EmptyError("F1 of an empty set.")

  return float(f1_score(gold_classes, pred_classes, labels=labels, average='macro', zero_division=0))


def mae (pred_scores, gold_scores):
  _checkLengths(pred_scores, gold_scores)
  if len(gold_scores) == 0:
    raise EmptyError("MAE of an empty set.")
  return float(np.mean(np.abs(np.asarray(pred_scores, dtype=np.float64)
                              - np.asarray(gold_scores, dtype=np.float64))))


def pearson_corr (pred_scores, gold_scores):
  _checkLengths(pred_scores, gold_scores)
  if len(gold_scores) < 2:
    raise EmptyError("Correlation needs at least two pairs.", "n:", len(gold_scores))

  x = np.asarray(pred_scores, dtype=np.float64)
  y = np.asarray(gold_scores, dtype=np.float64)
  if np.all(x == x[0]) or np.all(y == y[0]):
    raise DegenerateError("Correlation is undefined for a constant vector.")

  return float(stats.pearsonr(x, y).statistic)


def _predictedScore (text, profile):
  try:
    return parse(text, profile).score
  except FormatError:
    return None


def evaluate (policy, samples, profile, n_jobs = 1):
  # Greedy-decodes every sample and computes the metric set of the profile.  The
  # policy only needs a greedy_decode(sample) -> text method.  Undefined metrics
  # (a K the profile does not read, correlation of constant predictions, Acc2
  # with only neutral golds) are reported as NaN.
  if not samples:
    raise EmptyError("Evaluation set is empty.")

  texts = Parallel(n_jobs=n_jobs)(delayed(policy.greedy_decode)(s) for s in samples)

  preds = [_predictedScore(t, profile) for t in texts]
  golds = [s.gold_score for s in samples]
  n_fail = sum(p is None for p in preds)

  report = { 'n_evaluated' : len(samples), 'n_format_failures' : n_fail }

  for K in (7, 5, 3):
    report['acc{}'.format(K)] = (acc_k(preds, golds, K, profile)
                                 if K in profile.supportedClasses() else np.nan)

  try:
    report['acc2'] = acc2(preds, golds, profile)
  except EmptyError:
    report['acc2'] = np.nan

  # F1 over the two sign classes, on the same non-neutral golds as Acc2.
  keep = [i for i, g in enumerate(golds) if score_to_polarity(g, profile) != Polarity.NEUTRAL]
  if keep:
    pc = [FAILED if preds[i] is None else score_to_class(preds[i], 2, profile) for i in keep]
    gc = [score_to_class(golds[i], 2, profile) for i in keep]
    labels = sorted(set(gc) | (set(pc) - { FAILED }))
    report['f1_macro'] = f1_macro(pc, gc, labels = labels)
  else:
    report['f1_macro'] = np.nan

  ok = [i for i, p in enumerate(preds) if p is not None]
  if ok:
    report['mae'] = mae([preds[i] for i in ok], [golds[i] for i in ok])
    try:
      report['pearson_corr'] = pearson_corr([preds[i] for i in ok], [golds[i] for i in ok])
    except (DegenerateError, EmptyError):
      report['pearson_corr'] = np.nan
  else:
    report['mae'] = report['pearson_corr'] = np.nan

  print ("Evaluated {} samples, {} format failures".format(len(samples), n_fail))

  return MetricsReport(**report)
