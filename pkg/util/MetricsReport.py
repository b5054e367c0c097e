# A MetricsReport holds one evaluation of a policy on one split.  Metrics a profile
# does not define, or that are undefined on the split, are NaN.

import math
import os

import pandas as pd

from util.errors import C2FError

METRICS = ('acc7', 'acc5', 'acc3', 'acc2', 'f1_macro', 'mae', 'pearson_corr')
COLUMNS = ('run_id', 'split') + METRICS + ('n_evaluated', 'n_format_failures')


class MetricsReport:

  def __init__(self, acc7, acc5, acc3, acc2, f1_macro, mae, pearson_corr,
               n_evaluated, n_format_failures):
    self.acc7 = float(acc7)
    self.acc5 = float(acc5)
    self.acc3 = float(acc3)
    self.acc2 = float(acc2)
    self.f1_macro = float(f1_macro)
    self.mae = float(mae)
    self.pearson_corr = float(pearson_corr)
    self.n_evaluated = int(n_evaluated)
    self.n_format_failures = int(n_format_failures)

    for k in ('acc7', 'acc5', 'acc3', 'acc2', 'f1_macro'):
      v = getattr(self, k)
      if not (math.isnan(v) or 0.0 <= v <= 1.0):
        raise C2FError("Accuracy outside [0, 1].", "{}:".format(k), v)
    if not (math.isnan(self.mae) or self.mae >= 0):
      raise C2FError("MAE must be non-negative.", "mae:", self.mae)
    if not (math.isnan(self.pearson_corr) or -1.0 - 1e-12 <= self.pearson_corr <= 1.0 + 1e-12):
      raise C2FError("Correlation outside [-1, 1].", "pearson_corr:", self.pearson_corr)
    if not 0 <= self.n_format_failures <= self.n_evaluated:
      raise C2FError("Format failure count exceeds evaluated count.",
                     "n_format_failures:", self.n_format_failures, "n_evaluated:", self.n_evaluated)


  def toDict(self):
    return { k : getattr(self, k) for k in METRICS + ('n_evaluated', 'n_format_failures') }


  # Flat "key: value" lines, in column order.  Metrics print with six decimals.
  def toText(self):
    lines = []
    for k, v in self.toDict().items():
      if isinstance(v, int): lines.append("{}: {}".format(k, v))
      elif math.isnan(v): lines.append("{}: nan".format(k))
      else: lines.append("{}: {:.6f}".format(k, v))
    return "\n".join(lines)


  def toRow(self, run_id, split):
    row = { 'run_id' : run_id, 'split' : split }
    row.update(self.toDict())
    return row


  def __eq__(self, other):
    # NaN fields compare equal to NaN, so a report equals its own rerun.
    if not isinstance(other, MetricsReport): return False
    a, b = self.toDict(), other.toDict()
    return all(a[k] == b[k] or (isinstance(a[k], float) and math.isnan(a[k]) and math.isnan(b[k]))
               for k in a)


  def __str__(self):
    return self.toText()


# Adds a report to a CSV of reports, replacing any earlier row for the same run
# and split.  Returns the table as written.
def append_report_csv (path, report, run_id, split):
  row = pd.DataFrame([report.toRow(run_id, split)], columns=list(COLUMNS))

  if os.path.exists(path):
    df = pd.read_csv(path, dtype={ 'run_id' : str, 'split' : str })
    df = df[~((df['run_id'] == run_id) & (df['split'] == split))]
    df = pd.concat([df, row], ignore_index=True)
  else:
    df = row

  df.to_csv(path, index=False, lineterminator='\n')
  return df
