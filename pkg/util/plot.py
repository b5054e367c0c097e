# Reward curves of one or more GRPO runs, overlaid in one SVG.  Each curve is the
# per-step mean reward smoothed by a trailing moving average, and carries the SVG
# id "curve_<arm>" so it can be found in the file.

import os

import matplotlib
matplotlib.use('Agg')

import matplotlib as mpl
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

from util.errors import C2FError, EmptyError
from util.util import print

WINDOW = 20


def read_reward_csv (path):
  try:
    df = pd.read_csv(path)
  except pd.errors.EmptyDataError:
    raise EmptyError("Reward curve file is empty.", "path:", os.fspath(path))
  except pd.errors.ParserError as e:
    raise C2FError("Reward curve file is malformed.", "path:", os.fspath(path), "reason:", e)

  missing = { 'step', 'mean_reward' } - set(df.columns)
  if missing:
    raise C2FError("Reward curve file lacks columns.", "path:", os.fspath(path), "missing:", sorted(missing))
  if df.empty:
    raise EmptyError("Reward curve file has no rows.", "path:", os.fspath(path))
  if not pd.api.types.is_numeric_dtype(df['mean_reward']):
    raise C2FError("Reward curve file has non-numeric rewards.", "path:", os.fspath(path))

  return df


def smooth (values, window = WINDOW):
  return pd.Series(values).rolling(window, min_periods=1).mean()


# curves: ordered mapping of arm name -> reward CSV path.  Every file is read and
# checked before anything is written.
def plot_reward_curves (curves, out_path, window = WINDOW):
  if not curves:
    raise EmptyError("No reward curves to plot.")

  frames = { arm : read_reward_csv(path) for arm, path in curves.items() }
  os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)

  # Fixed hash salt, no date and text kept as text: the same curves always give
  # the same bytes.
  with mpl.rc_context({ 'svg.hashsalt' : 'c2fthinker', 'svg.fonttype' : 'none' }):
    fig, ax = plt.subplots(figsize=(7, 4))
    colors = sns.color_palette('colorblind', len(frames))

    for (arm, df), color in zip(frames.items(), colors):
      line, = ax.plot(df['step'], smooth(df['mean_reward'], window), label=arm, color=color)
      line.set_gid('curve_{}'.format(arm))

    ax.set_xlabel('GRPO step')
    ax.set_ylabel('mean reward (moving average, window {})'.format(window))
    ax.grid(alpha=0.3)
    ax.legend(title='arm')
    fig.tight_layout()

    fig.savefig(out_path, format='svg', metadata={ 'Date' : None })
    plt.close(fig)

  print ("Wrote reward curves for {} to {}".format(", ".join(frames), out_path))
  return out_path
