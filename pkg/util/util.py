# General purpose utility functions for the engine, attached to no particular class.
# Available to any trainer, oracle or other module.  Should not require references to
# any pipeline object (pipeline, trainer, policy).

import builtins as __builtin__
import hashlib

import numpy as np

# Module level variable that can be changed by the command line or by tests.
silent_mode = False

# Import to overload print() to control printing levels, particularly suppressing
# per-step chatter for batch runs or speed tests.  Progress lines and final reports
# pass override=True and always print.
def print (*args, **kwargs):

  override = False

  if 'override' in kwargs:
    override = kwargs['override']
    del kwargs['override']

  if (not silent_mode) or override:
    return __builtin__.print (*args, **kwargs)


# Formats a sentiment score for display and for the wire format.  Negative zero
# is folded into zero so the same score always renders the same way.
def fmtScore (score, places = 2):
  return "{:.{}f}".format(round(float(score), places) + 0.0, places)


# Cosine decay from lr0 at step 0 towards zero at total_steps.  Shared by both
# training stages.
def cosine_lr (lr0, step, total_steps):
  if total_steps <= 1: return lr0
  return lr0 * 0.5 * (1.0 + np.cos(np.pi * step / total_steps))


# SHA-256 of a file on disk, used by run manifests.
def sha256_file (path):
  h = hashlib.sha256()
  with open(path, 'rb') as f:
    for chunk in iter(lambda: f.read(1 << 16), b''):
      h.update(chunk)
  return h.hexdigest()
