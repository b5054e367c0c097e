# Policy checkpoints.  A checkpoint is a directory holding
#
#   manifest.json  version, dimensions, vocabulary hash and parameter shapes
#   params.npy     every parameter, flattened in Policy.shapes() order, float64
#
# Both files are byte-deterministic for a given policy.

import json
import os

import numpy as np

from grammar.DatasetProfile import DatasetProfile
from grammar.Vocabulary import Vocabulary
from policy.Policy import Policy
from policy.PolicyConfig import PolicyConfig
from util.errors import CheckpointError, ProfileError

VERSION = 1
MANIFEST = 'manifest.json'
PARAMS = 'params.npy'


def manifest (policy):
  cfg = policy.cfg
  return { 'version' : VERSION,
           'dims' : { 'd' : policy.d, 'h' : policy.h, 'n_think' : policy.vocab.n_think,
                      'max_think' : cfg.max_think, 'score_step' : policy.vocab.score_step },
           'profile' : policy.vocab.profile.toDict(),
           'vocab_hash' : policy.vocab.hash(),
           'vocab_size' : len(policy.vocab),
           'param_shapes' : { k : list(v) for k, v in policy.shapes().items() },
           'free_decoding' : cfg.free_decoding,
           'max_len' : policy.max_len,
           'init_scale' : cfg.init_scale }


def save_policy (policy, path):
  os.makedirs(path, exist_ok=True)
  with open(os.path.join(path, MANIFEST), 'w', encoding='utf-8', newline='\n') as f:
    json.dump(manifest(policy), f, sort_keys=True, indent=2)
    f.write('\n')
  np.save(os.path.join(path, PARAMS), policy.flat(), allow_pickle=False)

  return [os.path.join(path, MANIFEST), os.path.join(path, PARAMS)]


# Loads a checkpoint.  When a vocabulary is given, the checkpoint must have been
# written for exactly that vocabulary.
def load_policy (path, vocab = None, free_decoding = None):
  try:
    with open(os.path.join(path, MANIFEST), 'r', encoding='utf-8') as f:
      man = json.load(f)
    flat = np.load(os.path.join(path, PARAMS), allow_pickle=False)
  except FileNotFoundError as e:
    raise CheckpointError("Checkpoint is incomplete.", "path:", os.fspath(path), "missing:", e.filename)
  except (ValueError, OSError) as e:
    raise CheckpointError("Checkpoint cannot be read.", "path:", os.fspath(path), "reason:", e)

  if man.get('version') != VERSION:
    raise CheckpointError("Unsupported checkpoint version.", "expected:", VERSION,
                          "got:", man.get('version'))

  try:
    dims = man['dims']
    if vocab is None:
      p = man['profile']
      profile = DatasetProfile(p['name'], p['r_min'], p['r_max'], p['class_edges_acc7'],
                               p['class_edges_acc5'], p['neutral_band'])
      vocab = Vocabulary(profile, dims['n_think'], dims['score_step'])
  except (KeyError, TypeError, ProfileError) as e:
    raise CheckpointError("Checkpoint manifest is malformed.", "path:", os.fspath(path), "reason:", e)

  if vocab.hash() != man['vocab_hash']:
    raise CheckpointError("Checkpoint was written for a different vocabulary.",
                          "expected:", vocab.hash(), "checkpoint:", man['vocab_hash'])

  if free_decoding is None:
    free_decoding = man['free_decoding']

  cfg = PolicyConfig(h = dims['h'], n_think = dims['n_think'], max_think = dims['max_think'],
                     score_step = dims['score_step'], init_scale = man.get('init_scale', 0.1),
                     free_decoding = free_decoding, max_len = man['max_len'])

  zeros = { k : np.zeros(tuple(s)) for k, s in man['param_shapes'].items() }
  try:
    policy = Policy(vocab, dims['d'], cfg, zeros)
  except ValueError as e:
    raise CheckpointError("Checkpoint dimensions do not match its manifest.", "reason:", e)

  if flat.shape != (policy.num_params(),):
    raise CheckpointError("Checkpoint parameter count does not match its manifest.",
                          "expected:", policy.num_params(), "got:", flat.shape)

  policy.setFlat(flat)
  return policy
