# Shared fixtures.  The tiny profile spans [-0.2, 0.2] so its score grid has five
# points, and the tiny policy stays small enough (a few hundred parameters) for
# central finite differences over every parameter.

import numpy as np
import pytest

from grammar.DatasetProfile import DatasetProfile
from grammar.Vocabulary import Vocabulary
from policy.Policy import Policy
from policy.PolicyConfig import PolicyConfig
from util import util
from util.sample.Sample import Sample

TINY = DatasetProfile('tiny', -0.2, 0.2)


@pytest.fixture(autouse=True)
def silent():
  util.silent_mode = True
  yield
  util.silent_mode = False


@pytest.fixture
def tiny_profile():
  return TINY


@pytest.fixture
def tiny_vocab():
  return Vocabulary(TINY, n_think = 2, score_step = 0.1)


def tiny_config(seed = 0, free_decoding = False):
  return PolicyConfig(h = 4, n_think = 2, max_think = 3, init_scale = 0.5, seed = seed,
                      free_decoding = free_decoding)


@pytest.fixture
def tiny_policy(tiny_vocab):
  return Policy(tiny_vocab, 2, tiny_config())


@pytest.fixture
def make_policy(tiny_vocab):
  def make(seed = 0, free_decoding = False):
    return Policy(tiny_vocab, 2, tiny_config(seed, free_decoding))
  return make


@pytest.fixture
def make_sample():
  def make(score, id = 's0', d = 2, profile = TINY, seed = 0, is_hard = False):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(3, d))
    return Sample(id, f[0], f[1], f[2], score, profile, is_hard = is_hard)
  return make


def flat_grads(policy, grads):
  return np.concatenate([grads[k].ravel() for k in policy.params])


@pytest.fixture
def numeric_grad():
  # Central differences of f(policy) over every parameter; the policy is restored.
  def grad(policy, f, eps = 1e-4):
    theta = policy.flat()
    g = np.zeros_like(theta)
    for i in range(len(theta)):
      step = np.zeros_like(theta)
      step[i] = eps
      policy.setFlat(theta + step)
      up = f(policy)
      policy.setFlat(theta - step)
      down = f(policy)
      g[i] = (up - down) / (2 * eps)
    policy.setFlat(theta)
    return g
  return grad
