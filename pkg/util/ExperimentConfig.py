# An ExperimentConfig resolves one config module (see config/default.py) into the
# configuration objects of every stage.  Resolution happens once: every section is
# validated on construction, so a bad config fails before any output is written,
# and toDict() is the snapshot recorded in run manifests.

import importlib
import importlib.util
import os

from grammar.DatasetProfile import getProfile
from grammar.Vocabulary import Vocabulary
from policy.PolicyConfig import PolicyConfig
from reward.rewards import RewardWeights
from trainer.GrpoTrainer import GrpoConfig
from trainer.SftTrainer import SftConfig
from util.errors import ConfigError
from util.oracle.EnvConfig import EnvConfig

SECTIONS = ('env', 'test', 'shift', 'policy', 'sft', 'grpo', 'evaluation')

# GRPO ablation arms: (hint_enabled, include_hard).
ARMS = { 'full' : (True, True), 'no_hint' : (False, True), 'no_hard' : (True, False) }

SPLITS = ('train', 'test', 'shift')

# Split seeds are offsets from the root seed.
SPLIT_SEED_OFFSET = { 'train' : 0, 'test' : 1, 'shift' : 2 }
SPLIT_ID_PREFIX = { 'train' : 's', 'test' : 't', 'shift' : 'x' }


def load_module (name):
  # A config is either a module name under config/ or a path to a .py file.
  if name.endswith('.py') or os.sep in name:
    if not os.path.isfile(name):
      raise ConfigError("Config file not found.", "path:", name)
    spec = importlib.util.spec_from_file_location('c2f_config', name)
    module = importlib.util.module_from_spec(spec)
    try:
      spec.loader.exec_module(module)
    except Exception as e:
      raise ConfigError("Config file cannot be executed.", "path:", name, "reason:", repr(e))
    return module

  try:
    return importlib.import_module('config.{}'.format(name), package=None)
  except ModuleNotFoundError:
    raise ConfigError("No such config module.", "name:", name)


class ExperimentConfig:

  def __init__(self, module, seed = None, free_decoding = None):
    self.seed = int(seed if seed is not None else getattr(module, 'seed', 0))
    if self.seed < 0:
      raise ConfigError("seed must be an unsigned integer.", "seed:", self.seed)

    self.profile = getProfile(getattr(module, 'profile', 'sims'))

    self.sections = {}
    for name in SECTIONS:
      value = getattr(module, name, {})
      if not isinstance(value, dict):
        raise ConfigError("Config section must be a dictionary.", "section:", name, "got:", type(value).__name__)
      self.sections[name] = dict(value)

    if free_decoding:
      self.sections['policy']['free_decoding'] = True

    for key in ('hint_enabled', 'include_hard', 'seed'):
      if key in self.sections['grpo']:
        raise ConfigError("GRPO key is set by the command line, not the config.", "key:", key)

    # Resolve everything now.
    self.snapshot = self._resolve()


  @classmethod
  def load(cls, name, seed = None, free_decoding = None):
    return cls(load_module(name), seed, free_decoding)


  def _build(self, cls, section, **fixed):
    try:
      return cls(**dict(self.sections[section], **fixed)) if section else cls(**fixed)
    except TypeError as e:
      raise ConfigError("Unknown or duplicated key in config section.", "section:", section, "reason:", e)


  def envConfig(self, split):
    if split not in SPLITS:
      raise ConfigError("Unknown data split.", "split:", split, "known:", list(SPLITS))

    env = dict(self.sections['env'])
    for key in ('seed', 'profile', 'id_prefix'):
      if key in env:
        raise ConfigError("Env key is derived, not configured.", "key:", key)

    if split != 'train':
      test = dict(self.sections['test'])
      env['n_samples'] = test.pop('n_samples', 500)
      if test:
        raise ConfigError("Unknown key in config section.", "section:", "test", "keys:", sorted(test))

    if split == 'shift':
      shift = dict(self.sections['shift'])
      noise_scale = shift.pop('noise_scale', 2.0)
      env['hard_fraction'] = shift.pop('hard_fraction', 0.5)
      env['n_samples'] = shift.pop('n_samples', env['n_samples'])
      if shift:
        raise ConfigError("Unknown key in config section.", "section:", "shift", "keys:", sorted(shift))
      env['noise_sigma'] = env.get('noise_sigma', EnvConfig().noise_sigma) * noise_scale

    try:
      return EnvConfig(**env, profile = self.profile, seed = self.seed + SPLIT_SEED_OFFSET[split],
                       id_prefix = SPLIT_ID_PREFIX[split])
    except TypeError as e:
      raise ConfigError("Unknown key in config section.", "section:", "env", "reason:", e)


  def policyConfig(self):
    return self._build(PolicyConfig, 'policy', seed = self.seed)


  def vocabulary(self):
    p = self.policyConfig()
    return Vocabulary(self.profile, p.n_think, p.score_step)


  def sftConfig(self):
    return self._build(SftConfig, 'sft', seed = self.seed)


  def grpoConfig(self, arm = 'full'):
    if arm not in ARMS:
      raise ConfigError("Unknown GRPO arm.", "arm:", arm, "known:", sorted(ARMS))
    hint_enabled, include_hard = ARMS[arm]

    grpo = dict(self.sections['grpo'])
    weights = self._build(RewardWeights, None, **grpo.pop('weights', {}))
    try:
      return GrpoConfig(**grpo, weights = weights, seed = self.seed,
                        hint_enabled = hint_enabled, include_hard = include_hard)
    except TypeError as e:
      raise ConfigError("Unknown key in config section.", "section:", "grpo", "reason:", e)


  @property
  def n_jobs(self):
    evaluation = dict(self.sections['evaluation'])
    n_jobs = evaluation.pop('n_jobs', 1)
    if evaluation:
      raise ConfigError("Unknown key in config section.", "section:", "evaluation", "keys:", sorted(evaluation))
    return n_jobs


  def seeds(self):
    seeds = { 'root' : self.seed, 'world' : self.envConfig('train').world_seed }
    seeds.update({ split : self.seed + off for split, off in SPLIT_SEED_OFFSET.items() })
    return seeds


  def _resolve(self):
    grpo = self.grpoConfig('full').toDict()
    del grpo['hint_enabled'], grpo['include_hard']

    return { 'profile' : self.profile.toDict(),
             'seed' : self.seed,
             'env' : { split : self.envConfig(split).toDict() for split in SPLITS },
             'policy' : self.policyConfig().toDict(),
             'sft' : self.sftConfig().toDict(),
             'grpo' : grpo,
             'evaluation' : { 'n_jobs' : self.n_jobs } }


  def toDict(self):
    return self.snapshot
