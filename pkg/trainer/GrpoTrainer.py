from Pipeline import Pipeline
from reward.rewards import RewardWeights
from trainer.Trainer import Trainer
from trainer.grpo import rollout_group, detect_hard, grpo_loss_and_grad
from util.errors import ConfigError, EmptyError
from util.util import print, cosine_lr

import numpy as np
import pandas as pd


class GrpoConfig:

  def __init__(self, group_size = 4, beta = 0.1, hard_threshold = 2.0, weights = None,
               learning_rate = 0.05, steps = 100, batch_size = 8, seed = 0,
               hint_enabled = True, include_hard = True, temperature = 1.0):

    self.group_size = group_size
    self.beta = beta

    # A group is hard when no rollout reaches this total reward.  The default is
    # lambda_format + lambda_polarity: no rollout was both well formed and right
    # about polarity.
    self.hard_threshold = hard_threshold
    self.weights = weights if weights is not None else RewardWeights()
    self.learning_rate = learning_rate
    self.steps = steps
    self.batch_size = batch_size
    self.seed = seed
    self.hint_enabled = bool(hint_enabled)
    self.include_hard = bool(include_hard)
    self.temperature = temperature

    if not (isinstance(group_size, int) and group_size >= 2):
      raise ConfigError("group_size must be an integer of at least 2.", "group_size:", group_size)
    if not beta >= 0:
      raise ConfigError("beta must be non-negative.", "beta:", beta)
    if not hard_threshold >= 0:
      raise ConfigError("hard_threshold must be non-negative.", "hard_threshold:", hard_threshold)
    if not learning_rate >= 0:
      raise ConfigError("learning_rate must be non-negative.", "learning_rate:", learning_rate)
    if not (isinstance(steps, int) and steps >= 1):
      raise ConfigError("steps must be a positive integer.", "steps:", steps)
    if not (isinstance(batch_size, int) and batch_size >= 1):
      raise ConfigError("batch_size must be a positive integer.", "batch_size:", batch_size)
    if not temperature > 0:
      raise ConfigError("temperature must be positive.", "temperature:", temperature)


  def toDict(self):
    d = dict(self.__dict__)
    d['weights'] = self.weights.toDict()
    return d


class GrpoTrainer(Trainer):

  def __init__(self, id, name, policy, samples, cfg = None, ref_policy = None):
    # Base class init.
    super().__init__(id, name, policy)

    self.cfg = cfg if cfg is not None else GrpoConfig()

    # The reference policy is frozen for the whole stage.
    self.ref_policy = ref_policy if ref_policy is not None else policy.copy()

    # Without hard samples, samples the generator flagged hard never enter the pool.
    self.pool = [s for s in samples if self.cfg.include_hard or not s.is_hard]
    if not self.pool:
      raise EmptyError("No training samples left for GRPO.", "samples:", len(samples),
                       "include_hard:", self.cfg.include_hard)

    self.rng = np.random.default_rng(self.cfg.seed)
    self.total_steps = self.cfg.steps
    self.log_filename = 'rewards'

    # Mean total reward of the policy's own rollouts at each step.
    self.reward_curve = []


  def handleHardGroup(self, group):
    # Called for each group detect_hard flags.  Returns the group to train on,
    # or None to drop it.  A hard group has (nearly) no learning signal: keep it
    # only when hard samples are included.
    return group if self.cfg.include_hard else None


  def step(self, currentStep):
    cfg = self.cfg
    lr = cosine_lr(cfg.learning_rate, currentStep, self.total_steps)

    idx = self.rng.choice(len(self.pool), size=min(cfg.batch_size, len(self.pool)), replace=False)

    first, groups = [], []
    n_hard = n_hinted = n_skipped = 0

    for i in idx:
      group = rollout_group(self.policy, self.pool[i], cfg, self.rng)
      first.append(group)

      if detect_hard(group, cfg.hard_threshold):
        n_hard += 1
        group = self.handleHardGroup(group)
        if group is None:
          n_skipped += 1
          continue
        if group.hinted: n_hinted += 1

      groups.append(group)

    loss = kl = grad_norm = 0.0
    if groups:
      loss, grads, kl = grpo_loss_and_grad(self.policy, self.ref_policy, groups, cfg.beta)
      grad_norm = float(np.sqrt(sum(np.sum(g ** 2) for g in grads.values())))
      self.policy.apply_gradient(grads, lr)

    # The reward curve tracks the policy's own rollouts, before any hint.
    rewards = np.concatenate([g.rewards for g in first])
    mean_reward = float(np.mean(rewards))
    self.reward_curve.append(mean_reward)

    B = len(first)
    components = pd.DataFrame([b.toRecord() for g in first for b in g.breakdowns]).mean()
    self.logEvent({ 'step' : currentStep, 'mean_reward' : mean_reward,
                    'mean_format' : float(components['format']),
                    'mean_polarity' : float(components['polarity']),
                    'mean_score' : float(components['score']),
                    'hard_fraction' : n_hard / B, 'hinted_fraction' : n_hinted / B,
                    'skipped_fraction' : n_skipped / B, 'kl' : kl, 'loss' : loss, 'lr' : lr,
                    'grad_norm' : grad_norm })

    print ("{} step {}: mean reward {:.4f}, hard {}/{}, hinted {}, loss {:.6f}, kl {:.6f}".format(
           self.name, currentStep, mean_reward, n_hard, B, n_hinted, loss, kl))


  def stats(self):
    if self.dfLog is None or self.dfLog.empty: return {}
    df = self.dfLog
    return { 'steps' : int(len(df)),
             'mean_reward_first' : float(df['mean_reward'].iloc[0]),
             'mean_reward_last' : float(df['mean_reward'].iloc[-1]),
             'hard_fraction' : float(df['hard_fraction'].mean()),
             'hinted_fraction' : float(df['hinted_fraction'].mean()),
             'skipped_fraction' : float(df['skipped_fraction'].mean()) }


# Stage two: GRPO from the stage-one policy, which is also the frozen reference.
# Returns the trained policy, the per-step mean reward and summary statistics.
def grpo_train (policy_sft, samples, cfg = None, pipeline = None, name = 'GrpoTrainer'):
  from trainer.HintGuidedGrpoTrainer import HintGuidedGrpoTrainer

  cfg = cfg if cfg is not None else GrpoConfig()
  cls = HintGuidedGrpoTrainer if cfg.hint_enabled else GrpoTrainer

  trainer = cls(0, name, policy_sft.copy(), samples, cfg, ref_policy = policy_sft.copy())
  (pipeline if pipeline is not None else Pipeline('grpo')).runner(trainer)

  return trainer.policy, list(trainer.reward_curve), trainer.stats()
