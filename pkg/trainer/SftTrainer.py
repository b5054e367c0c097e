from Pipeline import Pipeline
from trainer.Trainer import Trainer
from util.errors import ConfigError, EmptyError
from util.util import print, cosine_lr

import math
import numpy as np


class SftConfig:

  def __init__(self, learning_rate = 1e-3, epochs = 5, batch_size = 16, seed = 0):
    self.learning_rate = learning_rate
    self.epochs = epochs
    self.batch_size = batch_size
    self.seed = seed

    # A zero learning rate is a valid null run (the policy is left as it was).
    if not learning_rate >= 0:
      raise ConfigError("learning_rate must be non-negative.", "learning_rate:", learning_rate)
    if not (isinstance(epochs, int) and epochs >= 1):
      raise ConfigError("epochs must be a positive integer.", "epochs:", epochs)
    if not (isinstance(batch_size, int) and batch_size >= 1):
      raise ConfigError("batch_size must be a positive integer.", "batch_size:", batch_size)


  def toDict(self):
    return dict(self.__dict__)


# Pairs each cold-start record with the sample it was written for.
def pair_records (samples, records):
  by_id = { s.id : s for s in samples }
  missing = [r.sample_id for r in records if r.sample_id not in by_id]
  if missing:
    raise EmptyError("Cold-start records name unknown samples.", "missing:", missing[:5])

  pairs = [(by_id[r.sample_id], r) for r in records]
  if not pairs:
    raise EmptyError("Cold-start dataset is empty.")
  return pairs


# Summed negative log-likelihood of one target sequence.
def sequence_nll (policy, sample, tokens):
  return -float(np.sum(policy.sequence_logprob(policy.encode(sample), tokens)))


def sft_loss (policy, batch):
  return sft_loss_and_grad(policy, batch)[0]


def sft_loss_and_grad (policy, batch):
  # Next-token loss of a batch of (Sample, CoTRecord): mean per-token NLL within a
  # sequence, then mean over sequences.  The gradient is exact.
  if not batch:
    raise EmptyError("SFT loss needs at least one record.")

  B = len(batch)
  grads = policy.zerosLike()
  loss = 0.0

  for sample, record in batch:
    T = len(record.target_tokens)
    value, g = policy.value_and_grad(sample, record.target_tokens, np.full(T, -1.0 / (T * B)))
    loss += value
    for k in grads: grads[k] += g[k]

  return loss, grads


class SftTrainer(Trainer):

  def __init__(self, id, name, policy, pairs, cfg = None):
    # Base class init.
    super().__init__(id, name, policy)

    if not pairs:
      raise EmptyError("Cold-start dataset is empty.")

    self.pairs = list(pairs)
    self.cfg = cfg if cfg is not None else SftConfig()
    self.rng = np.random.default_rng(self.cfg.seed)

    self.total_steps = self.cfg.epochs
    self.n_batches = math.ceil(len(self.pairs) / self.cfg.batch_size)

    self.log_filename = 'sft_loss'

    # Mean training loss of each epoch.
    self.curve = []


  def step(self, epoch):
    # One epoch of minibatch gradient descent over a fresh shuffle.  The learning
    # rate follows a cosine decay over every update of the stage.
    order = self.rng.permutation(len(self.pairs))
    bs = self.cfg.batch_size
    losses = []

    lr0 = cosine_lr(self.cfg.learning_rate, epoch * self.n_batches, self.total_steps * self.n_batches)

    for b in range(self.n_batches):
      batch = [self.pairs[i] for i in order[b * bs:(b + 1) * bs]]
      lr = cosine_lr(self.cfg.learning_rate, epoch * self.n_batches + b,
                     self.total_steps * self.n_batches)

      loss, grads = sft_loss_and_grad(self.policy, batch)
      losses.extend([loss] * len(batch))
      self.policy.apply_gradient(grads, lr)

    mean_loss = math.fsum(losses) / len(losses)
    self.curve.append(mean_loss)

    print ("{} epoch {}: mean loss {:.6f}, lr {:.6g}".format(self.name, epoch, mean_loss, lr0))

    self.logEvent({ 'epoch' : epoch, 'mean_loss' : mean_loss, 'lr' : lr0 })


# Stage one: supervised training of a copy of the policy on the cold-start data.
# Returns the trained policy and the per-epoch mean loss.
def sft_train (policy, pairs, cfg = None, pipeline = None):
  trainer = SftTrainer(0, 'SftTrainer', policy.copy(), pairs, cfg)
  (pipeline if pipeline is not None else Pipeline('sft')).runner(trainer)

  return trainer.policy, list(trainer.curve)
