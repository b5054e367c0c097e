# Group relative policy optimization, as plain functions over a Policy.  Trainers
# own the loop; everything here is stateless apart from the rng it is handed.
#
# For a batch of groups with G rollouts each, the loss minimized is
#
#   L = -1/(N G) * sum_groups sum_i 1/n_i * sum_{t >= f_i} [ A_i log pi(o_it) - beta KL_t ]
#
# where N is the number of groups, f_i the forced prefix length of rollout i,
# n_i = len(o_i) - f_i the number of sampled tokens and KL_t the exact divergence
# between the current and reference next-token distributions at position t.
# Advantages are constants: nothing flows back into rewards.
#
# Forced tokens stay out of the likelihood ratio and the KL.  A hinted rollout
# that beats the unhinted group it replaced also credits its forced polarity
# token with that anchor advantage C_i > 0, adding C_i log pi(polarity) to the
# bracket and counting one more term in n_i.  The policy still writes its own
# polarity at that position when unhinted, so a rescued group moves the
# unhinted polarity decision towards the gold one.

import numpy as np

from grammar.StructuredOutput import openTag, closeTag
from reward.rewards import total_reward
from trainer.RolloutGroup import RolloutGroup
from util.errors import EmptyError, LengthError


def compute_advantages (rewards):
  r = np.asarray(rewards, dtype=np.float64)
  if r.ndim != 1 or len(r) < 2:
    raise LengthError("Advantages need a group of at least two rewards.", "rewards:", r.shape)

  # An exactly constant group carries no signal: all advantages are zero.
  if np.all(r == r[0]):
    return np.zeros_like(r)

  # Population standard deviation.
  return (r - r.mean()) / r.std()


def score_rollout (policy, rollout, sample, weights):
  return total_reward(policy.vocab.decode(rollout.tokens), sample, weights, policy.vocab.profile)


def rollout_group (policy, sample, cfg, rng, forced_prefix = ()):
  # G independent rollouts for one sample.  Each rollout draws from its own child
  # generator so the group is reproducible regardless of rollout lengths.
  if cfg.group_size < 2:
    raise LengthError("Group size must be at least 2.", "G:", cfg.group_size)

  context = policy.encode(sample)
  rollouts = []
  for child in rng.spawn(cfg.group_size):
    try:
      rollouts.append(policy.sample_sequence(context, cfg.temperature, child, forced_prefix))
    except LengthError as e:
      # Cut off at max_len: kept, and scored as a format failure.
      rollouts.append(e.rollout)

  breakdowns = [score_rollout(policy, r, sample, cfg.weights) for r in rollouts]
  advantages = compute_advantages([b.total for b in breakdowns])

  return RolloutGroup(sample, rollouts, breakdowns, advantages, hinted = len(forced_prefix) > 0)


def detect_hard (group, tau):
  return bool(np.max(group.rewards) < tau)


# Token ids of the rendered polarity block "<polarity> P </polarity>".
def hint_prefix (vocab, polarity):
  return (vocab.ids[openTag('polarity')], vocab.ids[str(polarity)], vocab.ids[closeTag('polarity')])


# Position of the polarity token inside the hint prefix.
ANCHOR = 1


def anchor_advantages (hinted_rewards, baseline_rewards):
  # Each hinted reward against the unhinted group it replaces, standardized over
  # both groups together.  Only improvements earn credit.
  hinted = np.asarray(hinted_rewards, dtype=np.float64)
  baseline = np.asarray(baseline_rewards, dtype=np.float64)
  if len(hinted) == 0 or len(baseline) == 0:
    raise LengthError("Anchor advantages need both groups.", "hinted:", len(hinted),
                      "baseline:", len(baseline))

  pooled = np.concatenate([hinted, baseline])
  if np.all(pooled == pooled[0]):
    return np.zeros_like(hinted)

  return np.maximum((hinted - baseline.mean()) / pooled.std(), 0.0)


def hint_resample (policy, sample, cfg, rng, baseline_group = None):
  group = rollout_group(policy, sample, cfg, rng, hint_prefix(policy.vocab, sample.gold_polarity))
  if baseline_group is not None:
    group.anchor_advantages = anchor_advantages(group.rewards, baseline_group.rewards)
  return group


def kl_term (policy, ref_policy, sample, prefix = ()):
  # Exact KL(pi || pi_ref) between the next-token distributions after prefix.
  # Both policies share the grammar, so they put mass on the same tokens.
  lp = policy.token_logprobs(policy.encode(sample), prefix)
  lq = ref_policy.token_logprobs(ref_policy.encode(sample), prefix)
  legal = np.isfinite(lp)
  p = np.exp(lp[legal])
  return max(0.0, float(np.sum(p * (lp[legal] - lq[legal]))))


def grpo_loss (policy, ref_policy, groups, beta):
  return grpo_loss_and_grad(policy, ref_policy, groups, beta)[0]


def grpo_loss_and_grad (policy, ref_policy, groups, beta):
  # Returns (loss, gradient, mean KL over loss positions).  Groups are visited in
  # order and gradients summed in that order, so the result is deterministic.
  if not groups:
    raise EmptyError("GRPO loss needs at least one group.")

  n_rollouts = sum(g.G for g in groups)
  grads = policy.zerosLike()
  loss, kl_sum, kl_count = 0.0, 0.0, 0

  for group in groups:
    for rollout, adv, anchor in zip(group.rollouts, group.advantages, group.anchor_advantages):
      f = rollout.forced_prefix_len
      sampled = len(rollout) - f
      if sampled <= 0: continue
      anchored = anchor > 0 and f > ANCHOR
      n = sampled + anchored

      cache = policy.forward(group.sample, rollout.tokens)
      lq = ref_policy.forward(group.sample, rollout.tokens)['logp']
      lp, p, M = cache['logp'], cache['p'], cache['M']
      T = len(rollout)

      diff = np.where(M, lp - np.where(M, lq, 0.0), 0.0)
      kl = np.sum(p * diff, axis=1)

      coef = -1.0 / (n_rollouts * n)
      live = np.arange(T) >= f
      w = np.where(live, adv, 0.0)
      if anchored: w[ANCHOR] += anchor

      loss += coef * float(np.sum(w * cache['token_logp']) - beta * np.sum(kl[live]))
      kl_sum += float(np.sum(kl[live]))
      kl_count += sampled

      onehot = np.zeros_like(p)
      onehot[np.arange(T), cache['tokens']] = 1.0
      dZ = w[:, None] * (onehot - p) - beta * live[:, None] * p * (diff - kl[:, None])

      g = policy.backward(cache, coef * dZ)
      for k in grads: grads[k] += g[k]

  return loss, grads, (kl_sum / kl_count if kl_count else 0.0)
