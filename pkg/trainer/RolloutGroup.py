# A RolloutGroup is the G sequences sampled for one sample at one training step,
# with each sequence's reward breakdown and group-relative advantage.  When the
# group was regenerated from a hint, every rollout shares the forced polarity block.

import numpy as np

from util.errors import LengthError


class RolloutGroup:

  def __init__(self, sample, rollouts, breakdowns, advantages, hinted = False,
               anchor_advantages = None):
    self.sample = sample
    self.rollouts = list(rollouts)
    self.breakdowns = list(breakdowns)
    self.rewards = np.array([b.total for b in self.breakdowns], dtype=np.float64)
    self.advantages = np.asarray(advantages, dtype=np.float64)
    self.hinted = bool(hinted)

    # Credit for the forced polarity token of each hinted rollout; zero unless the
    # group replaced an unhinted one it beats.
    if anchor_advantages is None: anchor_advantages = np.zeros(len(self.advantages))
    self.anchor_advantages = np.asarray(anchor_advantages, dtype=np.float64)

    if not (len(self.rollouts) == len(self.breakdowns) == len(self.advantages)
            == len(self.anchor_advantages)):
      raise LengthError("Rollouts, rewards and advantages must have one entry per group member.",
                        "rollouts:", len(self.rollouts), "rewards:", len(self.breakdowns),
                        "advantages:", len(self.advantages),
                        "anchor_advantages:", len(self.anchor_advantages))


  @property
  def sample_id(self):
    return self.sample.id


  @property
  def G(self):
    return len(self.rollouts)


  def __str__(self):
    return "({} G={} rewards {} {})".format(self.sample_id, self.G,
           np.array2string(self.rewards, precision=3), "hinted" if self.hinted else "unhinted")

  def __repr__(self):
    return self.__str__()
