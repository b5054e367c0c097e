from trainer.GrpoTrainer import GrpoTrainer
from trainer.grpo import hint_resample
from util.util import print


class HintGuidedGrpoTrainer(GrpoTrainer):

  # A GRPO trainer that rescues hard groups: when every rollout of a group misses
  # the threshold, the group is regenerated with the gold polarity block forced at
  # the start of every rollout, and the hinted group replaces the original.  Each
  # hinted rollout that beats the original group credits the forced polarity
  # token.  Hard groups are re-detected every time a sample is visited.

  def handleHardGroup(self, group):
    if not self.cfg.include_hard:
      return None

    hinted = hint_resample(self.policy, group.sample, self.cfg, self.rng, baseline_group = group)

    print ("{} hinted {}: rewards {} -> {}".format(self.name, group.sample_id,
           group.rewards.round(3).tolist(), hinted.rewards.round(3).tolist()))

    return hinted
