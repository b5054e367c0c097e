# A Rollout is one generated sequence with the policy's conditional log-probability of
# every token.  The first forced_prefix_len tokens were forced (a hint), not sampled,
# but their log-probabilities are still recorded.

import numpy as np


class Rollout:

  def __init__(self, tokens, logprobs, forced_prefix_len = 0, truncated = False):
    self.tokens = tuple(int(t) for t in tokens)
    self.logprobs = np.asarray(logprobs, dtype=np.float64)
    self.forced_prefix_len = int(forced_prefix_len)

    # True when generation hit the length limit before <eos>.
    self.truncated = bool(truncated)

    if len(self.logprobs) != len(self.tokens):
      raise ValueError("Rollout needs one log-probability per token.",
                       "tokens:", len(self.tokens), "logprobs:", len(self.logprobs))


  def __len__(self):
    return len(self.tokens)


  @property
  def sum_logprob(self):
    return float(np.sum(self.logprobs))


  # Per-token policy-gradient weight mask: forced positions carry no weight.
  def sampledMask(self):
    m = np.ones(len(self.tokens))
    m[:self.forced_prefix_len] = 0.0
    return m


  def __repr__(self):
    return "Rollout({} tokens, forced {}, logp {:.4f}{})".format(
           len(self.tokens), self.forced_prefix_len, self.sum_logprob,
           ", truncated" if self.truncated else "")
