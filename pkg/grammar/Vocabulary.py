# The Vocabulary maps the structured output language onto dense integer token ids.
#
# Layout (ids are assigned in this order and never change for a fixed configuration):
#   8 special tokens: <bos>, <eos> and the six tag delimiters
#   3 polarity tokens: negative, neutral, positive
#   n_think opaque reasoning tokens: t0 .. t{n_think-1}
#   one score token per grid point on [r_min, r_max], rendered with two decimals

import hashlib

import numpy as np

from grammar.Polarity import Polarity
from grammar.StructuredOutput import TAGS, openTag, closeTag
from util.errors import VocabError
from util.util import fmtScore

BOS = '<bos>'
EOS = '<eos>'


class Vocabulary:

  def __init__(self, profile, n_think = 6, score_step = 0.1):
    if n_think < 1:
      raise VocabError("At least one think token is required.", "n_think:", n_think)
    if score_step < 0.01:
      raise VocabError("Score grid step must be at least 0.01 (render precision).",
                       "score_step:", score_step)

    self.profile = profile
    self.n_think = int(n_think)
    self.score_step = float(score_step)

    specials = [BOS, EOS]
    for tag in TAGS: specials.extend([openTag(tag), closeTag(tag)])

    n_grid = int(np.floor(profile.span / self.score_step + 1e-9)) + 1
    self.score_values = np.round(profile.r_min + self.score_step * np.arange(n_grid), 6) + 0.0

    self.tokens = tuple(specials
                        + [str(p) for p in sorted(Polarity)]
                        + ["t{}".format(i) for i in range(self.n_think)]
                        + [fmtScore(v) for v in self.score_values])

    self.ids = { tok : i for i, tok in enumerate(self.tokens) }
    if len(self.ids) != len(self.tokens):
      raise VocabError("Score grid does not render to unique tokens.", "score_step:", score_step)

    self.bos = self.ids[BOS]
    self.eos = self.ids[EOS]
    self.open = { tag : self.ids[openTag(tag)] for tag in TAGS }
    self.close = { tag : self.ids[closeTag(tag)] for tag in TAGS }

    self.polarity_ids = np.array([self.ids[str(p)] for p in sorted(Polarity)])
    self.think_ids = np.array([self.ids["t{}".format(i)] for i in range(self.n_think)])
    self.score_ids = np.array([self.ids[fmtScore(v)] for v in self.score_values])

    # Tokens that are plain content (rendered with separating spaces) rather than tags.
    self.is_content = np.zeros(len(self.tokens), dtype=bool)
    self.is_content[self.polarity_ids] = True
    self.is_content[self.think_ids] = True
    self.is_content[self.score_ids] = True


  def __len__(self):
    return len(self.tokens)


  # Nearest grid point to a score, clipped to the grid.  Ties round away from r_min.
  def snap(self, score):
    i = int(np.floor((score - self.profile.r_min) / self.score_step + 0.5))
    i = min(max(i, 0), len(self.score_values) - 1)
    return float(self.score_values[i])


  def scoreToken(self, score):
    tok = fmtScore(score)
    if tok not in self.ids or not self.is_content[self.ids[tok]]:
      raise VocabError("Score is not a grid point of this vocabulary.", "score:", tok)
    return self.ids[tok]


  def encode(self, output):
    # Token ids of a StructuredOutput, terminated by <eos>.  The <bos> token is the
    # decoder's first input and is never part of an output sequence.
    ids = []
    for tok in output.raw_tokens:
      if tok not in self.ids:
        raise VocabError("Token is not in the vocabulary.", "token:", tok)
      ids.append(self.ids[tok])
    self.scoreToken(output.score)
    return tuple(ids) + (self.eos,)


  def decode(self, ids):
    # Renders a token id sequence to text.  Tags are concatenated directly, adjacent
    # content tokens are separated by one space, <bos>/<eos> are dropped.
    out = []
    prev_content = False
    for i in ids:
      i = int(i)
      if i < 0 or i >= len(self.tokens):
        raise VocabError("Token id out of range.", "id:", i, "vocab size:", len(self.tokens))
      if i == self.bos or i == self.eos:
        prev_content = False
        continue
      if self.is_content[i] and prev_content: out.append(' ')
      out.append(self.tokens[i])
      prev_content = bool(self.is_content[i])
    return ''.join(out)


  def hash(self):
    return hashlib.sha256("\n".join(self.tokens).encode('utf-8')).hexdigest()


  def __repr__(self):
    return "Vocabulary({}, size={})".format(self.profile.name, len(self.tokens))
