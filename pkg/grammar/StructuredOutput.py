# A StructuredOutput is one parsed coarse-to-fine answer: a polarity judgment, an
# opaque reasoning span and a fine-grained score.  Instances are immutable values.

from grammar.Polarity import Polarity
from util.util import fmtScore

# Tag delimiters, in the only order the grammar accepts.
TAGS = ('polarity', 'think', 'score')

def openTag (name):
  return "<{}>".format(name)

def closeTag (name):
  return "</{}>".format(name)


class StructuredOutput:

  __slots__ = ('polarity', 'think', 'score', 'raw_tokens')

  def __init__(self, polarity, think, score):
    if not isinstance(polarity, Polarity):
      raise TypeError("polarity must be a Polarity", "polarity:", polarity)

    # Scores are carried at render precision, so every instance survives a
    # render/parse round trip unchanged.
    score = round(float(score), 2) + 0.0
    think = tuple(str(t) for t in think)

    raw = [openTag('polarity'), str(polarity), closeTag('polarity'), openTag('think')]
    raw.extend(think)
    raw.extend([closeTag('think'), openTag('score'), fmtScore(score), closeTag('score')])

    object.__setattr__(self, 'polarity', polarity)
    object.__setattr__(self, 'think', think)
    object.__setattr__(self, 'score', score)
    object.__setattr__(self, 'raw_tokens', tuple(raw))


  def __setattr__(self, name, value):
    raise AttributeError("StructuredOutput is immutable")


  def __eq__(self, other):
    if not isinstance(other, StructuredOutput): return NotImplemented
    return (self.polarity, self.think, self.score) == (other.polarity, other.think, other.score)


  def __hash__(self):
    return hash((self.polarity, self.think, self.score))


  def __repr__(self):
    return "StructuredOutput({}, {}, {})".format(self.polarity.name, list(self.think),
                                                 fmtScore(self.score))
