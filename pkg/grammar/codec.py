# Rendering and parsing of the structured output language:
#
#   <polarity>P</polarity><think>T</think><score>S</score>
#
# P is a canonical polarity string, T a space-separated run of opaque reasoning
# tokens (possibly empty) and S a decimal score.  render() always writes S with two
# decimals; parse() accepts up to six.  parse() does no repair: the first violated
# rule is reported as a FormatError whose kind names it.  Rules are checked in the
# order MissingTag, WrongOrder, TrailingContent, BadPolarity, BadScore,
# ScoreOutOfRange.

import re

from grammar.Polarity import Polarity
from grammar.StructuredOutput import StructuredOutput, TAGS, openTag, closeTag
from util.errors import FormatError
from util.util import fmtScore

SCORE_PATTERN = re.compile(r'[+-]?\d+(\.\d{1,6})?')


def render (out):
  return "{}{}{}{}{}{}{}{}{}".format(
           openTag('polarity'), out.polarity, closeTag('polarity'),
           openTag('think'), " ".join(out.think), closeTag('think'),
           openTag('score'), fmtScore(out.score), closeTag('score'))


def parse (text, profile):
  # Every tag must be present exactly once.
  for tag in TAGS:
    for t in (openTag(tag), closeTag(tag)):
      n = text.count(t)
      if n == 0:
        raise FormatError(FormatError.MISSING_TAG, "missing tag:", t)
      if n > 1:
        raise FormatError(FormatError.WRONG_ORDER, "tag appears {} times:".format(n), t)

  # Tag positions must follow polarity -> think -> score, each block closed before
  # the next one opens.
  marks = []
  for tag in TAGS:
    marks.append((text.index(openTag(tag)), openTag(tag)))
    marks.append((text.index(closeTag(tag)), closeTag(tag)))

  for (a, ta), (b, tb) in zip(marks, marks[1:]):
    if not a < b:
      raise FormatError(FormatError.WRONG_ORDER, "expected", ta, "before", tb)

  # Nothing may appear outside the three blocks.
  ends = [pos + len(t) for pos, t in marks]
  gaps = [text[:marks[0][0]], text[ends[1]:marks[2][0]], text[ends[3]:marks[4][0]], text[ends[5]:]]
  for gap in gaps:
    if gap:
      raise FormatError(FormatError.TRAILING_CONTENT, "stray content outside tag blocks:", repr(gap))

  polarity = Polarity.fromString(text[ends[0]:marks[1][0]])
  think = text[ends[2]:marks[3][0]].split()

  score_text = text[ends[4]:marks[5][0]]
  if not SCORE_PATTERN.fullmatch(score_text):
    raise FormatError(FormatError.BAD_SCORE, "unparseable score:", repr(score_text))

  score = float(score_text)
  if not profile.contains(score):
    raise FormatError(FormatError.SCORE_OUT_OF_RANGE, "score", score_text, "outside",
                      "[{}, {}]".format(profile.r_min, profile.r_max), "for profile", profile.name)

  return StructuredOutput(polarity, think, score)


def score_to_polarity (s, profile):
  if s < -profile.neutral_band: return Polarity.NEGATIVE
  if s > profile.neutral_band: return Polarity.POSITIVE
  return Polarity.NEUTRAL
