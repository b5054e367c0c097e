from enum import Enum, unique

from util.errors import FormatError

@unique
class Polarity(Enum):
  NEGATIVE = -1
  NEUTRAL = 0
  POSITIVE = 1

  # Polarities are ordered Negative < Neutral < Positive, so polarity can be
  # compared the same way scores are.
  def __lt__(self, other):
    return self.value < other.value

  def __le__(self, other):
    return self.value <= other.value

  def __str__(self):
    return self.name.lower()

  @classmethod
  def fromString(cls, text):
    # Only the canonical lower-case strings are recognized.  No repair.
    for p in cls:
      if str(p) == text: return p

    raise FormatError(FormatError.BAD_POLARITY, "unrecognized polarity:", repr(text))
