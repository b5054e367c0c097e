# Error hierarchy for the engine.  Every error is a ValueError so callers that only
# care about "bad input" can catch one thing.  Like the pipeline's own ValueErrors,
# errors are raised with a message followed by context arguments:
#
#   raise DimensionError("Feature vector has wrong dimension", "expected:", d, "got:", n)


class C2FError(ValueError):

  def __str__(self):
    return " ".join(str(a) for a in self.args)


class ConfigError(C2FError):
  pass


class DimensionError(C2FError):
  pass


class VocabError(C2FError):
  pass


class GrammarError(C2FError):
  # A forced prefix that the output grammar cannot extend.
  pass


class ProfileError(C2FError):
  pass


class EmptyError(C2FError):
  pass


class DegenerateError(C2FError):
  pass


class CheckpointError(C2FError):
  pass


class LengthError(C2FError):

  def __init__(self, message, *args, rollout = None):
    super().__init__(message, *args)

    # The truncated rollout, so callers may score it instead of aborting.
    self.rollout = rollout


class FormatError(C2FError):

  MISSING_TAG = 'MissingTag'
  WRONG_ORDER = 'WrongOrder'
  BAD_POLARITY = 'BadPolarity'
  BAD_SCORE = 'BadScore'
  SCORE_OUT_OF_RANGE = 'ScoreOutOfRange'
  TRAILING_CONTENT = 'TrailingContent'

  def __init__(self, kind, *args):
    super().__init__(kind, *args)
    self.kind = kind


class NumericalError(C2FError):
  # Parameters stopped being finite.
  pass
