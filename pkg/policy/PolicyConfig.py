from util.errors import ConfigError


class PolicyConfig:

  def __init__(self, h = 32, n_think = 6, max_think = 4, score_step = 0.1, init_scale = 0.1,
               free_decoding = False, max_len = None, temperature = 1.0, seed = 0):

    self.h = h
    self.n_think = n_think
    self.max_think = max_think
    self.score_step = score_step
    self.init_scale = init_scale
    self.free_decoding = bool(free_decoding)

    # None means the grammar's own maximum sequence length.
    self.max_len = max_len
    self.temperature = temperature
    self.seed = seed

    if not (isinstance(h, int) and h > 0):
      raise ConfigError("h must be a positive integer.", "h:", h)
    if not (isinstance(max_think, int) and max_think >= 0):
      raise ConfigError("max_think must be a non-negative integer.", "max_think:", max_think)
    if not temperature > 0:
      raise ConfigError("temperature must be positive.", "temperature:", temperature)
    if max_len is not None and max_len < 1:
      raise ConfigError("max_len must be positive.", "max_len:", max_len)


  def toDict(self):
    return dict(self.__dict__)
