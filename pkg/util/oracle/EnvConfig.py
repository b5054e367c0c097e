# EnvConfig holds everything the SentimentOracle needs to build one dataset split.

from grammar.DatasetProfile import DatasetProfile, getProfile
from util.errors import ConfigError


class EnvConfig:

  def __init__(self, n_samples = 1000, d = 8, hard_fraction = 0.3, profile = 'sims', seed = 0,
               teacher_noise = 0.2, noise_sigma = 0.3, hard_signal_scale = 0.6,
               annotation_step = 0.2, world_seed = 0, id_prefix = 's'):

    self.n_samples = n_samples
    self.d = d
    self.hard_fraction = hard_fraction
    self.profile = profile if isinstance(profile, DatasetProfile) else getProfile(profile)
    self.seed = seed
    self.teacher_noise = teacher_noise

    # Per-dimension standard deviation of the Gaussian feature noise.
    self.noise_sigma = noise_sigma

    # Strength of the (true) audio/vision signal on hard samples, relative to easy ones.
    self.hard_signal_scale = hard_signal_scale

    # Gold scores are drawn uniformly from this annotation grid (0 for continuous).
    self.annotation_step = annotation_step

    # Seeds the per-modality signal directions.  Splits that should describe the same
    # world (train, test, shifted) share it while differing in seed.
    self.world_seed = world_seed
    self.id_prefix = id_prefix

    if not (isinstance(n_samples, int) and n_samples > 0):
      raise ConfigError("n_samples must be a positive integer.", "n_samples:", n_samples)
    if not (isinstance(d, int) and d > 0):
      raise ConfigError("d must be a positive integer.", "d:", d)
    if not 0 <= hard_fraction <= 1:
      raise ConfigError("hard_fraction must lie in [0, 1].", "hard_fraction:", hard_fraction)
    if not (isinstance(seed, int) and seed >= 0):
      raise ConfigError("seed must be an unsigned integer.", "seed:", seed)
    if not teacher_noise >= 0:
      raise ConfigError("teacher_noise must be non-negative.", "teacher_noise:", teacher_noise)
    if not noise_sigma >= 0:
      raise ConfigError("noise_sigma must be non-negative.", "noise_sigma:", noise_sigma)
    if not annotation_step >= 0:
      raise ConfigError("annotation_step must be non-negative.", "annotation_step:", annotation_step)


  def toDict(self):
    d = dict(self.__dict__)
    d['profile'] = self.profile.name
    return d
