### The SentimentOracle builds a synthetic multimodal sentiment dataset and plays the
### role of the large teacher model that writes cold-start reasoning data.
###
### Each modality has a fixed unit signal direction w_m (drawn once from world_seed).
### A sample with gold score s carries the signal (s / r_scale) * w_m in each modality,
### plus i.i.d. Gaussian noise.  On hard samples the text signal is FLIPPED while audio
### and vision carry the true, weaker signal: the modality-conflict cases where a
### surface reading of the text gives the wrong polarity.
###
### The teacher does not read features.  Like a noisy observation of a fundamental
### value, it observes gold_score + teacher_noise * N(0, 1), derives its polarity
### from that observation, snaps it to the score grid and writes a reasoning span that
### names the sign of each modality's signal.  Because the teacher can be wrong,
### its candidates go through filter_and_relabel before they become training data.

import numpy as np

from grammar.codec import score_to_polarity, parse
from grammar.StructuredOutput import StructuredOutput
from util.errors import FormatError
from util.sample.CoTRecord import CoTRecord
from util.sample.Sample import Sample, MODALITIES
from util.util import print


class SentimentOracle:

  def __init__(self, cfg, vocab = None):
    self.cfg = cfg
    self.vocab = vocab
    self.profile = cfg.profile

    # Fixed unit signal direction per modality.
    world = np.random.default_rng(cfg.world_seed)
    w = world.normal(size=(len(MODALITIES), cfg.d))
    self.directions = w / np.linalg.norm(w, axis=1, keepdims=True)

    self.r_scale = max(abs(self.profile.r_min), abs(self.profile.r_max))


  def annotationGrid(self):
    p, step = self.profile, self.cfg.annotation_step
    n = int(np.floor(p.span / step + 1e-9)) + 1
    return np.round(p.r_min + step * np.arange(n), 6) + 0.0


  def generate_dataset(self):
    cfg = self.cfg
    n, d = cfg.n_samples, cfg.d
    rng = np.random.default_rng(cfg.seed)

    print ("SentimentOracle generating {} samples (d={}, hard_fraction={}, seed={})".format(
           n, d, cfg.hard_fraction, cfg.seed))

    # Exact hard count by construction.
    n_hard = int(round(cfg.hard_fraction * n))
    is_hard = np.zeros(n, dtype=bool)
    is_hard[rng.permutation(n)[:n_hard]] = True

    if cfg.annotation_step > 0:
      scores = rng.choice(self.annotationGrid(), size=n)
    else:
      scores = rng.uniform(self.profile.r_min, self.profile.r_max, size=n)

    noise = rng.normal(scale=cfg.noise_sigma, size=(n, len(MODALITIES), d))

    samples = []
    for i in range(n):
      a = scores[i] / self.r_scale
      amp = np.array([a, a, a])
      if is_hard[i]:
        amp = np.array([-a, cfg.hard_signal_scale * a, cfg.hard_signal_scale * a])

      feats = amp[:, None] * self.directions + noise[i]
      samples.append(Sample("{}{:05d}".format(cfg.id_prefix, i), feats[0], feats[1], feats[2],
                            float(scores[i]), self.profile, is_hard = is_hard[i]))

    print ("SentimentOracle generated {} samples, {} hard".format(n, n_hard))

    return samples


  # A noisy observation of the gold score, clipped to the profile's range.  One normal
  # draw per call whatever the noise level, so runs that differ only in teacher_noise
  # see the same underlying draws.
  def observeScore(self, sample, rng):
    z = rng.normal()
    obs = sample.gold_score + self.cfg.teacher_noise * z
    return float(np.clip(obs, self.profile.r_min, self.profile.r_max))


  # The reasoning span: one token per modality naming the sign of that modality's
  # projection on its signal direction.
  def thinkTemplate(self, sample):
    n_think = self.vocab.n_think
    think = []
    for m, feat in enumerate(sample.features):
      positive = 1 if float(self.directions[m] @ feat) > 0 else 0
      think.append("t{}".format((2 * m + positive) % n_think))
    return think


  def teacher_generate_cot(self, sample, rng):
    obs = self.observeScore(sample, rng)
    polarity = score_to_polarity(obs, self.profile)
    out = StructuredOutput(polarity, self.thinkTemplate(sample), self.vocab.snap(obs))

    return CoTRecord(sample.id, self.vocab.encode(out))


  def generate_candidates(self, samples, seed):
    rng = np.random.default_rng(seed)
    return [self.teacher_generate_cot(s, rng) for s in samples]


def filter_and_relabel (candidates, samples, vocab, profile):
  # Keeps candidates that parse and whose polarity agrees with the gold polarity,
  # then replaces the teacher's score with the grid point nearest the gold score.
  # The reasoning span is left as the teacher wrote it.
  by_id = { s.id : s for s in samples }

  kept = []
  for cand in candidates:
    sample = by_id[cand.sample_id]

    try:
      out = parse(cand.render(vocab), profile)
    except FormatError as e:
      print ("Dropped candidate for {}: {}".format(cand.sample_id, e))
      continue

    if out.polarity != sample.gold_polarity:
      print ("Dropped candidate for {}: polarity {} vs gold {}".format(
             cand.sample_id, out.polarity, sample.gold_polarity))
      continue

    relabeled = StructuredOutput(out.polarity, out.think, vocab.snap(sample.gold_score))
    kept.append(CoTRecord(cand.sample_id, vocab.encode(relabeled)))

  print ("CoT filter retained {} of {} candidates".format(len(kept), len(candidates)),
         override=True)

  return kept


def generate_dataset (cfg):
  return SentimentOracle(cfg).generate_dataset()
