import numpy as np
import pytest

from grammar.codec import parse, score_to_polarity
from grammar.DatasetProfile import SIMS
from grammar.Vocabulary import Vocabulary
from reward.rewards import format_reward
from util.errors import ConfigError, DimensionError, EmptyError
from util.oracle.EnvConfig import EnvConfig
from util.oracle.SentimentOracle import SentimentOracle, filter_and_relabel, generate_dataset
from util.records import write_samples, read_samples, write_cot, read_cot
from util.sample.Sample import Sample

VOCAB = Vocabulary(SIMS, n_think = 6, score_step = 0.1)


def oracle(**kwargs):
  cfg = dict({ 'n_samples' : 200, 'd' : 4, 'profile' : 'sims', 'seed' : 7 }, **kwargs)
  return SentimentOracle(EnvConfig(**cfg), VOCAB)


### Dataset generation.

def test_generation_is_deterministic():
  a = [s.toRecord() for s in generate_dataset(EnvConfig(n_samples = 50, seed = 7))]
  b = [s.toRecord() for s in generate_dataset(EnvConfig(n_samples = 50, seed = 7))]
  c = [s.toRecord() for s in generate_dataset(EnvConfig(n_samples = 50, seed = 8))]
  assert a == b
  assert a != c


def test_hard_counts_are_exact():
  assert not any(s.is_hard for s in generate_dataset(EnvConfig(hard_fraction = 0.0)))
  assert sum(s.is_hard for s in generate_dataset(EnvConfig(n_samples = 1000, hard_fraction = 0.3))) == 300
  assert all(s.is_hard for s in generate_dataset(EnvConfig(n_samples = 20, hard_fraction = 1.0)))


def test_samples_are_consistent():
  samples = oracle().generate_dataset()
  assert len(samples) == 200
  assert len({ s.id for s in samples }) == 200
  for s in samples:
    assert SIMS.contains(s.gold_score)
    assert s.gold_polarity == score_to_polarity(s.gold_score, SIMS)
    assert all(f.shape == (4,) for f in s.features)


def test_hard_samples_flip_the_text_signal():
  o = oracle(n_samples = 400, noise_sigma = 0.0, hard_fraction = 0.5)
  for s in o.generate_dataset():
    if s.gold_score == 0: continue
    text = float(o.directions[0] @ s.text_feat)
    audio = float(o.directions[1] @ s.audio_feat)
    assert np.sign(audio) == np.sign(s.gold_score)
    assert np.sign(text) == (-1 if s.is_hard else 1) * np.sign(s.gold_score)


def test_gold_scores_lie_on_the_annotation_grid():
  o = oracle()
  grid = set(o.annotationGrid().tolist())
  assert { s.gold_score for s in o.generate_dataset() } <= grid
  assert 0.0 in grid

  continuous = oracle(annotation_step = 0).generate_dataset()
  assert len({ s.gold_score for s in continuous }) == len(continuous)


def test_env_config_validation():
  for bad in ({ 'n_samples' : 0 }, { 'hard_fraction' : 1.5 }, { 'seed' : -1 },
              { 'teacher_noise' : -0.1 }, { 'd' : 0 }, { 'noise_sigma' : -1.0 }):
    with pytest.raises(ConfigError):
      EnvConfig(**bad)


def test_sample_dimensions_must_agree():
  with pytest.raises(DimensionError):
    Sample('s0', [0.0, 1.0], [0.0], [1.0, 2.0], 0.5, SIMS)


### The noisy teacher and the filter.

def test_noiseless_teacher_matches_gold():
  o = oracle(teacher_noise = 0.0)
  samples = o.generate_dataset()
  rng = np.random.default_rng(0)
  for s in samples:
    out = parse(o.teacher_generate_cot(s, rng).render(VOCAB), SIMS)
    assert out.polarity == s.gold_polarity
    assert out.score == s.gold_score


def test_teacher_output_always_parses():
  o = oracle(n_samples = 1000, teacher_noise = 0.5)
  candidates = o.generate_candidates(o.generate_dataset(), seed = 3)
  assert all(format_reward(c.render(VOCAB), SIMS) == 1 for c in candidates)


def test_think_span_names_each_modality():
  o = oracle()
  s = o.generate_dataset()[0]
  think = o.thinkTemplate(s)
  assert len(think) == 3
  for m, tok in enumerate(think):
    positive = float(o.directions[m] @ s.features[m]) > 0
    assert tok == "t{}".format(2 * m + int(positive))


def test_filter_relabels_and_drops():
  o = oracle(teacher_noise = 0.6)
  samples = o.generate_dataset()
  candidates = o.generate_candidates(samples, seed = 1)
  kept = filter_and_relabel(candidates, samples, VOCAB, SIMS)
  by_id = { s.id : s for s in samples }

  assert 0 < len(kept) < len(candidates)
  for rec in kept:
    out = parse(rec.render(VOCAB), SIMS)
    gold = by_id[rec.sample_id]
    assert out.polarity == gold.gold_polarity
    assert out.score == VOCAB.snap(gold.gold_score)

  # Everything dropped had the wrong polarity.
  dropped = { c.sample_id for c in candidates } - { r.sample_id for r in kept }
  for c in candidates:
    if c.sample_id in dropped:
      assert parse(c.render(VOCAB), SIMS).polarity != by_id[c.sample_id].gold_polarity


def test_filter_keeps_the_reasoning_span():
  o = oracle(teacher_noise = 0.3)
  samples = o.generate_dataset()
  candidates = { c.sample_id : c for c in o.generate_candidates(samples, seed = 2) }
  for rec in filter_and_relabel(list(candidates.values()), samples, VOCAB, SIMS):
    before = parse(candidates[rec.sample_id].render(VOCAB), SIMS)
    assert parse(rec.render(VOCAB), SIMS).think == before.think


def test_filter_of_nothing_is_nothing():
  assert filter_and_relabel([], oracle().generate_dataset(), VOCAB, SIMS) == []


def test_retention_falls_with_teacher_noise():
  for seed in (0, 1, 2):
    samples = oracle(seed = seed).generate_dataset()
    retained = []
    for noise in (0.0, 0.1, 0.3, 0.6, 1.0):
      o = oracle(seed = seed, teacher_noise = noise)
      kept = filter_and_relabel(o.generate_candidates(samples, seed), samples, VOCAB, SIMS)
      retained.append(len(kept))
    assert retained[0] == len(samples)
    assert all(a >= b for a, b in zip(retained, retained[1:]))


### Record files.

def test_record_files_round_trip(tmp_path):
  o = oracle(n_samples = 30)
  samples = o.generate_dataset()
  cot = filter_and_relabel(o.generate_candidates(samples, 0), samples, VOCAB, SIMS)

  write_samples(tmp_path / 'train.jsonl', samples)
  write_cot(tmp_path / 'cot.jsonl', cot, VOCAB)

  assert [s.toRecord() for s in read_samples(tmp_path / 'train.jsonl', SIMS)] == [s.toRecord() for s in samples]
  assert read_cot(tmp_path / 'cot.jsonl', VOCAB, SIMS) == cot

  # Writing the same records again gives the same bytes.
  write_samples(tmp_path / 'again.jsonl', samples)
  assert (tmp_path / 'again.jsonl').read_bytes() == (tmp_path / 'train.jsonl').read_bytes()


def test_empty_sample_file_is_an_error(tmp_path):
  (tmp_path / 'train.jsonl').write_text('')
  with pytest.raises(EmptyError):
    read_samples(tmp_path / 'train.jsonl', SIMS)
