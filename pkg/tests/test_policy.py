import numpy as np
import pytest
from scipy import stats

from conftest import flat_grads
from grammar.codec import parse
from grammar.Polarity import Polarity
from grammar.StructuredOutput import StructuredOutput
from policy.Policy import Policy, masked_log_softmax
from policy.PolicyConfig import PolicyConfig
from reward.rewards import format_reward
from trainer.grpo import hint_prefix
from util.errors import (ConfigError, DimensionError, GrammarError, LengthError, NumericalError,
                         VocabError)


def sample_tokens(policy, sample, seed = 0, prefix = ()):
  return policy.sample_sequence(policy.encode(sample), 1.0, np.random.default_rng(seed), prefix)


def zero_head(policy):
  params = { k : v.copy() for k, v in policy.params.items() }
  params['out_W'][:] = 0.0
  params['out_b'][:] = 0.0
  return Policy(policy.vocab, policy.d, policy.cfg, params)


### Parameters.

def test_parameter_count_is_deterministic(tiny_policy, make_policy):
  assert tiny_policy.num_params() == 254
  assert tiny_policy.num_params() <= 500
  assert np.array_equal(tiny_policy.flat(), make_policy(0).flat())
  assert not np.array_equal(tiny_policy.flat(), make_policy(1).flat())


def test_flat_round_trip(tiny_policy):
  other = tiny_policy.copy()
  other.setFlat(np.zeros(other.num_params()))
  other.setFlat(tiny_policy.flat())
  for k in tiny_policy.params:
    assert np.array_equal(other.params[k], tiny_policy.params[k])

  with pytest.raises(DimensionError):
    other.setFlat(np.zeros(3))


def test_apply_gradient_rejects_non_finite(tiny_policy):
  grads = tiny_policy.zerosLike()
  grads['out_b'][0] = np.inf
  with pytest.raises(NumericalError):
    tiny_policy.apply_gradient(grads, 1.0)


def test_policy_config_validation():
  for bad in ({ 'h' : 0 }, { 'max_think' : -1 }, { 'temperature' : 0.0 }, { 'max_len' : 0 }):
    with pytest.raises(ConfigError):
      PolicyConfig(**bad)


### Encoder.

def test_encode_zero_features_is_the_bias_pathway(tiny_policy, make_sample):
  s = make_sample(0.1)
  for f in s.features: f[:] = 0.0

  P = tiny_policy.params
  expected = np.tanh(P['fuse_W'] @ np.tanh(P['enc_b']).sum(axis=0) + P['fuse_b'])
  assert np.allclose(tiny_policy.encode(s), expected, rtol=0, atol=1e-15)


def test_encode_is_pure_and_discriminates(tiny_policy, make_sample):
  s = make_sample(0.1)
  assert np.array_equal(tiny_policy.encode(s), tiny_policy.encode(s))

  differ = 0
  for i in range(100):
    a, b = make_sample(0.1, seed = 2 * i), make_sample(0.1, seed = 2 * i + 1)
    differ += not np.allclose(tiny_policy.encode(a), tiny_policy.encode(b))
  assert differ == 100


def test_encode_checks_dimensions(tiny_policy, make_sample):
  with pytest.raises(DimensionError):
    tiny_policy.encode(make_sample(0.1, d = 3))


### Scoring.

def test_uniform_head_gives_uniform_logprobs(tiny_policy, tiny_vocab, make_sample):
  policy = zero_head(tiny_policy)
  out = StructuredOutput(Polarity.POSITIVE, ["t1"], 0.2)
  lp = policy.sequence_logprob(policy.encode(make_sample(0.2)), tiny_vocab.encode(out))

  # Only the polarity (3 legal), think (t0, t1 or close) and score (5 legal)
  # slots are real choices.
  expected = np.zeros(len(lp))
  expected[1] = -np.log(3)
  expected[4] = -np.log(3)
  expected[5] = -np.log(3)
  expected[7] = -np.log(5)
  assert np.allclose(lp, expected, rtol=0, atol=1e-12)


def test_recorded_logprobs_match_recomputed(tiny_policy, make_sample):
  for seed in range(20):
    s = make_sample(0.1, seed = seed)
    rollout = sample_tokens(tiny_policy, s, seed)
    lp = tiny_policy.sequence_logprob(tiny_policy.encode(s), rollout.tokens)
    assert np.allclose(lp, rollout.logprobs, rtol=0, atol=1e-12)


def test_logprobs_change_after_an_update(tiny_policy, make_sample):
  s = make_sample(0.1)
  rollout = sample_tokens(tiny_policy, s)
  grads = tiny_policy.grad_logprob(s, rollout.tokens, np.ones(len(rollout)))
  tiny_policy.apply_gradient(grads, -0.1)
  assert tiny_policy.sequence_logprob(tiny_policy.encode(s), rollout.tokens).sum() != rollout.sum_logprob


def test_scoring_rejects_foreign_tokens(tiny_policy, make_sample):
  with pytest.raises(VocabError):
    tiny_policy.sequence_logprob(tiny_policy.encode(make_sample(0.1)), [2, 99])


def test_token_distribution_is_a_simplex_point(tiny_policy, make_sample):
  rng = np.random.default_rng(0)
  for i in range(1000):
    s = make_sample(0.1, seed = i)
    c = tiny_policy.encode(s)
    rollout = sample_tokens(tiny_policy, s, seed = i)
    prefix = rollout.tokens[:rng.integers(len(rollout))]

    p = tiny_policy.token_distribution(c, prefix)
    mask = tiny_policy.grammar.mask(tiny_policy.grammar.stateAfter(prefix))
    assert np.all(p >= 0)
    assert abs(p.sum() - 1.0) <= 1e-12
    assert np.all(p[~mask] == 0.0)


def test_identical_params_give_identical_distributions(tiny_policy, make_sample):
  c = tiny_policy.encode(make_sample(0.1))
  prefix = (tiny_policy.vocab.open['polarity'],)
  assert np.array_equal(tiny_policy.token_distribution(c, prefix),
                        tiny_policy.copy().token_distribution(c, prefix))


def test_masked_log_softmax_zeroes_illegal_tokens():
  Z = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]])
  M = np.array([[True, False, True], [True, True, True]])
  lp = masked_log_softmax(Z, M)
  assert lp[0, 1] == -np.inf
  assert np.allclose(np.exp(lp).sum(axis=1), 1.0)
  assert np.allclose(lp[1], -np.log(3))


### Gradients.

def test_zero_weights_give_zero_gradient(tiny_policy, make_sample):
  s = make_sample(0.1)
  rollout = sample_tokens(tiny_policy, s)
  grads = tiny_policy.grad_logprob(s, rollout.tokens, np.zeros(len(rollout)))
  assert all(np.all(g == 0) for g in grads.values())


def test_weights_must_match_tokens(tiny_policy, make_sample):
  s = make_sample(0.1)
  rollout = sample_tokens(tiny_policy, s)
  with pytest.raises(DimensionError):
    tiny_policy.grad_logprob(s, rollout.tokens, np.ones(len(rollout) + 1))


@pytest.mark.parametrize('seed', range(5))
def test_grad_logprob_matches_finite_differences(seed, make_policy, make_sample, numeric_grad):
  policy = make_policy(seed)
  s = make_sample(-0.1, seed = seed)
  tokens = sample_tokens(policy, s, seed).tokens
  w = np.random.default_rng(seed).normal(size=len(tokens))

  def f(p):
    return float(w @ p.sequence_logprob(p.encode(s), tokens))

  analytic = flat_grads(policy, policy.grad_logprob(s, tokens, w))
  np.testing.assert_allclose(analytic, numeric_grad(policy, f), rtol=1e-3, atol=1e-7)


def test_free_decoding_gradient(make_policy, make_sample, numeric_grad):
  policy = make_policy(3, free_decoding = True)
  s = make_sample(0.2)
  tokens = policy.vocab.encode(StructuredOutput(Polarity.POSITIVE, ["t0"], 0.2))
  w = np.ones(len(tokens))

  def f(p):
    return float(p.sequence_logprob(p.encode(s), tokens).sum())

  analytic = flat_grads(policy, policy.grad_logprob(s, tokens, w))
  np.testing.assert_allclose(analytic, numeric_grad(policy, f), rtol=1e-3, atol=1e-7)


def test_zero_weight_positions_contribute_nothing(tiny_policy, make_sample):
  s = make_sample(0.1)
  tokens = sample_tokens(tiny_policy, s).tokens
  w = np.ones(len(tokens))
  w[:3] = 0.0

  head = np.zeros(len(tokens))
  head[:3] = 1.0

  # Linearity in the weights: dropping the first three positions removes exactly
  # their contribution.
  masked = tiny_policy.grad_logprob(s, tokens, w)
  everything = tiny_policy.grad_logprob(s, tokens, np.ones(len(tokens)))
  first = tiny_policy.grad_logprob(s, tokens, head)
  for k in masked:
    assert np.allclose(masked[k], everything[k] - first[k], rtol=0, atol=1e-12)


### Sampling.

def test_grammar_masked_sampling_always_parses(tiny_policy, make_sample):
  for seed in range(200):
    s = make_sample(0.1, seed = seed)
    rollout = sample_tokens(tiny_policy, s, seed)
    assert format_reward(tiny_policy.vocab.decode(rollout.tokens), tiny_policy.vocab.profile) == 1
    assert rollout.forced_prefix_len == 0
    assert not rollout.truncated


def test_sampling_is_seeded(tiny_policy, make_sample):
  s = make_sample(0.1)
  assert sample_tokens(tiny_policy, s, 4).tokens == sample_tokens(tiny_policy, s, 4).tokens


def test_full_forced_prefix_is_reproduced(tiny_policy, tiny_vocab, make_sample):
  tokens = tiny_vocab.encode(StructuredOutput(Polarity.NEGATIVE, ["t0"], -0.1))
  rollout = sample_tokens(tiny_policy, make_sample(0.1), prefix = tokens)
  assert rollout.tokens == tokens
  assert rollout.forced_prefix_len == len(tokens)
  assert np.all(rollout.sampledMask() == 0)


def test_forced_polarity_block_is_shared(tiny_policy, tiny_vocab, make_sample):
  prefix = hint_prefix(tiny_vocab, Polarity.NEGATIVE)
  s = make_sample(-0.2)
  rollouts = [sample_tokens(tiny_policy, s, seed, prefix) for seed in range(4)]

  for r in rollouts:
    assert r.tokens[:3] == prefix
    assert tiny_vocab.decode(r.tokens).startswith("<polarity>negative</polarity>")
    # Forced tokens still carry the policy's conditional log-probabilities.
    assert np.allclose(r.logprobs, tiny_policy.sequence_logprob(tiny_policy.encode(s), r.tokens),
                       rtol=0, atol=1e-12)
  assert len({ r.tokens[3:] for r in rollouts }) >= 2


def test_illegal_forced_prefix(tiny_policy, tiny_vocab, make_sample):
  with pytest.raises(GrammarError):
    sample_tokens(tiny_policy, make_sample(0.1), prefix = (tiny_vocab.ids['t0'],))


def test_forced_prefix_preserves_the_conditional_law(tiny_policy, tiny_vocab, make_sample):
  # The first free token after a forced prefix follows the policy's own
  # next-token distribution at that prefix.
  prefix = hint_prefix(tiny_vocab, Polarity.POSITIVE) + (tiny_vocab.open['think'],)
  n = 2000
  passed = 0
  for seed in range(5):
    s = make_sample(0.1, seed = seed)
    c = tiny_policy.encode(s)
    p = tiny_policy.token_distribution(c, prefix)
    legal = np.flatnonzero(p > 0)

    rng = np.random.default_rng(seed)
    counts = dict.fromkeys(legal.tolist(), 0)
    for child in rng.spawn(n):
      counts[tiny_policy.sample_sequence(c, 1.0, child, prefix).tokens[len(prefix)]] += 1

    observed = np.array([counts[t] for t in legal])
    passed += stats.chisquare(observed, p[legal] * n).pvalue > 0.01
  assert passed >= 4


def test_free_decoding_length_error(make_policy, make_sample):
  policy = make_policy(0, free_decoding = True)
  params = policy.params
  params['out_b'][:] = 0.0
  params['out_W'][:] = 0.0
  params['out_b'][policy.vocab.ids['t0']] = 50.0

  with pytest.raises(LengthError) as e:
    policy.sample_sequence(policy.encode(make_sample(0.1)), 1.0, np.random.default_rng(0))
  rollout = e.value.rollout
  assert rollout.truncated
  assert len(rollout) == policy.max_len

  # Greedy evaluation still returns the text, which then fails to parse.
  text = policy.greedy_decode(make_sample(0.1))
  assert text == " ".join(["t0"] * policy.max_len)
  assert format_reward(text, policy.vocab.profile) == 0


def test_greedy_decoding_is_deterministic(tiny_policy, make_sample):
  s = make_sample(0.1)
  text = tiny_policy.greedy_decode(s)
  assert text == tiny_policy.greedy_decode(s)
  assert parse(text, tiny_policy.vocab.profile) is not None


def test_sampling_temperature_must_be_positive(tiny_policy, make_sample):
  with pytest.raises(ValueError):
    tiny_policy.sample_sequence(tiny_policy.encode(make_sample(0.1)), 0.0, np.random.default_rng(0))
