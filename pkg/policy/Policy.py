### The Policy is a small autoregressive network over the structured output language.
###
### Encoder: each modality vector is projected d -> h through tanh, the three
### projections are summed and fused h -> h through tanh into the context c.
###
### Decoder: an Elman recurrence of width h whose state starts at c.  At step t it
### reads the previous token x_t (<bos> first) and the context again:
###
###   s_t = tanh(rec_W s_{t-1} + emb[x_t] + ctx_W c + rec_b)
###   z_t = out_W s_t + out_b
###
### The next-token distribution is the softmax of z_t restricted to the tokens the
### OutputGrammar allows after the prefix (illegal tokens get probability exactly 0).
### Gradients are exact, computed by hand with backpropagation through time, in double
### precision, so they can be checked against finite differences.

from collections import OrderedDict

import numpy as np
from scipy.special import logsumexp

from grammar.OutputGrammar import OutputGrammar
from policy.PolicyConfig import PolicyConfig
from policy.Rollout import Rollout
from util.errors import DimensionError, VocabError, GrammarError, LengthError, NumericalError
from util.sample.Sample import MODALITIES


def masked_log_softmax (Z, M):
  # Row-wise log-softmax of Z over the True entries of M; -inf elsewhere.
  Zm = np.where(M, Z, -np.inf)
  return Zm - logsumexp(Zm, axis=-1, keepdims=True)


class Policy:

  def __init__(self, vocab, d, cfg = None, params = None):
    self.vocab = vocab
    self.d = int(d)
    self.cfg = cfg if cfg is not None else PolicyConfig()
    self.h = self.cfg.h

    self.grammar = OutputGrammar(vocab, self.cfg.max_think, self.cfg.free_decoding)
    self.max_len = self.cfg.max_len if self.cfg.max_len else self.grammar.max_length

    if params is None:
      params = self.initParams(self.cfg.seed)

    self.params = OrderedDict()
    for name, shape in self.shapes().items():
      if name not in params or np.shape(params[name]) != shape:
        raise DimensionError("Parameter missing or misshapen.", "name:", name,
                             "expected:", shape, "got:", np.shape(params.get(name)))
      self.params[name] = np.array(params[name], dtype=np.float64)


  def shapes(self):
    d, h, V, M = self.d, self.h, len(self.vocab), len(MODALITIES)
    return OrderedDict([ ('enc_W', (M, h, d)), ('enc_b', (M, h)),
                         ('fuse_W', (h, h)), ('fuse_b', (h,)),
                         ('emb', (V, h)), ('rec_W', (h, h)), ('ctx_W', (h, h)), ('rec_b', (h,)),
                         ('out_W', (V, h)), ('out_b', (V,)) ])


  def initParams(self, seed):
    rng = np.random.default_rng(seed)
    s = self.cfg.init_scale
    d, h = self.d, self.h

    fan_in = { 'enc_W' : d, 'fuse_W' : h, 'rec_W' : h, 'ctx_W' : h, 'emb' : 1 }

    params = {}
    for name, shape in self.shapes().items():
      if name in fan_in:
        params[name] = rng.normal(scale=1.0 / np.sqrt(fan_in[name]), size=shape)
      else:
        # Biases and the output head start small: a fresh policy is close to uniform.
        params[name] = rng.normal(scale=s, size=shape)

    return params


  def num_params(self):
    return int(sum(p.size for p in self.params.values()))


  def copy(self):
    return Policy(self.vocab, self.d, self.cfg, { k : v.copy() for k, v in self.params.items() })


  def zerosLike(self):
    return OrderedDict((k, np.zeros_like(v)) for k, v in self.params.items())


  def flat(self):
    return np.concatenate([p.ravel() for p in self.params.values()])


  def setFlat(self, vector):
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (self.num_params(),):
      raise DimensionError("Flat parameter vector has wrong length.",
                           "expected:", self.num_params(), "got:", vector.shape)
    i = 0
    for name, p in self.params.items():
      self.params[name] = vector[i:i + p.size].reshape(p.shape).copy()
      i += p.size


  def apply_gradient(self, grads, lr):
    # Plain gradient descent on a loss.  Callers hold the only reference to the
    # parameters while this runs.
    for name in self.params:
      self.params[name] = self.params[name] - lr * grads[name]

    if not all(np.all(np.isfinite(p)) for p in self.params.values()):
      raise NumericalError("Parameters are no longer finite after an update.", "lr:", lr)


  ### Encoder.

  def _encode(self, sample):
    feats = sample.features
    if any(f.shape != (self.d,) for f in feats):
      raise DimensionError("Feature dimension does not match the policy.",
                           "sample:", sample.id, "expected:", self.d,
                           "got:", [f.shape for f in feats])

    P = self.params
    X = np.stack(feats)
    U = np.tanh(np.einsum('mhd,md->mh', P['enc_W'], X) + P['enc_b'])
    g = U.sum(axis=0)
    c = np.tanh(P['fuse_W'] @ g + P['fuse_b'])

    return c, { 'X' : X, 'U' : U, 'g' : g, 'c' : c }


  def encode(self, sample):
    return self._encode(sample)[0]


  ### Decoder.

  def _step(self, prev, token, base):
    P = self.params
    s = np.tanh(P['rec_W'] @ prev + P['emb'][token] + base)
    return s, P['out_W'] @ s + P['out_b']


  def _decode(self, c, inputs):
    P = self.params
    base = P['ctx_W'] @ c + P['rec_b']
    S = np.empty((len(inputs), self.h))
    prev = c
    for t, x in enumerate(inputs):
      prev = np.tanh(P['rec_W'] @ prev + P['emb'][x] + base)
      S[t] = prev
    Z = S @ P['out_W'].T + P['out_b']
    return S, Z


  def _checkTokens(self, tokens):
    tokens = tuple(int(t) for t in tokens)
    V = len(self.vocab)
    for t in tokens:
      if t < 0 or t >= V:
        raise VocabError("Token id outside the vocabulary.", "token:", t, "vocab size:", V)
    return tokens


  # Teacher-forced pass over a whole sequence, keeping everything backward() needs.
  def forward(self, sample, tokens):
    tokens = self._checkTokens(tokens)
    c, enc = self._encode(sample)
    inputs = (self.vocab.bos,) + tokens[:-1]
    S, Z = self._decode(c, inputs)
    M, _ = self.grammar.masks(tokens)
    logp = masked_log_softmax(Z, M)

    return { 'enc' : enc, 'c' : c, 'inputs' : inputs, 'tokens' : tokens, 'S' : S, 'Z' : Z,
             'M' : M, 'logp' : logp, 'p' : np.exp(logp),
             'token_logp' : logp[np.arange(len(tokens)), tokens] }


  # Gradient of an objective with respect to every parameter, given the gradient of
  # that objective with respect to the logits of a forward() pass.
  def backward(self, cache, dZ):
    P = self.params
    grads = self.zerosLike()

    S, c, inputs = cache['S'], cache['c'], cache['inputs']
    T = len(inputs)

    grads['out_W'] = dZ.T @ S
    grads['out_b'] = dZ.sum(axis=0)

    dS = dZ @ P['out_W']
    DP = np.empty_like(S)
    dprev = np.zeros(self.h)
    for t in range(T - 1, -1, -1):
      dpre = (dS[t] + dprev) * (1.0 - S[t] ** 2)
      DP[t] = dpre
      dprev = P['rec_W'].T @ dpre

    prevs = np.vstack([c[None, :], S[:-1]])
    grads['rec_W'] = DP.T @ prevs
    np.add.at(grads['emb'], np.asarray(inputs), DP)

    dbase = DP.sum(axis=0)
    grads['ctx_W'] = np.outer(dbase, c)
    grads['rec_b'] = dbase

    # The context feeds the first state and every step through ctx_W.
    dc = dprev + P['ctx_W'].T @ dbase

    enc = cache['enc']
    df = dc * (1.0 - c ** 2)
    grads['fuse_W'] = np.outer(df, enc['g'])
    grads['fuse_b'] = df
    dg = P['fuse_W'].T @ df
    dA = dg[None, :] * (1.0 - enc['U'] ** 2)
    grads['enc_W'] = np.einsum('mh,md->mhd', dA, enc['X'])
    grads['enc_b'] = dA

    return grads


  ### Scoring and sampling.

  def sequence_logprob(self, context, tokens):
    tokens = self._checkTokens(tokens)
    inputs = (self.vocab.bos,) + tokens[:-1]
    _, Z = self._decode(context, inputs)
    M, _ = self.grammar.masks(tokens)
    logp = masked_log_softmax(Z, M)
    return logp[np.arange(len(tokens)), tokens]


  def token_distribution(self, context, prefix = ()):
    return np.exp(self.token_logprobs(context, prefix))


  # Log of token_distribution, -inf on illegal tokens.
  def token_logprobs(self, context, prefix = ()):
    prefix = self._checkTokens(prefix)
    state = self.grammar.stateAfter(prefix)
    _, Z = self._decode(context, (self.vocab.bos,) + prefix)
    return masked_log_softmax(Z[-1], self.grammar.mask(state))


  def grad_logprob(self, sample, tokens, weights):
    return self.value_and_grad(sample, tokens, weights)[1]


  # Value and exact gradient of sum_t w_t * log pi(token_t | prefix_t).
  def value_and_grad(self, sample, tokens, weights):
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (len(tokens),):
      raise DimensionError("Need one weight per token.", "tokens:", len(tokens),
                           "weights:", weights.shape)

    cache = self.forward(sample, tokens)
    onehot = np.zeros_like(cache['p'])
    onehot[np.arange(len(tokens)), cache['tokens']] = 1.0
    dZ = weights[:, None] * (onehot - cache['p'])

    return float(weights @ cache['token_logp']), self.backward(cache, dZ)


  def sample_sequence(self, context, temperature, rng, forced_prefix = ()):
    if not temperature > 0:
      raise ValueError("Sampling temperature must be positive.", "temperature:", temperature)

    def choose(z, mask):
      probs = np.exp(masked_log_softmax(z / temperature, mask))
      return int(rng.choice(len(probs), p=probs))

    return self._generate(context, choose, forced_prefix)


  def greedy_sequence(self, context, forced_prefix = ()):
    def choose(z, mask):
      return int(np.argmax(np.where(mask, z, -np.inf)))

    return self._generate(context, choose, forced_prefix)


  # Evaluation decoding: the greedy sequence for a sample, rendered to text.  A
  # sequence cut off at max_len is still returned (it will fail to parse).
  def greedy_decode(self, sample):
    try:
      rollout = self.greedy_sequence(self.encode(sample))
    except LengthError as e:
      rollout = e.rollout
    return self.vocab.decode(rollout.tokens)


  def _generate(self, context, choose, forced_prefix):
    forced = self._checkTokens(forced_prefix)
    base = self.params['ctx_W'] @ context + self.params['rec_b']

    state = self.grammar.initialState()
    prev, inp = context, self.vocab.bos
    tokens, logps = [], []

    while not self.grammar.isComplete(state) and len(tokens) < self.max_len:
      prev, z = self._step(prev, inp, base)
      mask = self.grammar.mask(state)
      logp = masked_log_softmax(z, mask)

      if len(tokens) < len(forced):
        tok = forced[len(tokens)]
        if not mask[tok]:
          raise GrammarError("Forced prefix is not a valid prefix of the output grammar.",
                             "position:", len(tokens), "token:", self.vocab.tokens[tok])
      else:
        tok = choose(z, mask)

      tokens.append(tok)
      logps.append(logp[tok])
      state = self.grammar.advance(state, tok)
      inp = tok

    if len(tokens) < len(forced):
      raise GrammarError("Forced prefix is longer than the maximum sequence length.",
                         "prefix:", len(forced), "max_len:", self.max_len)

    rollout = Rollout(tokens, logps, forced_prefix_len = len(forced),
                      truncated = not self.grammar.isComplete(state))

    if rollout.truncated:
      raise LengthError("Maximum length reached before a complete structure.",
                        "max_len:", self.max_len, rollout = rollout)

    return rollout


  def __repr__(self):
    return "Policy(d={}, h={}, vocab={}, params={}{})".format(
           self.d, self.h, len(self.vocab), self.num_params(),
           ", free decoding" if self.cfg.free_decoding else "")
