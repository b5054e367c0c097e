# The OutputGrammar is the token-level automaton of the structured output language.
# It answers one question for the decoder: which tokens may legally follow a prefix.
#
#   <polarity> P </polarity> <think> t{0..max_think} </think> <score> S </score> <eos>
#
# In free decoding mode every token except <bos> is legal everywhere, so the policy
# can produce malformed sequences (and the format reward can tell them apart).

import numpy as np

from util.errors import GrammarError

# Phases of the automaton.  THINK counts emitted reasoning tokens separately.
(OPEN_POLARITY, POLARITY, CLOSE_POLARITY, OPEN_THINK, THINK,
 OPEN_SCORE, SCORE, CLOSE_SCORE, END, DONE) = range(10)


class OutputGrammar:

  def __init__(self, vocab, max_think = 4, free_decoding = False):
    self.vocab = vocab
    self.max_think = int(max_think)
    self.free_decoding = bool(free_decoding)

    V = len(vocab)

    def only(ids):
      m = np.zeros(V, dtype=bool)
      m[np.atleast_1d(ids)] = True
      return m

    self.phase_masks = {
      OPEN_POLARITY : only(vocab.open['polarity']),
      POLARITY : only(vocab.polarity_ids),
      CLOSE_POLARITY : only(vocab.close['polarity']),
      OPEN_THINK : only(vocab.open['think']),
      OPEN_SCORE : only(vocab.open['score']),
      SCORE : only(vocab.score_ids),
      CLOSE_SCORE : only(vocab.close['score']),
      END : only(vocab.eos),
      DONE : np.zeros(V, dtype=bool),
    }
    self.think_open_mask = only(np.append(vocab.think_ids, vocab.close['think']))
    self.think_full_mask = only(vocab.close['think'])

    self.free_mask = np.ones(V, dtype=bool)
    self.free_mask[vocab.bos] = False


  # Longest complete sequence the grammar admits (including <eos>).
  @property
  def max_length(self):
    return 9 + self.max_think


  def initialState(self):
    return (OPEN_POLARITY, 0)


  def mask(self, state):
    if self.free_decoding:
      return self.free_mask if state[0] != DONE else self.phase_masks[DONE]

    phase, k = state
    if phase == THINK:
      return self.think_open_mask if k < self.max_think else self.think_full_mask
    return self.phase_masks[phase]


  def advance(self, state, token):
    if not self.mask(state)[token]:
      raise GrammarError("Token cannot extend the prefix.", "token:", self.vocab.tokens[token],
                         "state:", state)

    if token == self.vocab.eos: return (DONE, 0)
    if self.free_decoding: return (THINK, 0)

    phase, k = state
    if phase == THINK:
      return (OPEN_SCORE, 0) if token == self.vocab.close['think'] else (THINK, k + 1)
    if phase == OPEN_THINK: return (THINK, 0)
    return (phase + 1, 0)


  def isComplete(self, state):
    return state[0] == DONE


  # Legal-token masks for every next-token position of a token sequence: row t is
  # the mask for token t given tokens[:t].  Raises GrammarError on an illegal token.
  def masks(self, tokens):
    state = self.initialState()
    rows = []
    for tok in tokens:
      rows.append(self.mask(state))
      state = self.advance(state, tok)
    return np.array(rows, dtype=bool).reshape(len(rows), len(self.vocab)), state


  def stateAfter(self, prefix):
    state = self.initialState()
    for tok in prefix:
      state = self.advance(state, tok)
    return state
