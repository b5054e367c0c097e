# A CoTRecord is one element of the cold-start dataset: the full target token
# sequence (tags, polarity, reasoning span, score and <eos>) for the sample it names.

from grammar.codec import parse


class CoTRecord:

  def __init__(self, sample_id, target_tokens):
    self.sample_id = sample_id
    self.target_tokens = tuple(int(t) for t in target_tokens)


  def render(self, vocab):
    return vocab.decode(self.target_tokens)


  def toRecord(self, vocab):
    return { 'sample_id' : self.sample_id, 'rendered_text' : self.render(vocab) }


  # Records on disk are rendered text; they must parse under the active profile.
  @classmethod
  def fromRecord(cls, rec, vocab, profile):
    return cls(rec['sample_id'], vocab.encode(parse(rec['rendered_text'], profile)))


  def __eq__(self, other):
    return (isinstance(other, CoTRecord) and self.sample_id == other.sample_id
            and self.target_tokens == other.target_tokens)


  def __repr__(self):
    return "CoTRecord({}, {} tokens)".format(self.sample_id, len(self.target_tokens))
