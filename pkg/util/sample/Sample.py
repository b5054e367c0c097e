# A Sample is one synthetic multimodal observation: a feature vector per modality plus
# the gold sentiment score and the polarity derived from it.  This should not be
# confused with a CoTRecord, which is a target answer for a Sample.

import numpy as np

from grammar.codec import score_to_polarity
from util.errors import DimensionError

MODALITIES = ('text', 'audio', 'vision')


class Sample:

  def __init__(self, id, text_feat, audio_feat, vision_feat, gold_score, profile, is_hard = False):
    self.id = id
    self.text_feat = np.asarray(text_feat, dtype=np.float64)
    self.audio_feat = np.asarray(audio_feat, dtype=np.float64)
    self.vision_feat = np.asarray(vision_feat, dtype=np.float64)
    self.gold_score = float(gold_score)
    self.gold_polarity = score_to_polarity(self.gold_score, profile)
    self.is_hard = bool(is_hard)

    dims = [f.shape for f in self.features]
    if any(len(s) != 1 for s in dims) or len(set(dims)) != 1:
      raise DimensionError("All modality features must be vectors of one dimension.",
                           "sample:", id, "shapes:", dims)


  @property
  def features(self):
    return (self.text_feat, self.audio_feat, self.vision_feat)


  @property
  def d(self):
    return self.text_feat.shape[0]


  def toRecord(self):
    return { 'id' : self.id, 'text_feat' : self.text_feat.tolist(),
             'audio_feat' : self.audio_feat.tolist(), 'vision_feat' : self.vision_feat.tolist(),
             'gold_score' : self.gold_score, 'is_hard' : self.is_hard }


  @classmethod
  def fromRecord(cls, rec, profile):
    return cls(rec['id'], rec['text_feat'], rec['audio_feat'], rec['vision_feat'],
               rec['gold_score'], profile, is_hard = rec['is_hard'])


  def __str__(self):
    return "({} gold {:+.2f} {}{})".format(self.id, self.gold_score, self.gold_polarity,
                                           " hard" if self.is_hard else "")

  def __repr__(self):
    return self.__str__()
