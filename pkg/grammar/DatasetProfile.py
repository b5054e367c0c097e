# A DatasetProfile describes the score annotations of one dataset family: the bounds
# of the score scale, the class bins used by the multi-class accuracy metrics and the
# half-width of the band around zero that counts as neutral.

from util.errors import ProfileError


class DatasetProfile:

  def __init__(self, name, r_min, r_max, class_edges_acc7 = (), class_edges_acc5 = (),
               neutral_band = 0.0):

    self.name = name
    self.r_min = float(r_min)
    self.r_max = float(r_max)
    self.class_edges_acc7 = tuple(float(e) for e in class_edges_acc7)
    self.class_edges_acc5 = tuple(float(e) for e in class_edges_acc5)
    self.neutral_band = float(neutral_band)

    if not self.r_min < self.r_max:
      raise ProfileError("Profile bounds must satisfy r_min < r_max.",
                         "r_min:", self.r_min, "r_max:", self.r_max)

    for edges in (self.class_edges_acc7, self.class_edges_acc5):
      if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ProfileError("Class edges must be strictly increasing.", "edges:", edges)

    if self.neutral_band < 0:
      raise ProfileError("Neutral band must be non-negative.", "neutral_band:", self.neutral_band)


  @property
  def span(self):
    return self.r_max - self.r_min


  def contains(self, score):
    return self.r_min <= score <= self.r_max


  # Which K-class accuracies this family reports.  Three- and two-class accuracy
  # derive from polarity and are always available.
  def supportedClasses(self):
    k = []
    if self.class_edges_acc7: k.append(7)
    if self.class_edges_acc5: k.append(5)
    return k + [3, 2]


  def toDict(self):
    return { 'name' : self.name, 'r_min' : self.r_min, 'r_max' : self.r_max,
             'class_edges_acc7' : list(self.class_edges_acc7),
             'class_edges_acc5' : list(self.class_edges_acc5),
             'neutral_band' : self.neutral_band }


  def __eq__(self, other):
    return isinstance(other, DatasetProfile) and self.toDict() == other.toDict()


  def __repr__(self):
    return "DatasetProfile({}, [{}, {}])".format(self.name, self.r_min, self.r_max)


# The MOSI family scores from strongly negative (-3) to strongly positive (+3) and is
# read at seven integer classes.  The SIMS family scores from -1 to +1 and is read at
# five classes; its three-class reading treats |s| <= 0.1 as neutral.
MOSI = DatasetProfile('mosi', -3.0, 3.0, class_edges_acc7 = (-2.5, -1.5, -0.5, 0.5, 1.5, 2.5))
SIMS = DatasetProfile('sims', -1.0, 1.0, class_edges_acc5 = (-0.7, -0.1, 0.1, 0.7),
                      neutral_band = 0.1)

PROFILES = {
  'mosi' : MOSI,
  'mosei' : DatasetProfile('mosei', -3.0, 3.0, class_edges_acc7 = MOSI.class_edges_acc7),
  'sims' : SIMS,
  'simsv2' : DatasetProfile('simsv2', -1.0, 1.0, class_edges_acc5 = SIMS.class_edges_acc5,
                            neutral_band = 0.1),
}


def getProfile (name):
  if name not in PROFILES:
    raise ProfileError("Unknown dataset profile.", "name:", name,
                       "known:", sorted(PROFILES))
  return PROFILES[name]
