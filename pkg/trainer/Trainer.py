import pandas as pd

from copy import deepcopy
from util.util import print

class Trainer:

  def __init__ (self, id, name, policy):

    self.id = id
    self.name = name

    # The policy this trainer updates in place.
    self.policy = policy

    # Pipeline is supplied via pipelineInitializing method of pipeline lifecycle.
    self.pipeline = None

    # Number of calls to step() the pipeline should make.  Set by subclasses.
    self.total_steps = 0

    # Trainers keep a log as a list of dictionaries, one per step, with a fixed
    # set of columns per trainer type.  A non-empty log is handed to the pipeline
    # as a DataFrame at pipeline termination.
    self.log = []

    # Most recent log as a DataFrame, kept after termination for callers that
    # train without writing files.
    self.dfLog = None

    # Log file name (without extension).  None lets the pipeline name the file
    # after the trainer.
    self.log_filename = None


  ### Flow of required pipeline listening methods:
  ### init -> start -> (every step) -> stop -> terminate

  def pipelineInitializing (self, pipeline):
    # Called by the pipeline one time when the stage begins.  The pipeline
    # reference must be retained, as this is the only time the trainer can
    # "see" it.

    self.pipeline = pipeline

    print ("{} exists!".format(self.name))


  def pipelineStarting (self):
    # Called by the pipeline one time _after_ pipelineInitializing.

    print ("Trainer {} ({}) starting: {} steps on {}".format(
           self.id, self.name, self.total_steps, self.policy))


  def step (self, currentStep):
    # One unit of training.  Subclasses must implement this.
    raise NotImplementedError("{} does not implement step()".format(type(self).__name__))


  def pipelineStopping (self):
    # Called by the pipeline one time _before_ pipelineTerminating.

    pass


  def pipelineTerminating (self):
    # Called by the pipeline one time when the stage terminates.

    # If this trainer has been maintaining a log, convert it to a DataFrame
    # and request that the pipeline write it before terminating.
    if self.log:
      self.dfLog = pd.DataFrame(self.log)
      self.writeLog(self.dfLog, self.log_filename)


  ### Methods for internal use by trainers (e.g. bookkeeping).

  def logEvent (self, event):
    # Adds one row to this trainer's log.  The deepcopy ensures later changes to
    # the logged values will not retroactively update the row.
    self.log.append(deepcopy(event))


  ### Methods used to request services from the pipeline.

  def writeLog (self, dfLog, filename=None):
    self.pipeline.writeLog(self.id, dfLog, filename)
