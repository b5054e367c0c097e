import hashlib, json, os

import numpy as np
import pandas as pd

from util.util import print, sha256_file

# Version of the run manifest layout.
MANIFEST_VERSION = 1


def run_id (command, config):
  # Deterministic id of a run: the same command with the same resolved config
  # always gets the same id.
  blob = json.dumps({ 'command' : command, 'config' : config }, sort_keys=True)
  return hashlib.sha256(blob.encode('utf-8')).hexdigest()[:16]


class Pipeline:

  def __init__(self, pipeline_name, out_dir = None):
    # pipeline_name is for human readers only.
    self.name = pipeline_name

    # Directory receiving logs and artifacts.  None keeps logs in memory only,
    # which is how library callers and tests train.
    self.out_dir = out_dir

    # Every file this pipeline wrote, in order, for the run manifest.
    self.artifacts = []

    # Logs by file name, also kept when nothing is written to disk.
    self.logs = {}

    self.trainers = []

    print ("Pipeline initialized: {}".format(self.name))


  def runner(self, trainer):
    # Runs one training stage: the trainer's lifecycle around total_steps calls
    # to trainer.step().  Returns the trainer.

    self.trainers.append(trainer)

    print ("\n--- Trainer.pipelineInitializing() ---")
    trainer.pipelineInitializing(self)

    print ("\n--- Trainer.pipelineStarting() ---")
    trainer.pipelineStarting()

    # Track starting wall clock time and total step count for stats at the end.
    # Wall clock values are printed, never written to an artifact.
    stageWallClockStart = pd.Timestamp('now')
    ttl_steps = 0

    for step in range(trainer.total_steps):
      # Periodically print the step and wall clock time, even if muted.
      if step % max(1, trainer.total_steps // 10) == 0:
        print ("--- {} step: {} of {}, wallclock elapsed: {} ---".format(
               trainer.name, step, trainer.total_steps, pd.Timestamp('now') - stageWallClockStart),
               override=True)

      trainer.step(step)
      ttl_steps += 1

    stageWallClockElapsed = pd.Timestamp('now') - stageWallClockStart

    print ("\n--- Trainer.pipelineStopping() ---")
    trainer.pipelineStopping()

    print ("\n--- Trainer.pipelineTerminating() ---")
    trainer.pipelineTerminating()

    seconds = stageWallClockElapsed / np.timedelta64(1, 's')
    print ("{} elapsed: {}, steps: {}, steps per second: {:0.2f}".format(
           trainer.name, stageWallClockElapsed, ttl_steps,
           ttl_steps / seconds if seconds > 0 else float('inf')),
           override=True)

    return trainer


  def path(self, filename):
    if self.out_dir is None: return None
    os.makedirs(self.out_dir, exist_ok=True)
    return os.path.join(self.out_dir, filename)


  def addArtifact(self, path):
    if path is not None and path not in self.artifacts:
      self.artifacts.append(path)


  def writeLog (self, sender, dfLog, filename=None):
    # Called by any trainer at the end of its stage to archive the log DataFrame
    # it has been accumulating.  If filename is None, the file is named after the
    # trainer requesting log archival.

    if filename:
      file = "{}.csv".format(filename)
    else:
      name = next((t.name for t in self.trainers if t.id == sender), str(sender))
      file = "{}.csv".format(name.replace(" ",""))

    self.logs[file] = dfLog

    path = self.path(file)
    if path is not None:
      dfLog.to_csv(path, index=False, lineterminator='\n')
      self.addArtifact(path)


  def writeManifest(self, command, config, seeds, provenance = None):
    # The run manifest: what was run, with which resolved configuration and
    # seeds, and a digest of every artifact so reruns can be compared.
    path = self.path('manifest.json')
    if path is None: return None

    manifest = { 'version' : MANIFEST_VERSION,
                 'run_id' : run_id(command, config),
                 'command' : command,
                 'config' : config,
                 'seeds' : seeds,
                 'artifacts' : [ { 'path' : os.path.relpath(a, self.out_dir),
                                   'sha256' : sha256_file(a) } for a in self.artifacts ],
                 'provenance' : provenance or {} }

    with open(path, 'w', encoding='utf-8', newline='\n') as f:
      json.dump(manifest, f, sort_keys=True, indent=2)
      f.write('\n')

    return manifest
