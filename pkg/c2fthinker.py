import argparse
import os
import sys

import pandas as pd

from Pipeline import Pipeline, run_id
from policy.Policy import Policy
from policy.checkpoint import save_policy, load_policy, PARAMS
from trainer.GrpoTrainer import grpo_train
from trainer.SftTrainer import sft_train, pair_records
from util import util
from util.ExperimentConfig import ExperimentConfig, ARMS, SPLITS
from util.MetricsReport import append_report_csv, METRICS
from util.errors import C2FError, ConfigError, DimensionError
from util.metrics import evaluate
from util.oracle.SentimentOracle import SentimentOracle, filter_and_relabel
from util.plot import plot_reward_curves, WINDOW
from util.records import write_samples, read_samples, write_cot, read_cot
from util.util import print, sha256_file

SYSTEM_NAME = "C2F-Thinker: Coarse-to-Fine Sentiment Reasoning Engine"

# The only environment override: a root for relative output directories.
OUTPUT_ROOT_ENV = 'C2F_OUTPUT_ROOT'


def output_path (path):
  root = os.environ.get(OUTPUT_ROOT_ENV)
  if root and not os.path.isabs(path):
    return os.path.join(root, path)
  return path


def data_file (data_dir, name):
  path = os.path.join(data_dir, name)
  if not os.path.isfile(path):
    raise C2FError("Data file not found.", "path:", path)
  return path


def digests (paths):
  return { os.path.basename(p) : sha256_file(p) for p in paths }


def checkpoint_digest (checkpoint):
  return sha256_file(os.path.join(checkpoint, PARAMS))


### Commands.  Each one reads and checks all of its inputs before it creates
### its output directory.

def cmd_gen_data (exp, out):
  vocab = exp.vocabulary()
  splits = { split : SentimentOracle(exp.envConfig(split)).generate_dataset() for split in SPLITS }

  oracle = SentimentOracle(exp.envConfig('train'), vocab)
  candidates = oracle.generate_candidates(splits['train'], exp.seed)
  cot = filter_and_relabel(candidates, splits['train'], vocab, exp.profile)

  pipeline = Pipeline('gen-data', out)
  for split, samples in splits.items():
    path = pipeline.path('{}.jsonl'.format(split))
    write_samples(path, samples)
    pipeline.addArtifact(path)

  path = pipeline.path('cot_candidates.jsonl')
  write_cot(path, candidates, vocab)
  pipeline.addArtifact(path)

  path = pipeline.path('cot.jsonl')
  write_cot(path, cot, vocab)
  pipeline.addArtifact(path)

  pipeline.writeManifest({ 'name' : 'gen-data' }, exp.toDict(), exp.seeds())

  print ("Generated {} train, {} test, {} shifted samples; {} of {} CoT candidates kept".format(
         len(splits['train']), len(splits['test']), len(splits['shift']), len(cot), len(candidates)),
         override=True)
  return 0


def cmd_sft (exp, data, out):
  vocab = exp.vocabulary()
  train_path, cot_path = data_file(data, 'train.jsonl'), data_file(data, 'cot.jsonl')

  samples = read_samples(train_path, exp.profile)
  pairs = pair_records(samples, read_cot(cot_path, vocab, exp.profile))
  policy = Policy(vocab, samples[0].d, exp.policyConfig())

  pipeline = Pipeline('sft', out)
  trained, curve = sft_train(policy, pairs, exp.sftConfig(), pipeline)

  for path in save_policy(trained, pipeline.path('checkpoint')):
    pipeline.addArtifact(path)

  pipeline.writeManifest({ 'name' : 'sft', 'data' : data }, exp.toDict(), exp.seeds(),
                         provenance = { 'data' : digests([train_path, cot_path]) })

  print ("SFT finished: loss {:.6f} -> {:.6f} over {} epochs".format(curve[0], curve[-1], len(curve)),
         override=True)
  return 0


def cmd_grpo (exp, checkpoint, data, arm, out):
  cfg = exp.grpoConfig(arm)
  train_path = data_file(data, 'train.jsonl')
  samples = read_samples(train_path, exp.profile)
  policy = load_policy(checkpoint, exp.vocabulary(), exp.policyConfig().free_decoding)

  if samples[0].d != policy.d:
    raise DimensionError("Data and checkpoint disagree on feature dimension.",
                         "data:", samples[0].d, "checkpoint:", policy.d)

  pipeline = Pipeline('grpo-{}'.format(arm), out)
  trained, curve, stats = grpo_train(policy, samples, cfg, pipeline,
                                     name = 'GrpoTrainer-{}'.format(arm))

  for path in save_policy(trained, pipeline.path('checkpoint')):
    pipeline.addArtifact(path)

  pipeline.writeManifest({ 'name' : 'grpo', 'arm' : arm, 'checkpoint' : checkpoint, 'data' : data },
                         exp.toDict(), exp.seeds(),
                         provenance = { 'checkpoint' : checkpoint_digest(checkpoint),
                                        'data' : digests([train_path]) })

  print ("GRPO ({}) finished: mean reward {:.4f} -> {:.4f}, hard {:.3f}, hinted {:.3f}".format(
         arm, curve[0], curve[-1], stats['hard_fraction'], stats['hinted_fraction']), override=True)
  return 0


def cmd_eval (exp, checkpoint, data, split, out):
  split_path = data_file(data, '{}.jsonl'.format(split))
  samples = read_samples(split_path, exp.profile)
  policy = load_policy(checkpoint, exp.vocabulary(), exp.policyConfig().free_decoding)

  report = evaluate(policy, samples, exp.profile, n_jobs = exp.n_jobs)
  provenance = { 'checkpoint' : checkpoint_digest(checkpoint), 'data' : digests([split_path]) }
  rid = run_id({ 'name' : 'eval', 'split' : split }, { 'config' : exp.toDict(),
                 'checkpoint' : provenance['checkpoint'], 'data' : sha256_file(split_path) })

  print ("run_id: {}\nsplit: {}\n{}".format(rid, split, report.toText()), override=True)

  # Reports go to the evaluation's own run directory, never the checkpoint's.
  pipeline = Pipeline('eval', out)
  path = pipeline.path('reports.csv')
  append_report_csv(path, report, rid, split)
  pipeline.addArtifact(path)
  pipeline.writeManifest({ 'name' : 'eval', 'split' : split, 'checkpoint' : checkpoint, 'data' : data },
                         exp.toDict(), exp.seeds(), provenance = provenance)

  return report


def parse_curves (specs):
  # Curves are given as NAME=PATH, or PATH alone (named after its directory).
  curves = {}
  for spec in specs:
    if '=' in spec:
      arm, path = spec.split('=', 1)
    else:
      arm, path = os.path.basename(os.path.dirname(os.path.abspath(spec))), spec
    if arm in curves:
      raise ConfigError("Two reward curves share one name.", "name:", arm)
    curves[arm] = path
  return curves


def cmd_plot (specs, out, window = WINDOW):
  plot_reward_curves(parse_curves(specs), out, window)
  print ("Wrote {}".format(out), override=True)
  return 0


def cmd_pipeline (exp, out):
  # The whole experiment: data, zero-shot (fresh policy) baseline, SFT, the three
  # GRPO arms, evaluation of every stage on the test and shifted splits, a summary
  # table and the reward curves.
  data = os.path.join(out, 'data')
  cmd_gen_data(exp, data)

  sft_dir = os.path.join(out, 'sft')
  cmd_sft(exp, data, sft_dir)
  sft_ckpt = os.path.join(sft_dir, 'checkpoint')

  stages = [ ('sft', sft_ckpt) ]
  for arm in ARMS:
    arm_dir = os.path.join(out, 'grpo_{}'.format(arm))
    cmd_grpo(exp, sft_ckpt, data, arm, arm_dir)
    stages.append(('grpo_{}'.format(arm), os.path.join(arm_dir, 'checkpoint')))

  pipeline = Pipeline('pipeline', out)

  # A fresh policy with the configured seed is the zero-shot baseline.
  zero_dir = os.path.join(out, 'zero_shot')
  samples = read_samples(data_file(data, 'train.jsonl'), exp.profile)
  for path in save_policy(Policy(exp.vocabulary(), samples[0].d, exp.policyConfig()),
                          os.path.join(zero_dir, 'checkpoint')):
    pipeline.addArtifact(path)
  stages.insert(0, ('zero_shot', os.path.join(zero_dir, 'checkpoint')))

  rows = []
  for stage, ckpt in stages:
    for split in ('test', 'shift'):
      report = cmd_eval(exp, ckpt, data, split, os.path.join(out, 'eval', stage, split))
      rows.append(dict({ 'stage' : stage, 'split' : split }, **report.toDict()))

  summary = pd.DataFrame(rows, columns = ['stage', 'split'] + list(METRICS)
                                         + ['n_evaluated', 'n_format_failures'])
  path = pipeline.path('summary.csv')
  summary.to_csv(path, index=False, lineterminator='\n')
  pipeline.addArtifact(path)

  path = pipeline.path('reward_curves.svg')
  plot_reward_curves({ arm : os.path.join(out, 'grpo_{}'.format(arm), 'rewards.csv') for arm in ARMS },
                     path)
  pipeline.addArtifact(path)

  pipeline.writeManifest({ 'name' : 'pipeline' }, exp.toDict(), exp.seeds())

  print ("\n" + summary.to_string(index=False, float_format=lambda v: "{:.4f}".format(v)), override=True)
  return 0


def build_parser ():
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument('-c', '--config', default='default',
                      help='Config module name under config/, or path to a .py config file')
  common.add_argument('-s', '--seed', type=int, default=None,
                      help='Root seed (overrides the config seed)')
  common.add_argument('--free-decoding', action='store_true',
                      help='Disable grammar-constrained decoding')
  common.add_argument('-v', '--verbose', action='store_true',
                      help='Maximum verbosity!')

  parser = argparse.ArgumentParser(description=SYSTEM_NAME)
  sub = parser.add_subparsers(dest='command', required=True)

  p = sub.add_parser('gen-data', parents=[common], help='Generate dataset splits and cold-start data')
  p.add_argument('-o', '--out', required=True, help='Output directory')

  p = sub.add_parser('sft', parents=[common], help='Stage one: supervised cold start')
  p.add_argument('-d', '--data', required=True, help='Directory written by gen-data')
  p.add_argument('-o', '--out', required=True, help='Output directory')

  p = sub.add_parser('grpo', parents=[common], help='Stage two: GRPO from an SFT checkpoint')
  p.add_argument('-k', '--checkpoint', required=True, help='SFT checkpoint directory')
  p.add_argument('-d', '--data', required=True, help='Directory written by gen-data')
  p.add_argument('-a', '--arm', default='full', help='GRPO arm: {}'.format(', '.join(ARMS)))
  p.add_argument('-o', '--out', required=True, help='Output directory')

  p = sub.add_parser('eval', parents=[common], help='Evaluate a checkpoint on a data split')
  p.add_argument('-k', '--checkpoint', required=True, help='Checkpoint directory')
  p.add_argument('-d', '--data', required=True, help='Directory written by gen-data')
  p.add_argument('--split', default='test', choices=SPLITS, help='Data split to evaluate')
  p.add_argument('-o', '--out', required=True, help='Output directory for reports.csv')

  p = sub.add_parser('plot', help='Overlay reward curves in one SVG')
  p.add_argument('curves', nargs='+', help='rewards.csv files, as PATH or NAME=PATH')
  p.add_argument('-o', '--out', required=True, help='Output SVG file')
  p.add_argument('-w', '--window', type=int, default=WINDOW, help='Moving-average window')
  p.add_argument('-v', '--verbose', action='store_true', help='Maximum verbosity!')

  p = sub.add_parser('pipeline', parents=[common], help='Run the complete experiment')
  p.add_argument('-o', '--out', required=True, help='Output directory')

  return parser


def main (argv = None):
  args = build_parser().parse_args(argv)

  # Config parameter that causes util.util.print to suppress most output.
  util.silent_mode = not args.verbose

  # Print system banner.
  print ("=" * len(SYSTEM_NAME))
  print (SYSTEM_NAME)
  print ("=" * len(SYSTEM_NAME))
  print ()

  try:
    if args.command == 'plot':
      return cmd_plot(args.curves, output_path(args.out), args.window)

    exp = ExperimentConfig.load(args.config, args.seed, args.free_decoding)
    print ("Configuration: {}, seed: {}, profile: {}".format(args.config, exp.seed, exp.profile.name))

    if args.command == 'gen-data':
      return cmd_gen_data(exp, output_path(args.out))
    if args.command == 'sft':
      return cmd_sft(exp, args.data, output_path(args.out))
    if args.command == 'grpo':
      return cmd_grpo(exp, args.checkpoint, args.data, args.arm, output_path(args.out))
    if args.command == 'eval':
      cmd_eval(exp, args.checkpoint, args.data, args.split, output_path(args.out))
      return 0
    if args.command == 'pipeline':
      return cmd_pipeline(exp, output_path(args.out))

  except (C2FError, OSError) as e:
    print ("error: {}".format(e), file=sys.stderr, override=True)
    return 1


if __name__ == '__main__':
  sys.exit(main())
