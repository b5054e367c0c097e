# Line-delimited record files.  Each line is one JSON object.  Floats are written with
# their exact shortest representation, so a file written twice from the same data is
# byte-identical and reading it back gives the same numbers.

import json
import os

from util.errors import EmptyError
from util.sample.CoTRecord import CoTRecord
from util.sample.Sample import Sample


def write_records (path, records):
  with open(path, 'w', encoding='utf-8', newline='\n') as f:
    for rec in records:
      f.write(json.dumps(rec, sort_keys=True))
      f.write('\n')


def read_records (path):
  with open(path, 'r', encoding='utf-8') as f:
    return [json.loads(line) for line in f if line.strip()]


def write_samples (path, samples):
  write_records(path, [s.toRecord() for s in samples])


def read_samples (path, profile):
  samples = [Sample.fromRecord(r, profile) for r in read_records(path)]
  if not samples:
    raise EmptyError("Sample file holds no records.", "path:", os.fspath(path))
  return samples


def write_cot (path, records, vocab):
  write_records(path, [r.toRecord(vocab) for r in records])


def read_cot (path, vocab, profile):
  return [CoTRecord.fromRecord(r, vocab, profile) for r in read_records(path)]
