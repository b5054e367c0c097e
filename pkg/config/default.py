# Default experiment: a SIMS-like score range, 2000 training and 500 test samples,
# 30% modality-conflict (hard) samples.
#
# Learning rates are far above the usual fine-tuning rates of large models: the
# policy here is a small recurrent network trained with plain SGD, and the cosine
# schedule keeps the same shape at this scale.

profile = 'sims'

# Root seed.  Train split uses seed, test seed + 1, shifted split seed + 2.
seed = 0

env = {
  'n_samples' : 2000,
  'd' : 8,
  'hard_fraction' : 0.3,
  'teacher_noise' : 0.2,
  'noise_sigma' : 0.3,
  'hard_signal_scale' : 0.6,
  'annotation_step' : 0.2,
  'world_seed' : 0,
}

test = {
  'n_samples' : 500,
}

# Distribution-shift split: noisier features, more modality conflict.
shift = {
  'noise_scale' : 2.0,
  'hard_fraction' : 0.5,
}

policy = {
  'h' : 32,
  'n_think' : 6,
  'max_think' : 4,
  'score_step' : 0.1,
  'init_scale' : 0.1,
  'free_decoding' : False,
}

sft = {
  'learning_rate' : 0.1,
  'epochs' : 8,
  'batch_size' : 16,
}

# beta weighs the per-token KL to the frozen SFT policy.
grpo = {
  'group_size' : 4,
  'beta' : 0.02,
  'hard_threshold' : 2.0,
  'learning_rate' : 0.2,
  'steps' : 300,
  'batch_size' : 8,
  'temperature' : 1.0,
  'weights' : { 'lambda_format' : 1.0, 'lambda_polarity' : 1.0, 'lambda_score' : 1.0 },
}

evaluation = {
  'n_jobs' : 1,
}
