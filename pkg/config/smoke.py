# A quick end-to-end run for checking that everything is wired together.

profile = 'sims'
seed = 0

env = { 'n_samples' : 200, 'd' : 8, 'hard_fraction' : 0.3 }
test = { 'n_samples' : 100 }
shift = { 'noise_scale' : 2.0, 'hard_fraction' : 0.5 }

policy = { 'h' : 16 }

sft = { 'learning_rate' : 0.1, 'epochs' : 3, 'batch_size' : 16 }

grpo = { 'learning_rate' : 0.2, 'beta' : 0.02, 'steps' : 20, 'batch_size' : 4 }
