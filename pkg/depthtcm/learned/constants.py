# -*- coding: utf-8 -*-

FEATURES = 32
LATENT_CHANNELS = 32
HYPER_CHANNELS = 16
WINDOW_SIZE = 4
HEAD_DIM = 8

# g_a total stride, then the hyper path's own stride on top of it
LATENT_STRIDE = 16
HYPER_STRIDE = 4
PAD_MULTIPLE = LATENT_STRIDE * HYPER_STRIDE

BACKBONES = ("tcm", "cnn")
MODES = ("train", "noise", "eval")

SCALE_FLOOR = 1e-6
# Latent symbols live on [-LATTICE_BOUND, LATTICE_BOUND]
LATTICE_BOUND = 64
TAIL_SIGMAS = 12.

DEFAULT_LAMBDA = 0.05
DEFAULT_TAU = 0.05
DEFAULT_W_TV = 0.001
DEFAULT_W_IMG = 1.
DEFAULT_LEARNING_RATE = 1e-4
DEFAULT_BATCH_SIZE = 4
DISTORTION_SCALE = 255. ** 2

# consecutive skipped steps tolerated by Trainer.fit
MAX_SKIPPED_STEPS = 10

CHECKPOINT_MAGIC = b"DTCK"
CHECKPOINT_VERSION = 1
DIGEST_BYTES = 8
