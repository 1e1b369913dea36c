# -*- coding: utf-8 -*-

# 64-bit carry-less register, one byte shifted out per renormalization;
# a normalized range (>= BOT) keeps 32 bits above a 16-bit probability total
REGISTER_BITS = 64
TOP = 1 << (REGISTER_BITS - 8)
BOT = 1 << (REGISTER_BITS - 16)
MASK = (1 << REGISTER_BITS) - 1
INITIAL_RANGE = MASK

# Bytes written by finish(); the decoder pads the rest of its register with zeros
FLUSH_BYTES = 2
PAD_BYTES = REGISTER_BITS // 8 - FLUSH_BYTES

PROBABILITY_BITS = 16
PROBABILITY_TOTAL = 1 << PROBABILITY_BITS
# Smallest mass any symbol may hold, 2^-16
LIKELIHOOD_FLOOR = 1. / PROBABILITY_TOTAL

ADAPTIVE_INCREMENT = 32
ADAPTIVE_LIMIT = PROBABILITY_TOTAL

RAW_CHUNK_BITS = 16
RUN_EXPONENTS = 33
