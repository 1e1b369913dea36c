# -*- coding: utf-8 -*-

DEFAULT_PERIOD = 8.
DEFAULT_BITS = 4
MIN_BITS = 1
MAX_BITS = 8

# Codeword written for invalid pixels, the Z'=0 encoding
INVALID_CODEWORD = (0.5, 1., 0.)

# Relative slack on the fringe-order resolvability bound
RANGE_TOLERANCE = 1e-12

ADAPTIVE_MIN_BITS = 2
ADAPTIVE_MAX_BITS = 6
