# -*- coding: utf-8 -*-

CONTAINER_MAGIC = b"DTCM"
CONTAINER_VERSION = 1

CODEC_BASELINE = 0
CODEC_LEARNED = 1
CODEC_IDS = {"baseline": CODEC_BASELINE, "learned": CODEC_LEARNED}
CODEC_NAMES = {v: k for k, v in CODEC_IDS.items()}

FLAG_MASK = 0x01
FLAG_ADAPTIVE = 0x02

# Raw float32 planes carry a 16-byte sidecar: u32 width, u32 height, f64 scale
RAW_SUFFIX = ".raw"
SIDECAR_SUFFIX = ".hdr"
PNG_SUFFIX = ".png"

DEFAULT_DEPTH_SCALE = 0.001
DEFAULT_MASK_SENTINEL = 0

ORIGINAL_BPP = 16

CSV_HEADER = ("setting", "bpp", "psnr_db", "rmse", "nrmse", "accuracy_pct", "cr", "enc_ms", "dec_ms")
INF_SENTINEL = "inf"

# Synthetic corpus
SYNTHETIC_NEAR = 500.
SYNTHETIC_FAR = 4000.
EDGE_BAND = (0.01, 0.25)
EDGE_THRESHOLD = 0.02
SYNTHETIC_RETRIES = 20
