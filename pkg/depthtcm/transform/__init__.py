# -*- coding: utf-8 -*-
#
# depthtcm
# Copyright (C) 2025  depthtcm contributors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
#

from .mwd import (
    DepthMap,
    FringeParams,
    MwdImage,
    PhaseMap,
    ScaleRecord,
    fringe_order,
    mwd_decode,
    mwd_encode,
    prescale_depth,
    working_depth,
    wrapped_phase,
)
from .oracle import Codebook, quantized_codebook, worst_case_decode_error
from .quantizer import (
    AdaptiveQuantMap,
    QuantizedMwd,
    adaptive_quantize,
    dequantize_mwd,
    dequantize_uniform,
    parse_quant_map,
    quantize_mwd,
    quantize_train_proxy,
    quantize_uniform,
    serialize_quant_map,
)

__all__ = [
    "DepthMap",
    "FringeParams",
    "MwdImage",
    "PhaseMap",
    "ScaleRecord",
    "fringe_order",
    "mwd_decode",
    "mwd_encode",
    "prescale_depth",
    "working_depth",
    "wrapped_phase",
    "Codebook",
    "quantized_codebook",
    "worst_case_decode_error",
    "AdaptiveQuantMap",
    "QuantizedMwd",
    "adaptive_quantize",
    "dequantize_mwd",
    "dequantize_uniform",
    "parse_quant_map",
    "quantize_mwd",
    "quantize_train_proxy",
    "quantize_uniform",
    "serialize_quant_map",
]
