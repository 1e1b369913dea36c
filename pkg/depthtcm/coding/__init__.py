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

from .baseline import (
    decode_planes_baseline,
    encode_planes_baseline,
)
from .rangecoder import (
    AdaptiveFrequencyModel,
    CdfTable,
    RangeDecoder,
    RangeEncoder,
    SymbolStream,
    range_decode,
    range_encode,
)
from .rate import estimate_bpp, information_bits

__all__ = [
    "decode_planes_baseline",
    "encode_planes_baseline",
    "AdaptiveFrequencyModel",
    "CdfTable",
    "RangeDecoder",
    "RangeEncoder",
    "SymbolStream",
    "range_decode",
    "range_encode",
    "estimate_bpp",
    "information_bits",
]
