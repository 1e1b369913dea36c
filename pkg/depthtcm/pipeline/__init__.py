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

from .container import (
    CodecConfig,
    ContainerHeader,
    DecodedFile,
    decode_file,
    encode_file,
    parse_container,
    parse_header,
    serialize_header,
)
from .ingest import load_depth, save_depth, save_mwd_png, save_png16, save_raw
from .jobs import JobRunner, run_jobs
from .metrics import MetricsReport, compute_metrics, mean_report
from .monitor import Monitor
from .sweep import RdPoint, format_csv, rd_sweep, write_csv
from .synthetic import gen_synthetic, synthetic_corpus, synthetic_depth

__all__ = [
    "CodecConfig",
    "ContainerHeader",
    "DecodedFile",
    "decode_file",
    "encode_file",
    "parse_container",
    "parse_header",
    "serialize_header",
    "load_depth",
    "save_depth",
    "save_mwd_png",
    "save_png16",
    "save_raw",
    "JobRunner",
    "run_jobs",
    "MetricsReport",
    "compute_metrics",
    "mean_report",
    "Monitor",
    "RdPoint",
    "format_csv",
    "rd_sweep",
    "write_csv",
    "gen_synthetic",
    "synthetic_corpus",
    "synthetic_depth",
]
