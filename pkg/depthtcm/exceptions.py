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
from __future__ import annotations


class DepthTcmError(Exception):
    """Base class for every error raised by depthtcm."""


class ConfigError(DepthTcmError):
    pass


# MWD transform

class TransformError(DepthTcmError):
    pass


class AllInvalid(TransformError):
    pass


class RangeViolation(TransformError):
    pass


# Quantizer

class QuantizationError(DepthTcmError):
    pass


class BitsOutOfRange(QuantizationError):
    pass


class SymbolOutOfRange(QuantizationError):
    pass


# Entropy coding

class CodingError(DepthTcmError):
    pass


class ModelMismatch(CodingError):
    pass


class TruncatedStream(CodingError):
    pass


class NonPositiveLikelihood(CodingError):
    pass


class InvalidModel(CodingError):
    pass


# Learned codec

class CodecError(DepthTcmError):
    pass


class OddChannels(CodecError):
    pass


class EmptyMask(CodecError):
    pass


class NonFinite(CodecError):
    pass


class NonFiniteGradient(CodecError):
    pass


class CheckpointError(CodecError):
    pass


# Container / ingestion

class ContainerError(DepthTcmError):
    pass


class BadMagic(ContainerError):
    pass


class UnsupportedVersion(ContainerError):
    pass


class LengthMismatch(ContainerError):
    pass


class IngestError(DepthTcmError):
    pass


class IoError(IngestError):
    pass


class UnsupportedFormat(IngestError):
    pass


class SweepError(DepthTcmError):
    def __init__(self, image_id: str, message: str) -> None:
        super().__init__(f"{image_id}: {message}")
        self.image_id = image_id
