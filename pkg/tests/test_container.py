# -*- coding: utf-8 -*-
import dataclasses

import numpy as np
import pytest
import torch

from depthtcm.coding.baseline import decode_planes_baseline
from depthtcm.exceptions import (
    AllInvalid,
    BadMagic,
    ConfigError,
    LengthMismatch,
    ModelMismatch,
    TruncatedStream,
    UnsupportedVersion,
)
from depthtcm.learned.network import CodecModel
from depthtcm.pipeline.constants import FLAG_ADAPTIVE, FLAG_MASK
from depthtcm.pipeline.container import (
    CodecConfig,
    ContainerHeader,
    decode_file,
    encode_file,
    parse_container,
    parse_header,
    serialize_header,
)
from depthtcm.transform.mwd import DepthMap
from depthtcm.transform.oracle import worst_case_decode_error


def _error_bound(header):
    # worst working-range error of the codebook, back in depth units
    return worst_case_decode_error(header.params, header.bits[2]) / header.prescale + 1e-6


def test_header_round_trip():
    header = ContainerHeader(
        codec_id=1, bits=(3, 4, 5), flags=FLAG_MASK | FLAG_ADAPTIVE, width=640, height=480,
        z_offset=512.25, z_range=63.5, prescale=.0125, period=8., sections=[10, 0, 300],
    )
    assert parse_header(serialize_header(header)) == header


def test_baseline_round_trip(small_depth):
    data = encode_file(small_depth, CodecConfig(bits=4))
    decoded = decode_file(data)
    assert decoded.depth.values.shape == small_depth.values.shape
    err = np.abs(decoded.depth.values - small_depth.values)[small_depth.valid]
    assert err.max() <= _error_bound(decoded.header)


@pytest.mark.parametrize("bits", [2, 3, 5, 8])
def test_round_trip_within_codebook_bound(small_depth, bits):
    decoded = decode_file(encode_file(small_depth, CodecConfig(bits=bits)))
    assert decoded.header.bits == (bits,) * 3
    err = np.abs(decoded.depth.values - small_depth.values)[small_depth.valid]
    assert err.max() <= _error_bound(decoded.header)


def test_mask_restored_exactly(masked_depth):
    decoded = decode_file(encode_file(masked_depth))
    np.testing.assert_array_equal(decoded.mask, masked_depth.valid)
    np.testing.assert_array_equal(decoded.depth.valid, masked_depth.valid)
    assert not decoded.depth.values[~masked_depth.valid].any()


def test_header_records_prescale(ramp_depth):
    header, _ = parse_container(encode_file(ramp_depth, CodecConfig(bits=4)))
    assert header.z_offset == 0.
    assert header.prescale == pytest.approx(.1)
    assert header.z_range == pytest.approx(64.)
    assert (header.width, header.height) == (24, 16)


def test_constant_map_round_trip():
    depth = DepthMap.from_values(np.full((10, 12), 1234.5))
    decoded = decode_file(encode_file(depth))
    assert decoded.header.z_offset == 1234.5
    assert decoded.header.prescale == 1.
    assert np.abs(decoded.depth.values - 1234.5).max() <= _error_bound(decoded.header)


def test_encoding_is_deterministic(small_depth):
    assert encode_file(small_depth) == encode_file(small_depth)


def test_fewer_bits_smaller_file(small_depth):
    assert len(encode_file(small_depth, CodecConfig(bits=4))) < len(encode_file(small_depth, CodecConfig(bits=8)))


def test_all_invalid():
    with pytest.raises(AllInvalid):
        encode_file(DepthMap.from_values(np.full((4, 4), np.nan)))


def test_truncated_header(small_depth):
    with pytest.raises(TruncatedStream):
        decode_file(encode_file(small_depth)[:20])


def test_truncated_payload(small_depth):
    with pytest.raises(LengthMismatch):
        decode_file(encode_file(small_depth)[:-1])


def test_bad_magic(small_depth):
    data = bytearray(encode_file(small_depth))
    data[:4] = b"JPEG"
    with pytest.raises(BadMagic):
        decode_file(bytes(data))


def test_version_bump(small_depth):
    data = bytearray(encode_file(small_depth))
    data[4] += 1
    with pytest.raises(UnsupportedVersion):
        decode_file(bytes(data))


def test_baseline_payload_is_one_block_stream(masked_depth):
    data = encode_file(masked_depth, CodecConfig(bits=5))
    header, sections = parse_container(data)
    assert len(sections) == 1
    quantized, mask = decode_planes_baseline(sections[0], (header.height, header.width))
    decoded = decode_file(data)
    np.testing.assert_array_equal(mask, masked_depth.valid)
    for (plane, bits), (expected, expected_bits) in zip(quantized.planes(), decoded.quantized.planes()):
        assert bits == expected_bits
        np.testing.assert_array_equal(plane, expected)


def test_adaptive_flag_without_map(small_depth):
    data = bytearray(encode_file(small_depth))
    # flags byte follows magic, version, codec id and the three bit depths
    data[9] |= FLAG_ADAPTIVE
    with pytest.raises(LengthMismatch):
        decode_file(bytes(data))


class TestAdaptive:

    def test_round_trip(self, small_depth):
        config = CodecConfig(bits=6, adaptive=True, patch_size=8, bit_lo=2, bit_hi=6)
        decoded = decode_file(encode_file(small_depth, config))
        assert decoded.header.adaptive
        assert decoded.quantized.bit_map is not None
        assert decoded.quantized.bits_b == 6
        assert decoded.quantized.bit_map.bits.min() >= 2
        assert decoded.quantized.bit_map.bits.max() <= 6
        header, sections = parse_container(encode_file(small_depth, config))
        assert header.flags & FLAG_ADAPTIVE
        assert len(sections) == 2

    def test_orders_survive(self, small_depth):
        config = CodecConfig(bits=6, adaptive=True, patch_size=8)
        decoded = decode_file(encode_file(small_depth, config))
        header = decoded.header
        # the phase channels may drop to 2 bits, the fringe order must not slip
        err = np.abs(decoded.depth.values - small_depth.values)[small_depth.valid]
        assert err.max() * header.prescale < header.period

    def test_needs_baseline_codec(self):
        with pytest.raises(ConfigError):
            CodecConfig(codec="learned", adaptive=True)


class TestLearned:

    def test_round_trip(self, small_depth, tiny_model):
        config = CodecConfig(codec="learned", bits=4)
        data = encode_file(small_depth, config, tiny_model)
        decoded = decode_file(data, tiny_model)
        assert decoded.header.codec_id == 1
        assert decoded.depth.values.shape == small_depth.values.shape
        np.testing.assert_array_equal(decoded.mask, small_depth.valid)
        assert decoded.quantized.r.max() <= 15

    def test_deterministic(self, small_depth, tiny_model):
        config = CodecConfig(codec="learned", bits=4)
        assert encode_file(small_depth, config, tiny_model) == encode_file(small_depth, config, tiny_model)

    def test_other_model_rejected(self, small_depth, tiny_model):
        data = encode_file(small_depth, CodecConfig(codec="learned"), tiny_model)
        torch.manual_seed(99)
        other = CodecModel(features=8, latent_channels=8, hyper_channels=4, window_size=4, head_dim=4)
        with pytest.raises(ModelMismatch):
            decode_file(data, other)

    def test_model_required(self, small_depth):
        with pytest.raises(ConfigError):
            encode_file(small_depth, CodecConfig(codec="learned"))

    def test_model_bits_must_match(self, small_depth, tiny_model):
        with pytest.raises(ConfigError):
            encode_file(small_depth, CodecConfig(codec="learned", bits=5), tiny_model)


def test_unknown_codec():
    with pytest.raises(ConfigError):
        CodecConfig(codec="jpeg")


def test_config_replace_keeps_validation():
    config = CodecConfig(bits=4)
    assert dataclasses.replace(config, bits=8).bits == 8
    with pytest.raises(ConfigError):
        dataclasses.replace(config, codec="learned", adaptive=True)
