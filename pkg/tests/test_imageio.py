import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qimg.encoders import QuantumImage, frqi_manual_access_count
from qimg.errors import PnmParseError, ValidationError
from qimg.imageio import (
    PnmImage,
    bit_plane,
    parse_pnm,
    parse_pnm_raw,
    read_image,
    serialize_pnm,
    tile,
    untile,
    write_image,
)


class TestParse:
    def test_ascii_gray(self):
        img = parse_pnm(b"P2 2 2 255 0 85 170 255")
        assert (img.width, img.height, img.channels, img.bit_depth) == (2, 2, 1, 8)
        assert img.pixels.reshape(-1).tolist() == [0, 85, 170, 255]

    def test_ascii_rgb(self):
        img = parse_pnm(b"P3 1 1 3 3 2 3")
        assert img.bit_depth == 2 and img.channels == 3
        assert img.pixels[0, 0].tolist() == [3, 2, 3]

    def test_comments(self):
        img = parse_pnm(b"P2\n# a comment\n2 1 # trailing\n255\n7 9\n")
        assert img.pixels.reshape(-1).tolist() == [7, 9]

    def test_binary_gray(self):
        img = parse_pnm(b"P5\n2 1\n255\n" + bytes([0, 200]))
        assert img.pixels.reshape(-1).tolist() == [0, 200]

    def test_sixteen_bit_is_big_endian(self):
        raw = parse_pnm_raw(b"P5 1 1 65535\n" + bytes([0x12, 0x34]))
        assert raw.samples.reshape(-1).tolist() == [0x1234]
        assert raw.to_quantum_image().bit_depth == 16

    @pytest.mark.parametrize("data", [
        b"P2 2 2 255 0 85 170",
        b"P5 2 2 255\n\x00\x01",
        b"P6 1 1 255\n\x00",
    ])
    def test_truncated(self, data):
        with pytest.raises(PnmParseError) as err:
            parse_pnm(data)
        assert err.value.offset >= 0

    def test_bad_magic_offset(self):
        with pytest.raises(PnmParseError) as err:
            parse_pnm(b"P7 1 1 255 0")
        assert err.value.offset == 0

    def test_maxval_offset(self):
        with pytest.raises(PnmParseError) as err:
            parse_pnm(b"P2 1 1  70000 0")
        assert err.value.offset == 8

    def test_sample_exceeds_maxval(self):
        with pytest.raises(PnmParseError) as err:
            parse_pnm(b"P2 1 1 3 4")
        assert err.value.offset == 9

    def test_non_numeric(self):
        with pytest.raises(PnmParseError):
            parse_pnm(b"P2 x 1 255 0")

    def test_parse_error_is_not_validation_error(self):
        with pytest.raises(PnmParseError):
            parse_pnm(b"")


class TestRoundTrip:
    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(["P2", "P3", "P5", "P6"]), st.integers(1, 5), st.integers(1, 5),
           st.sampled_from([1, 3, 255, 256, 1000, 65535]), st.data())
    def test_all_variants(self, fmt, w, h, maxval, data):
        c = 3 if fmt in ("P3", "P6") else 1
        samples = data.draw(st.lists(st.integers(0, maxval), min_size=w * h * c, max_size=w * h * c))
        img = PnmImage(fmt, w, h, maxval, np.array(samples))
        assert parse_pnm_raw(serialize_pnm(img)) == img

    @pytest.mark.parametrize("binary", [True, False])
    def test_quantum_image_file(self, tmp_path, binary):
        img = QuantumImage(2, 1, 3, 4, np.array([[[1, 2, 3], [15, 0, 7]]]))
        path = tmp_path / "img.pnm"
        write_image(path, img, binary)
        assert read_image(path) == img

    def test_rejects_too_deep(self):
        img = QuantumImage.gray([0], 1, 1, 17)
        with pytest.raises(ValidationError):
            PnmImage.from_quantum_image(img)


class TestTiling:
    def test_exact_fit(self):
        img = QuantumImage.gray(list(range(16)), 4, 4)
        blocks = tile(img, 2)
        assert len(blocks) == 4
        assert blocks[1].pixels.reshape(-1).tolist() == [2, 3, 6, 7]

    def test_padding(self):
        img = QuantumImage.gray(list(range(1, 10)), 3, 3)
        blocks = tile(img, 2)
        assert len(blocks) == 4
        assert blocks[3].pixels.reshape(-1).tolist() == [9, 0, 0, 0]

    def test_full_hd_manual_access_count(self):
        assert frqi_manual_access_count(1920, 1080, 3) == 1_555_200

    def test_side_must_be_power_of_two(self):
        with pytest.raises(ValidationError):
            tile(QuantumImage.gray([0] * 9, 3, 3), 3)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 9), st.integers(1, 9), st.sampled_from([1, 2, 4, 8]), st.data())
    def test_untile_inverts_tile(self, w, h, side, data):
        vals = data.draw(st.lists(st.integers(0, 255), min_size=w * h, max_size=w * h))
        img = QuantumImage.gray(vals, w, h)
        blocks = tile(img, side)
        assert len(blocks) == -(-w // side) * -(-h // side)
        assert untile(blocks, w, h) == img


class TestBitPlanes:
    def test_msb_of_fig10(self):
        img = QuantumImage.gray([0, 100, 200, 255], 2, 2)
        assert bit_plane(img, 7).pixels.reshape(-1).tolist() == [0, 0, 1, 1]

    def test_lsb_of_fig5(self):
        img = QuantumImage.gray([0, 85, 170, 255], 2, 2)
        assert bit_plane(img, 0).pixels.reshape(-1).tolist() == [0, 1, 0, 1]

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            bit_plane(QuantumImage.gray([0], 1, 1), 8)

    @given(st.integers(1, 8), st.data())
    def test_planes_reconstruct_image(self, q, data):
        vals = data.draw(st.lists(st.integers(0, (1 << q) - 1), min_size=6, max_size=6))
        img = QuantumImage.gray(vals, 3, 2, q)
        total = sum(bit_plane(img, k).pixels << k for k in range(q))
        np.testing.assert_array_equal(total, img.pixels)
