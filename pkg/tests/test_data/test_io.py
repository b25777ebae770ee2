"""Tests for click ingestion and persistence."""

import math

import numpy as np
import pytest
from scipy.io import wavfile

from clickloc.data.io import fit_length, format_for_path, load_clicks, save_clicks
from clickloc.errors import FormatError, ParseError, ShapeError


def _write_csv(path, n, rows):
    lines = [f"n,{n}"]
    for click_id, hydrophone, range_m, azimuth, samples in rows:
        lines.append(",".join(str(v) for v in [click_id, hydrophone, range_m, azimuth, *samples]))
    path.write_text("\n".join(lines) + "\n")


class TestCsv:
    """Tests for the CSV click format."""

    def test_three_rows(self, tmp_path):
        """Test three 2000-sample rows parse into N=3, n=2000."""
        path = tmp_path / "clicks.csv"
        _write_csv(path, 2000, [(i, i % 2, 1000.0 + i, 0.1 * i, np.zeros(2000)) for i in range(3)])

        dataset = load_clicks(path, "csv")
        assert len(dataset) == 3
        assert dataset.n == 2000
        np.testing.assert_array_equal(dataset.click_ids(), [0, 1, 2])

    def test_empty_file(self, tmp_path):
        """Test an empty file gives an empty dataset."""
        path = tmp_path / "empty.csv"
        path.write_text("")
        assert len(load_clicks(path, "csv")) == 0

    def test_short_row(self, tmp_path):
        """Test a 1999-sample row under an n=2000 header raises a shape error."""
        path = tmp_path / "short.csv"
        _write_csv(path, 2000, [(0, 0, 10.0, 0.0, np.zeros(1999))])
        with pytest.raises(ShapeError):
            load_clicks(path, "csv")

    def test_bad_value_names_record(self, tmp_path):
        """Test a malformed value reports its record index."""
        path = tmp_path / "bad.csv"
        path.write_text("n,2\n0,0,10.0,0.0,1.0,2.0\n1,0,oops,0.0,1.0,2.0\n")
        with pytest.raises(ParseError) as info:
            load_clicks(path, "csv")
        assert info.value.record_index == 1

    def test_bad_ground_truth_is_parse_error(self, tmp_path):
        """Test an out-of-range azimuth surfaces as a parse error."""
        path = tmp_path / "azimuth.csv"
        path.write_text("n,2\n0,0,10.0,4.0,1.0,2.0\n")
        with pytest.raises(ParseError):
            load_clicks(path, "csv")

    def test_degrees(self, tmp_path):
        """Test degree azimuths are converted and wrapped."""
        path = tmp_path / "deg.csv"
        _write_csv(path, 2, [(0, 0, 10.0, 90.0, [0.0, 1.0]), (1, 0, 10.0, 180.0, [0.0, 1.0])])
        dataset = load_clicks(path, "csv", azimuth_unit="deg")
        assert dataset[0].azimuth_rad == pytest.approx(math.pi / 2)
        assert dataset[1].azimuth_rad == pytest.approx(-math.pi)

    def test_save_load(self, tmp_path, small_clicks):
        """Test CSV output reloads to the same values."""
        path = tmp_path / "clicks.csv"
        save_clicks(small_clicks, path, "csv")
        loaded = load_clicks(path, "csv")
        np.testing.assert_array_equal(loaded.samples_matrix(), small_clicks.samples_matrix())
        np.testing.assert_array_equal(loaded.ranges(), small_clicks.ranges())
        np.testing.assert_array_equal(loaded.hydrophone_ids(), small_clicks.hydrophone_ids())


class TestBinary:
    """Tests for the binary click format."""

    def test_save_load(self, tmp_path, small_clicks):
        """Test binary output reloads bit for bit."""
        path = tmp_path / "clicks.ccc"
        save_clicks(small_clicks, path, "binary")
        loaded = load_clicks(path, "binary")
        np.testing.assert_array_equal(loaded.samples_matrix(), small_clicks.samples_matrix())
        np.testing.assert_array_equal(loaded.azimuths(), small_clicks.azimuths())
        np.testing.assert_array_equal(loaded.click_ids(), small_clicks.click_ids())

    def test_file_size(self, tmp_path, small_clicks):
        """Test the record layout: 28 bytes of metadata plus n doubles per click."""
        path = tmp_path / "clicks.ccc"
        save_clicks(small_clicks, path, "binary")
        assert path.stat().st_size == 12 + len(small_clicks) * (28 + 8 * small_clicks.n)

    def test_bad_magic(self, tmp_path, small_clicks):
        """Test a wrong magic raises a format error."""
        path = tmp_path / "clicks.ccc"
        save_clicks(small_clicks, path, "binary")
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            load_clicks(path, "binary")

    def test_truncated(self, tmp_path, small_clicks):
        """Test a truncated file raises a format error."""
        path = tmp_path / "clicks.ccc"
        save_clicks(small_clicks, path, "binary")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError):
            load_clicks(path, "binary")


class TestWavDirectory:
    """Tests for WAV directory ingestion."""

    def test_crop_pad_and_scale(self, tmp_path):
        """Test int16 PCM is scaled to [-1, 1], then cropped or padded to n."""
        wavfile.write(tmp_path / "long.wav", 48000, np.array([0, 0, 16384, 16384, 16384, 16384, 0, 0], dtype=np.int16))
        wavfile.write(tmp_path / "short.wav", 48000, np.array([-32768, -32768], dtype=np.int16))
        (tmp_path / "metadata.csv").write_text(
            "filename,hydrophone_id,range_m,azimuth_rad\n"
            "long.wav,1,1500.0,0.5\n"
            "short.wav,2,2500.0,-0.5\n"
        )

        dataset = load_clicks(tmp_path, "wav_directory", n=4)
        assert dataset.n == 4
        np.testing.assert_allclose(dataset[0].samples, [0.5, 0.5, 0.5, 0.5])
        np.testing.assert_allclose(dataset[1].samples, [0.0, -1.0, -1.0, 0.0])
        np.testing.assert_array_equal(dataset.hydrophone_ids(), [1, 2])
        np.testing.assert_array_equal(dataset.click_ids(), [0, 1])

    def test_missing_sidecar(self, tmp_path):
        """Test a directory without metadata.csv is an I/O error."""
        with pytest.raises(FileNotFoundError):
            load_clicks(tmp_path, "wav_directory", n=4)

    def test_stereo_rejected(self, tmp_path):
        """Test multi-channel clips are rejected."""
        wavfile.write(tmp_path / "stereo.wav", 48000, np.zeros((8, 2), dtype=np.int16))
        (tmp_path / "metadata.csv").write_text(
            "filename,hydrophone_id,range_m,azimuth_rad\nstereo.wav,0,100.0,0.0\n"
        )
        with pytest.raises(ShapeError):
            load_clicks(tmp_path, "wav_directory", n=4)

    @pytest.mark.parametrize("row", ["b.wav,h1,10.0,0.0", "b.wav,0,far,0.0", "b.wav,0,10.0,north"])
    def test_non_numeric_fields(self, tmp_path, row):
        """Test a non-numeric hydrophone, range or azimuth is a parse error naming the row."""
        for name in ("a.wav", "b.wav"):
            wavfile.write(tmp_path / name, 48000, np.zeros(4, dtype=np.int16))
        (tmp_path / "metadata.csv").write_text(
            "filename,hydrophone_id,range_m,azimuth_rad\na.wav,0,10.0,0.0\n" + row + "\n"
        )
        with pytest.raises(ParseError) as info:
            load_clicks(tmp_path, "wav_directory", n=4)
        assert info.value.record_index == 1


def test_fit_length():
    """Test center crop and symmetric zero padding."""
    np.testing.assert_array_equal(fit_length(np.arange(6.0), 2), [2.0, 3.0])
    np.testing.assert_array_equal(fit_length(np.ones(2), 5), [0.0, 1.0, 1.0, 0.0, 0.0])


def test_format_for_path(tmp_path):
    """Test format inference."""
    assert format_for_path(tmp_path) == "wav_directory"
    assert format_for_path(tmp_path / "a.csv") == "csv"
    assert format_for_path(tmp_path / "a.ccc") == "binary"
