"""Click dataset ingestion and persistence (CSV, binary, WAV directory)."""

from pathlib import Path
from typing import Literal
import csv
import logging
import math
import struct

import numpy as np
from scipy.io import wavfile

from ..errors import ConfigError, FormatError, ParseError, ShapeError
from .records import ClickDataset, ClickRecord, wrap_azimuth

logger = logging.getLogger(__name__)

ClickFormat = Literal["csv", "binary", "wav_directory"]

CLICKS_MAGIC = b"CCC1"
_HEADER = struct.Struct("<4sII")

# Sidecar file describing the clips of a WAV directory
WAV_METADATA = "metadata.csv"
WAV_METADATA_FIELDS = ("filename", "hydrophone_id", "range_m", "azimuth_rad")


def _record_dtype(n: int) -> np.dtype:
    """Packed little-endian layout of one binary click record."""
    return np.dtype([
        ("click_id", "<i8"),
        ("hydrophone_id", "<i4"),
        ("range_m", "<f8"),
        ("azimuth_rad", "<f8"),
        ("samples", "<f8", (n,)),
    ])


def _azimuth(value: float, unit: str) -> float:
    if unit == "deg":
        return wrap_azimuth(math.radians(value))
    return value


def _make_record(index: int, samples, range_m, azimuth_rad, hydrophone_id, click_id) -> ClickRecord:
    """Build a record, reporting bad ground truth as a parse error."""
    try:
        return ClickRecord(samples, float(range_m), float(azimuth_rad), int(hydrophone_id), int(click_id))
    except (ConfigError, ValueError) as e:
        raise ParseError(index, str(e)) from e


def load_clicks(
    path: Path | str,
    format: ClickFormat = "csv",
    n: int | None = None,
    azimuth_unit: Literal["rad", "deg"] = "rad",
) -> ClickDataset:
    """Load a click dataset, preserving input order.

    Args:
        path: CSV file, binary click file, or WAV directory
        format: One of 'csv', 'binary', 'wav_directory'
        n: Clip length for WAV directories (ignored otherwise)
        azimuth_unit: Unit of azimuths stored in the input
    """
    path = Path(path)
    if azimuth_unit not in ("rad", "deg"):
        raise ConfigError("azimuth_unit", f"must be 'rad' or 'deg', got {azimuth_unit!r}")

    if format == "csv":
        dataset = _load_csv(path, azimuth_unit)
    elif format == "binary":
        dataset = _load_binary(path, azimuth_unit)
    elif format == "wav_directory":
        dataset = _load_wav_directory(path, n or 2000, azimuth_unit)
    else:
        raise ConfigError("format", f"unknown click format {format!r}")

    logger.info("Loaded %d clicks (n=%d, H=%d) from %s", len(dataset), dataset.n, dataset.hydrophone_count, path)
    return dataset


def _load_csv(path: Path, azimuth_unit: str) -> ClickDataset:
    with open(path, newline="") as f:
        rows = csv.reader(f)
        header = next(rows, None)
        if header is None:
            return ClickDataset()

        if len(header) != 2 or header[0].strip() != "n":
            raise ParseError(-1, f"expected header 'n,<int>', got {','.join(header)!r}")
        try:
            n = int(header[1])
        except ValueError as e:
            raise ParseError(-1, f"invalid sample count {header[1]!r}") from e

        clicks = []
        for index, row in enumerate(rows):
            if not row:
                continue
            if len(row) != n + 4:
                raise ShapeError(f"record {index}: expected {n} samples, got {len(row) - 4}")
            try:
                click_id, hydrophone_id = int(row[0]), int(row[1])
                range_m, azimuth = float(row[2]), float(row[3])
                samples = np.array(row[4:], dtype=np.float64)
            except ValueError as e:
                raise ParseError(index, str(e)) from e
            clicks.append(_make_record(index, samples, range_m, _azimuth(azimuth, azimuth_unit), hydrophone_id, click_id))

    return ClickDataset(tuple(clicks), n=n)


def _load_binary(path: Path, azimuth_unit: str) -> ClickDataset:
    data = path.read_bytes()
    if not data:
        return ClickDataset()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")

    magic, count, n = _HEADER.unpack_from(data)
    if magic != CLICKS_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {CLICKS_MAGIC!r}")

    dtype = _record_dtype(n)
    expected = _HEADER.size + count * dtype.itemsize
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {count} clicks of n={n}, got {len(data)}")

    table = np.frombuffer(data, dtype=dtype, count=count, offset=_HEADER.size)
    clicks = tuple(
        _make_record(
            index, row["samples"], row["range_m"],
            _azimuth(float(row["azimuth_rad"]), azimuth_unit),
            row["hydrophone_id"], row["click_id"],
        )
        for index, row in enumerate(table)
    )
    return ClickDataset(clicks, n=n)


def _pcm_to_float(audio: np.ndarray) -> np.ndarray:
    """Convert integer PCM to [-1, 1]; float audio passes through."""
    if audio.dtype == np.uint8:
        return (audio.astype(np.float64) - 128.0) / 128.0
    if np.issubdtype(audio.dtype, np.integer):
        return audio.astype(np.float64) / float(-np.iinfo(audio.dtype).min)
    return audio.astype(np.float64)


def fit_length(samples: np.ndarray, n: int) -> np.ndarray:
    """Center-crop or symmetrically zero-pad a clip to n samples."""
    length = samples.shape[0]
    if length >= n:
        start = (length - n) // 2
        return samples[start:start + n]
    left = (n - length) // 2
    return np.pad(samples, (left, n - length - left))


def _load_wav_directory(directory: Path, n: int, azimuth_unit: str) -> ClickDataset:
    metadata = directory / WAV_METADATA
    if not metadata.exists():
        raise FileNotFoundError(f"missing sidecar {metadata}")

    clicks = []
    with open(metadata, newline="") as f:
        reader = csv.DictReader(f)
        missing = set(WAV_METADATA_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ParseError(-1, f"metadata lacks columns {sorted(missing)}")

        for index, row in enumerate(reader):
            _, audio = wavfile.read(directory / row["filename"])
            if audio.ndim != 1:
                raise ShapeError(f"record {index}: {row['filename']} is not mono")
            samples = fit_length(_pcm_to_float(audio), n)
            try:
                azimuth = _azimuth(float(row["azimuth_rad"]), azimuth_unit)
                click_id = int(row["click_id"]) if row.get("click_id") else index
            except ValueError as e:
                raise ParseError(index, str(e)) from e
            clicks.append(_make_record(index, samples, row["range_m"], azimuth, row["hydrophone_id"], click_id))

    return ClickDataset(tuple(clicks), n=n)


def save_clicks(dataset: ClickDataset, path: Path | str, format: Literal["csv", "binary"] = "csv") -> None:
    """Write a click dataset as CSV or binary."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if format == "csv":
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["n", dataset.n])
            for click in dataset:
                writer.writerow([
                    click.click_id, click.hydrophone_id, repr(click.range_m), repr(click.azimuth_rad),
                    *(repr(float(s)) for s in click.samples),
                ])
    elif format == "binary":
        table = np.zeros(len(dataset), dtype=_record_dtype(dataset.n))
        table["click_id"] = dataset.click_ids()
        table["hydrophone_id"] = dataset.hydrophone_ids()
        table["range_m"] = dataset.ranges()
        table["azimuth_rad"] = dataset.azimuths()
        table["samples"] = dataset.samples_matrix()
        with open(path, "wb") as f:
            f.write(_HEADER.pack(CLICKS_MAGIC, len(dataset), dataset.n))
            f.write(table.tobytes())
    else:
        raise ConfigError("format", f"cannot write click format {format!r}")

    logger.info("Wrote %d clicks to %s", len(dataset), path)


def format_for_path(path: Path | str) -> ClickFormat:
    """Infer the click format from a path."""
    path = Path(path)
    if path.is_dir():
        return "wav_directory"
    if path.suffix.lower() == ".csv":
        return "csv"
    return "binary"
