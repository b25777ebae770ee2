"""Binary feature cache (CCF1) with a click index sidecar."""

from pathlib import Path
import csv
import logging
import struct

import numpy as np

from ..errors import FormatError, ParseError, ShapeError

logger = logging.getLogger(__name__)

FEATURES_MAGIC = b"CCF1"
_HEADER = struct.Struct("<4sII")


def index_path(path: Path | str) -> Path:
    """Sidecar holding click and hydrophone ids for each cached row."""
    path = Path(path)
    return path.with_name(path.name + ".index.csv")


def save_features(
    features: np.ndarray,
    labels: np.ndarray,
    path: Path | str,
    click_ids: np.ndarray | None = None,
    hydrophone_ids: np.ndarray | None = None,
) -> None:
    """Write an (N, d) feature matrix and (N, 2) range/azimuth labels.

    Layout: magic, u32 count, u32 d, count*d float64, count*2 float64, all
    little-endian. Ids, when given, go to the index sidecar.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if features.ndim != 2:
        raise ShapeError(f"features must be (N, d), got shape {features.shape}")
    count, dim = features.shape
    if labels.shape != (count, 2):
        raise ShapeError(f"labels must be ({count}, 2), got shape {labels.shape}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(FEATURES_MAGIC, count, dim))
        f.write(features.astype("<f8").tobytes())
        f.write(labels.astype("<f8").tobytes())

    if click_ids is not None or hydrophone_ids is not None:
        click_ids = np.arange(count) if click_ids is None else np.asarray(click_ids)
        hydrophone_ids = np.zeros(count, dtype=np.int64) if hydrophone_ids is None else np.asarray(hydrophone_ids)
        with open(index_path(path), "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["row", "click_id", "hydrophone_id"])
            for row in range(count):
                writer.writerow([row, int(click_ids[row]), int(hydrophone_ids[row])])

    logger.info("Cached %d features of d=%d to %s", count, dim, path)


def load_features(path: Path | str) -> tuple[np.ndarray, np.ndarray]:
    """Read a feature cache back as (features, labels)."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")

    magic, count, dim = _HEADER.unpack_from(data)
    if magic != FEATURES_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {FEATURES_MAGIC!r}")

    expected = _HEADER.size + 8 * count * (dim + 2)
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {count}x{dim} features, got {len(data)}")

    features = np.frombuffer(data, dtype="<f8", count=count * dim, offset=_HEADER.size).reshape(count, dim)
    labels = np.frombuffer(data, dtype="<f8", count=count * 2, offset=_HEADER.size + 8 * count * dim).reshape(count, 2)
    return features.astype(np.float64), labels.astype(np.float64)


def load_index(path: Path | str, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Click and hydrophone ids for a cache; defaults when no sidecar exists."""
    sidecar = index_path(path)
    if not sidecar.exists():
        logger.warning("No index sidecar for %s; treating all rows as hydrophone 0", path)
        return np.arange(count, dtype=np.int64), np.zeros(count, dtype=np.int64)

    click_ids = np.zeros(count, dtype=np.int64)
    hydrophone_ids = np.zeros(count, dtype=np.int64)
    seen = 0
    with open(sidecar, newline="") as f:
        for index, row in enumerate(csv.DictReader(f)):
            try:
                position = int(row["row"])
                click_ids[position] = int(row["click_id"])
                hydrophone_ids[position] = int(row["hydrophone_id"])
            except (KeyError, ValueError, IndexError) as e:
                raise ParseError(index, f"bad index row {row}") from e
            seen += 1

    if seen != count:
        raise ShapeError(f"{sidecar}: {seen} rows for a cache of {count}")
    return click_ids, hydrophone_ids
