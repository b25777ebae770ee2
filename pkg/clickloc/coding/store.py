"""Dictionary files (CCD1)."""

from pathlib import Path
import logging
import struct

import numpy as np

from ..errors import FormatError
from .base import Dictionary

logger = logging.getLogger(__name__)

DICTIONARY_MAGIC = b"CCD1"
_HEADER = struct.Struct("<4sII")


def save_dictionary(dictionary: Dictionary, path: Path | str) -> None:
    """Write magic, u32 p', u32 k, then the atoms as column-major float64."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(DICTIONARY_MAGIC, dictionary.p, dictionary.k))
        f.write(dictionary.atoms.ravel(order="F").astype("<f8").tobytes())
    logger.info("Saved %dx%d dictionary to %s", dictionary.p, dictionary.k, path)


def load_dictionary(path: Path | str) -> Dictionary:
    """Read a dictionary written by save_dictionary()."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")

    magic, p, k = _HEADER.unpack_from(data)
    if magic != DICTIONARY_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {DICTIONARY_MAGIC!r}")
    expected = _HEADER.size + 8 * p * k
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for a {p}x{k} dictionary, got {len(data)}")

    values = np.frombuffer(data, dtype="<f8", count=p * k, offset=_HEADER.size)
    return Dictionary(values.reshape((p, k), order="F").astype(np.float64))
