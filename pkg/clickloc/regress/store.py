"""Regressor files (CCM1)."""

from pathlib import Path
import logging
import struct

import numpy as np

from ..errors import FormatError
from .model import TARGETS, LinearModel
from .losses import LOSSES

logger = logging.getLogger(__name__)

MODEL_MAGIC = b"CCM1"
# magic, u8 target tag, u8 loss tag, u32 d, f64 C
_HEADER = struct.Struct("<4sBBId")


def save_model(model: LinearModel, path: Path | str) -> None:
    """Write the header, then float64 weights, bias, offset and scale."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    offset, scale = model.label_scale
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MODEL_MAGIC, TARGETS.index(model.target), LOSSES.index(model.loss), model.d, model.C))
        f.write(model.weights.astype("<f8").tobytes())
        f.write(np.array([model.bias, offset, scale], dtype="<f8").tobytes())
    logger.info("Saved %s model (d=%d, C=%g) to %s", model.target, model.d, model.C, path)


def load_model(path: Path | str) -> LinearModel:
    """Read a model written by save_model()."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")

    magic, target_tag, loss_tag, dims, C = _HEADER.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MODEL_MAGIC!r}")
    if target_tag >= len(TARGETS) or loss_tag >= len(LOSSES):
        raise FormatError(f"{path}: unknown target tag {target_tag} or loss tag {loss_tag}")
    expected = _HEADER.size + 8 * (dims + 3)
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for d={dims}, got {len(data)}")

    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    bias, offset, scale = values[dims:]
    return LinearModel(
        weights=values[:dims], bias=float(bias), target=TARGETS[target_tag], C=C,
        label_scale=(float(offset), float(scale)), loss=LOSSES[loss_tag],
    )
