"""Convert decoded image frames to JPEG for the video container.

Frames already carrying a JPEG codestream pass through untouched; raw
encodings are converted via Pillow.  Unknown encodings raise EncodeError
so the pipeline can record a warning and drop the frame.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

from rosann.errors import RosannError
from rosann.msg.media_types import ImageFrame

JPEG_QUALITY = 85

# Raw wire encodings we can hand to Pillow: channel count and band order.
_RAW_MODES = {
    "rgb8": ("RGB", None),
    "bgr8": ("RGB", (2, 1, 0)),
    "rgba8": ("RGBA", None),
    "bgra8": ("RGBA", (2, 1, 0, 3)),
    "mono8": ("L", None),
    "8UC1": ("L", None),
    "8UC3": ("RGB", (2, 1, 0)),  # OpenCV default ordering is BGR
}


class EncodeError(RosannError):
    code = "ENCODE_ERROR"


def is_jpeg(frame: ImageFrame) -> bool:
    if frame.pixel_data[:2] == b"\xff\xd8":
        return True
    return "jpeg" in frame.encoding.lower() or "jpg" in frame.encoding.lower()


def to_jpeg(frame: ImageFrame, quality: int = JPEG_QUALITY) -> bytes:
    """JPEG bytes for one frame, encoding only when needed."""
    if is_jpeg(frame):
        return frame.pixel_data
    encoding = frame.encoding
    if encoding == "mono16":
        # JPEG is 8-bit; keep the high byte of each sample.
        arr = np.frombuffer(frame.pixel_data, dtype="<u2")
        try:
            arr = arr.reshape(frame.height, frame.width)
        except ValueError as exc:
            raise EncodeError(f"mono16 shape mismatch: {exc}") from exc
        img = Image.fromarray((arr >> 8).astype(np.uint8), mode="L")
    elif encoding in _RAW_MODES:
        mode, order = _RAW_MODES[encoding]
        channels = len(mode)
        arr = np.frombuffer(frame.pixel_data, dtype=np.uint8)
        row = frame.step
        try:
            arr = arr.reshape(frame.height, row)[:, : frame.width * channels]
            arr = arr.reshape(frame.height, frame.width, channels)
        except ValueError as exc:
            raise EncodeError(f"{encoding} shape mismatch: {exc}") from exc
        if order is not None:
            arr = arr[:, :, order]
        if mode == "RGBA":
            arr = arr[:, :, :3]
            mode = "RGB"
        img = Image.fromarray(np.ascontiguousarray(arr), mode=mode)
    else:
        raise EncodeError(f"no JPEG path for encoding {encoding!r}")
    buf = io.BytesIO()
    img.save(buf, format="JPEG", quality=quality)
    return buf.getvalue()


def jpeg_dimensions(data: bytes) -> tuple[int, int]:
    """(width, height) of a JPEG codestream."""
    with Image.open(io.BytesIO(data)) as img:
        return img.size
