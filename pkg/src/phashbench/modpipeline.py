"""The seven content-preserving attacks, with frozen default parameters."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import ImageTooSmall, UnknownModification
from .imageio import RasterImage, decode_image, encode_jpeg, encode_png, fit_within, resize
from .watermark import watermark_asset

MODIFICATIONS = ("border", "compression", "crop", "mirror", "scale", "thumb96", "watermark")

DEFAULT_PARAMS = MappingProxyType({
    "border": {"border_px": 30},
    "compression": {"jpeg_quality": 30},
    "crop": {"crop_frac": 0.05},
    "mirror": {"axis": "horizontal"},
    "scale": {"scale_factor": 1.5, "kernel": "bicubic"},
    "thumb96": {"thumb_box": 96, "kernel": "bicubic", "cache_quality": 90},
    "watermark": {"watermark_height_frac": 0.10, "watermark_min_px": 40,
                  "margin_frac": 0.02, "margin_min_px": 4},
})

# the thumbnail attack approximates the Windows cache, it does not reproduce it
EMULATED = frozenset({"thumb96"})
JPEG_PERSISTED = frozenset({"compression", "thumb96"})


@dataclass(frozen=True)
class ModificationSpec:
    kind: str
    overrides: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODIFICATIONS:
            raise UnknownModification(
                f"unknown modification {self.kind!r}; supported: {', '.join(MODIFICATIONS)}"
            )
        unknown = set(dict(self.overrides)) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise ValueError(f"{self.kind} has no parameter(s) {sorted(unknown)}")
        # a sorted item tuple keeps the spec hashable and picklable
        items = self.overrides.items() if isinstance(self.overrides, Mapping) else self.overrides
        object.__setattr__(self, "overrides", tuple(sorted(items)))

    @property
    def params(self) -> dict:
        return {**DEFAULT_PARAMS[self.kind], **dict(self.overrides)}

    @property
    def emulated(self) -> bool:
        return self.kind in EMULATED

    @property
    def extension(self) -> str:
        return "jpg" if self.kind in JPEG_PERSISTED else "png"


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def apply_border(img: RasterImage, border_px: int = 30) -> RasterImage:
    """Extend the canvas with a black frame; the content is not overwritten."""
    out = np.zeros((img.height + 2 * border_px, img.width + 2 * border_px, 3), dtype=np.uint8)
    out[border_px:border_px + img.height, border_px:border_px + img.width] = img.pixels
    return RasterImage(out)


def compress_jpeg(img: RasterImage, jpeg_quality: int = 30) -> tuple[RasterImage, bytes]:
    data = encode_jpeg(img, jpeg_quality)
    return decode_image(data), data


def apply_compression(img: RasterImage, jpeg_quality: int = 30) -> RasterImage:
    return compress_jpeg(img, jpeg_quality)[0]


def apply_crop(img: RasterImage, crop_frac: float = 0.05) -> RasterImage:
    if img.width < 20 or img.height < 20:
        raise ImageTooSmall(f"crop needs at least 20x20, got {img.width}x{img.height}")
    x0 = math.floor(crop_frac * img.width)
    y0 = math.floor(crop_frac * img.height)
    w = math.floor((1 - 2 * crop_frac) * img.width)
    h = math.floor((1 - 2 * crop_frac) * img.height)
    return RasterImage(img.pixels[y0:y0 + h, x0:x0 + w])


def apply_mirror(img: RasterImage, axis: str = "horizontal") -> RasterImage:
    """Left-right mirror by default; ``axis="vertical"`` flips top to bottom."""
    if axis == "horizontal":
        return RasterImage(img.pixels[:, ::-1])
    if axis == "vertical":
        return RasterImage(img.pixels[::-1])
    raise ValueError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")


def apply_scale(img: RasterImage, scale_factor: float = 1.5, kernel: str = "bicubic") -> RasterImage:
    return resize(img, math.floor(scale_factor * img.width), math.floor(scale_factor * img.height), kernel)


def make_thumbnail(img: RasterImage, thumb_box: int = 96, kernel: str = "bicubic",
                   cache_quality: int = 90) -> tuple[RasterImage, bytes]:
    data = encode_jpeg(fit_within(img, thumb_box, kernel), cache_quality)
    return decode_image(data), data


def apply_thumb96(img: RasterImage, **params) -> RasterImage:
    return make_thumbnail(img, **params)[0]


def stamp_geometry(width: int, height: int, watermark_height_frac=0.10, watermark_min_px=40,
                   margin_frac=0.02, margin_min_px=4):
    """(x0, y0, stamp_w, stamp_h) of the stamp for an image of the given size."""
    asset = watermark_asset()
    sh = max(_round_half_up(watermark_height_frac * height), watermark_min_px)
    sw = max(1, _round_half_up(sh * asset.width / asset.height))
    margin = max(_round_half_up(margin_frac * width), margin_min_px)
    return width - margin - sw, height - margin - sh, sw, sh


def apply_watermark(img: RasterImage, **params) -> RasterImage:
    """Paste the opaque stamp at the bottom right."""
    x0, y0, sw, sh = stamp_geometry(img.width, img.height, **params)
    if img.height < 40 or x0 < 0 or y0 < 0:
        raise ImageTooSmall(f"a {sw}x{sh} stamp does not fit a {img.width}x{img.height} image")
    stamp = resize(watermark_asset(), sw, sh, "bicubic")
    out = img.pixels.copy()
    out[y0:y0 + sh, x0:x0 + sw] = stamp.pixels
    return RasterImage(out)


_APPLY = {
    "border": apply_border,
    "compression": apply_compression,
    "crop": apply_crop,
    "mirror": apply_mirror,
    "scale": apply_scale,
    "thumb96": apply_thumb96,
    "watermark": apply_watermark,
}


def apply(spec: ModificationSpec, img: RasterImage) -> RasterImage:
    return _APPLY[spec.kind](img, **spec.params)


def apply_encoded(spec: ModificationSpec, img: RasterImage) -> tuple[RasterImage, bytes]:
    """Apply ``spec`` and return the raster with the bytes to persist.

    For the JPEG-backed attacks the bytes are the very stream that was
    decoded, so a persisted file hashes identically to the in-memory raster.
    """
    if spec.kind == "compression":
        return compress_jpeg(img, **spec.params)
    if spec.kind == "thumb96":
        return make_thumbnail(img, **spec.params)
    out = apply(spec, img)
    return out, encode_png(out)
