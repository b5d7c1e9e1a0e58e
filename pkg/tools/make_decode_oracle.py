"""Decode two fixture JPEGs with OpenCV (an independent libjpeg build) and store the rasters.

The test suite compares our decoder against these arrays without needing OpenCV.
"""
from pathlib import Path

import cv2
import numpy as np

HERE = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    arrays = {}
    for name in ("fx000.jpg", "fx001.jpg"):
        bgr = cv2.imread(str(HERE / "golden" / name), cv2.IMREAD_COLOR)
        arrays[name.replace(".jpg", "")] = bgr[..., ::-1]
    np.savez_compressed(HERE / "decode_oracle.npz", **arrays)


if __name__ == "__main__":
    main()
