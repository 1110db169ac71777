#!/usr/bin/env python3
"""Build IDX-format digit files under data/.

Upscales the scikit-learn 8x8 handwritten digits to 28x28 grayscale so the
images flow through the same crop/downsample pipeline as standard MNIST
files. Output: data/digits-images-idx3-ubyte, data/digits-labels-idx1-ubyte.
"""

import pathlib
import struct

import numpy as np
from scipy.ndimage import zoom
from sklearn.datasets import load_digits


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)

    digits = load_digits()
    images = digits.images / 16.0  # 8x8 in [0,1]
    labels = digits.target.astype(np.uint8)

    upscaled = np.stack([np.clip(zoom(img, 28 / 8, order=3), 0.0, 1.0) for img in images])
    pixels = (upscaled * 255.0).round().astype(np.uint8)

    n = pixels.shape[0]
    with open(out_dir / "digits-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 2051, n, 28, 28))
        f.write(pixels.tobytes())
    with open(out_dir / "digits-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 2049, n))
        f.write(labels.tobytes())
    print(f"wrote {n} images to {out_dir}")


if __name__ == "__main__":
    main()
