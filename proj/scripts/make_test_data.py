#!/usr/bin/env python3
"""Export grayscale test rasters from scikit-image's bundled sample images.

Writes 8-bit binary PGM files:
  data/testset/   eight 256x256 crops used by the RD evaluation tests
  data/corpus/    larger crops used as a desk-scale training corpus
"""
import os

import numpy as np
from skimage import data
from skimage.color import rgb2gray

OUT = os.path.join(os.path.dirname(__file__), "..", "data")


def to_u8(img):
    if img.ndim == 3:
        img = rgb2gray(img)
    img = np.asarray(img, dtype=np.float64)
    if img.max() > 1.5:
        img = img / 255.0
    return np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)


def center_crop(img, h, w):
    r = (img.shape[0] - h) // 2
    c = (img.shape[1] - w) // 2
    return img[r:r + h, c:c + w]


def write_pgm(path, img):
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.tobytes())


def main():
    testset = {
        "camera": data.camera(),
        "astronaut": data.astronaut(),
        "coffee": data.coffee(),
        "chelsea": data.chelsea(),
        "coins": data.coins(),
        "moon": data.moon(),
        "page": data.page(),
        "motorcycle": data.stereo_motorcycle()[0],
    }
    os.makedirs(os.path.join(OUT, "testset"), exist_ok=True)
    for name, img in testset.items():
        u8 = center_crop(to_u8(img), 256, 256)
        write_pgm(os.path.join(OUT, "testset", name + ".pgm"), u8)

    corpus = {
        "brick": data.brick(),
        "grass": data.grass(),
        "gravel": data.gravel(),
        "text": data.text(),
    }
    os.makedirs(os.path.join(OUT, "corpus"), exist_ok=True)
    for name, img in corpus.items():
        u8 = to_u8(img)
        h = min(320, u8.shape[0] - u8.shape[0] % 2)
        w = min(320, u8.shape[1] - u8.shape[1] % 2)
        write_pgm(os.path.join(OUT, "corpus", name + ".pgm"),
                  center_crop(u8, h, w))


if __name__ == "__main__":
    main()
