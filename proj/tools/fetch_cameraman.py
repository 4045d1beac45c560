#!/usr/bin/env python3
"""Write the standard cameraman test image as a 128x128 8-bit binary PGM.

The source is the 512x512 copy shipped with scikit-image (skimage.data.camera).
It is downsampled with an anti-aliased cubic resize.

    python3 tools/fetch_cameraman.py [output.pgm] [--size 128]
"""

import argparse
import pathlib

import numpy as np
from skimage import data, transform


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("output", nargs="?", default="data/cameraman.pgm")
    ap.add_argument("--size", type=int, default=128)
    args = ap.parse_args()

    img = data.camera().astype(np.float64) / 255.0
    small = transform.resize(img, (args.size, args.size), order=3, anti_aliasing=True)
    pixels = np.clip(np.rint(small * 255.0), 0, 255).astype(np.uint8)

    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (args.size, args.size))
        f.write(pixels.tobytes())
    print(f"wrote {out} ({args.size}x{args.size})")


if __name__ == "__main__":
    main()
