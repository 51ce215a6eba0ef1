#!/usr/bin/env python3
"""Write the tiny IDX fixture used by the CLI tests.

Two 3x2 images with labels 7 and 2, plus a label file carrying the image
magic number. Output goes to crates/cli/tests/fixtures/.
"""
import os
import struct

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "cli", "tests", "fixtures")

IMAGES = [
    [0, 255, 128, 1, 64, 200],
    [17, 34, 51, 68, 85, 102],
]
LABELS = [7, 2]


def main():
    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "two-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(IMAGES), 3, 2))
        for img in IMAGES:
            f.write(bytes(img))
    with open(os.path.join(OUT, "two-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 2049, len(LABELS)))
        f.write(bytes(LABELS))
    with open(os.path.join(OUT, "bad-magic-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 2051, len(LABELS)))
        f.write(bytes(LABELS))


if __name__ == "__main__":
    main()
