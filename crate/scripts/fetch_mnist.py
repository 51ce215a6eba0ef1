#!/usr/bin/env python3
"""Build IDX files from the 10k-digit MNIST subset shipped in the `mnist` npm package.

Usage: scripts/fetch_mnist.py [OUT_DIR]   (default: data/mnist)

Writes OUT_DIR/images-idx3-ubyte and OUT_DIR/labels-idx1-ubyte. Digits are
interleaved round-robin by class so that any prefix of the file is class-mixed.
"""
import json
import os
import struct
import subprocess
import sys
import tarfile
import tempfile


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join("data", "mnist")
    os.makedirs(out_dir, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=tmp, check=True,
                       stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        tgz = [f for f in os.listdir(tmp) if f.endswith(".tgz")][0]
        with tarfile.open(os.path.join(tmp, tgz)) as tar:
            tar.extractall(tmp)
        per_class = []
        for digit in range(10):
            with open(os.path.join(tmp, "package", "src", "digits", f"{digit}.json")) as fh:
                flat = json.load(fh)["data"]
            assert len(flat) % 784 == 0
            per_class.append([flat[i:i + 784] for i in range(0, len(flat), 784)])

    images, labels = [], []
    depth = max(len(c) for c in per_class)
    for i in range(depth):
        for digit, samples in enumerate(per_class):
            if i < len(samples):
                # values are byte/255 rounded to 3 decimals; rounding recovers the byte
                images.append(bytes(min(255, max(0, round(v * 255))) for v in samples[i]))
                labels.append(digit)

    with open(os.path.join(out_dir, "images-idx3-ubyte"), "wb") as fh:
        fh.write(struct.pack(">IIII", 2051, len(images), 28, 28))
        for img in images:
            fh.write(img)
    with open(os.path.join(out_dir, "labels-idx1-ubyte"), "wb") as fh:
        fh.write(struct.pack(">II", 2049, len(labels)))
        fh.write(bytes(labels))
    print(f"wrote {len(images)} images to {out_dir}")


if __name__ == "__main__":
    main()
