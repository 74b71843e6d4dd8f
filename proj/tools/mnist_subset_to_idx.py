#!/usr/bin/env python3
"""Convert the digit subset shipped in the npm `mnist` package to IDX files.

The package stores each digit class as a flat JSON array of 28x28 intensities in
[0,1]. Samples are shuffled with a fixed seed and split into train/test IDX pairs.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_subset_to_idx.py package/src/digits data/mnist-subset
"""

import argparse
import json
import pathlib
import random
import struct

SIDE = 28


def load(digits_dir):
    samples = []
    for label in range(10):
        raw = json.loads((digits_dir / f"{label}.json").read_text())["data"]
        n = len(raw) // (SIDE * SIDE)
        for i in range(n):
            px = raw[i * SIDE * SIDE:(i + 1) * SIDE * SIDE]
            samples.append((label, bytes(min(255, max(0, round(v * 255))) for v in px)))
    return samples


def write(samples, images_path, labels_path):
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(samples), SIDE, SIDE))
        for _, px in samples:
            f.write(px)
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">II", 2049, len(samples)))
        f.write(bytes(label for label, _ in samples))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--test", type=int, default=3000, help="number of test samples")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    samples = load(args.digits_dir)
    random.Random(args.seed).shuffle(samples)
    test, train = samples[:args.test], samples[args.test:]
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write(train, args.out_dir / "train-images-idx3-ubyte", args.out_dir / "train-labels-idx1-ubyte")
    write(test, args.out_dir / "test-images-idx3-ubyte", args.out_dir / "test-labels-idx1-ubyte")
    print(f"wrote {len(train)} train / {len(test)} test samples to {args.out_dir}")


if __name__ == "__main__":
    main()
