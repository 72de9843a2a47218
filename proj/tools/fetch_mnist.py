#!/usr/bin/env python3
"""Write a desk-scale MNIST split as standard gzip IDX files.

The digits come from the 5000-image MNIST subset (500 per class) that ships
inside the mlxtend wheel, fetched with `pip download` so no dataset mirror is
needed. The split is stratified: 400 images per class for training and 100 per
class for testing, written as

    train-images-idx3-ubyte.gz  train-labels-idx1-ubyte.gz
    t10k-images-idx3-ubyte.gz   t10k-labels-idx1-ubyte.gz

Pass --from-idx DIR instead to copy an existing full MNIST download.
"""

import argparse
import gzip
import io
import random
import shutil
import struct
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

NAMES = {
    "train_images": "train-images-idx3-ubyte.gz",
    "train_labels": "train-labels-idx1-ubyte.gz",
    "test_images": "t10k-images-idx3-ubyte.gz",
    "test_labels": "t10k-labels-idx1-ubyte.gz",
}


def load_mlxtend_rows():
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
             "mlxtend", "-d", tmp],
            check=True,
        )
        wheel = next(Path(tmp).glob("mlxtend-*.whl"))
        with zipfile.ZipFile(wheel) as zf:
            raw = gzip.decompress(zf.read("mlxtend/data/data/mnist_5k.csv.gz"))
    rows = []
    for line in io.StringIO(raw.decode()):
        values = [int(float(v)) for v in line.strip().split(",")]
        pixels, label = values[:-1], values[-1]
        assert len(pixels) == 784 and 0 <= label <= 9
        rows.append((bytes(pixels), label))
    return rows


def write_images(path, images):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(img)


def write_labels(path, labels):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/mnist")
    parser.add_argument("--train-per-class", type=int, default=400)
    parser.add_argument("--seed", type=int, default=20230501)
    parser.add_argument("--from-idx", help="directory holding the four IDX files")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.from_idx:
        for name in NAMES.values():
            src = Path(args.from_idx) / name
            if not src.exists():
                src = src.with_suffix("")
            shutil.copy(src, out / src.name)
        return

    rows = load_mlxtend_rows()
    rng = random.Random(args.seed)
    by_label = {d: [r for r in rows if r[1] == d] for d in range(10)}
    train, test = [], []
    for digit in range(10):
        group = by_label[digit]
        rng.shuffle(group)
        train += group[: args.train_per_class]
        test += group[args.train_per_class:]
    rng.shuffle(train)
    rng.shuffle(test)

    write_images(out / NAMES["train_images"], [img for img, _ in train])
    write_labels(out / NAMES["train_labels"], [lbl for _, lbl in train])
    write_images(out / NAMES["test_images"], [img for img, _ in test])
    write_labels(out / NAMES["test_labels"], [lbl for _, lbl in test])
    print(f"wrote {len(train)} train / {len(test)} test images to {out}")


if __name__ == "__main__":
    main()
