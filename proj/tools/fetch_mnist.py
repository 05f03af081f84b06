#!/usr/bin/env python3
"""Fetch the MNIST training images and write a seeded 2,000-row subsample.

The output lands in tests/data/mnist2000.csv (header px0..px783, intensities
0..255). The acceptance suite picks that file up automatically when present;
without it, the suite falls back to the bundled 8x8 digits enlarged to the
same 28x28 raster.

Usage: python3 tools/fetch_mnist.py [--rows 2000] [--seed 4242] [--out PATH]
"""

import argparse
import gzip
import io
import random
import struct
import sys
import urllib.request
from pathlib import Path

MIRRORS = [
    "https://ossci-datasets.s3.amazonaws.com/mnist/train-images-idx3-ubyte.gz",
    "https://storage.googleapis.com/cvdf-datasets/mnist/train-images-idx3-ubyte.gz",
]


def download() -> bytes:
    last_error = None
    for url in MIRRORS:
        try:
            print(f"downloading {url} ...", flush=True)
            with urllib.request.urlopen(url, timeout=120) as resp:
                return resp.read()
        except Exception as e:  # noqa: BLE001 - try the next mirror
            last_error = e
            print(f"  failed: {e}", file=sys.stderr)
    raise SystemExit(f"all mirrors failed; last error: {last_error}")


def parse_idx_images(raw: bytes) -> list[bytes]:
    data = gzip.GzipFile(fileobj=io.BytesIO(raw)).read()
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != 2051 or rows != 28 or cols != 28:
        raise SystemExit(f"unexpected IDX header: magic={magic} rows={rows} cols={cols}")
    size = rows * cols
    body = data[16:]
    if len(body) != count * size:
        raise SystemExit("truncated IDX payload")
    return [body[i * size : (i + 1) * size] for i in range(count)]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=4242)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "tests" / "data" / "mnist2000.csv",
    )
    args = parser.parse_args()

    images = parse_idx_images(download())
    picked = sorted(random.Random(args.seed).sample(range(len(images)), args.rows))

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="ascii") as f:
        f.write(",".join(f"px{i}" for i in range(28 * 28)) + "\n")
        for idx in picked:
            f.write(",".join(str(b) for b in images[idx]) + "\n")
    print(f"wrote {args.rows} rows to {args.out}")


if __name__ == "__main__":
    main()
