"""Fetch the public CoIL 2000 insurance data into data/coil/.

Tries the UCI archive first. When it is unreachable, falls back to the copy of
the training file shipped inside the ISLP wheel (``Caravan.csv``).
"""
import argparse
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases/tic-mld/"
FILES = ("ticdata2000.txt", "ticeval2000.txt", "tictgts2000.txt")


def from_uci(dest: Path) -> bool:
    try:
        for name in FILES:
            with urllib.request.urlopen(UCI + name, timeout=20) as resp:
                (dest / name).write_bytes(resp.read())
        return True
    except OSError as exc:
        print(f"UCI unavailable: {exc}", file=sys.stderr)
        return False


def from_islp(dest: Path) -> bool:
    with tempfile.TemporaryDirectory() as tmp:
        cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "-d", tmp, "ISLP"]
        if subprocess.run(cmd, capture_output=True).returncode != 0:
            return False
        for wheel in Path(tmp).glob("*.whl"):
            with zipfile.ZipFile(wheel) as z:
                (dest / "Caravan.csv").write_bytes(z.read("ISLP/data/Caravan.csv"))
                return True
    return False


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", default="data/coil")
    args = ap.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    if from_uci(dest) or from_islp(dest):
        print(f"CoIL data in {dest}")
        return 0
    print("could not fetch CoIL data", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
