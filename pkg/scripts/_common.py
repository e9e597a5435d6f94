"""Small helpers shared by the experiment scripts."""

import argparse
from pathlib import Path

import numpy as np


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out-dir", default="results", help="directory for CSV output")
    return p


def save(out_dir: str, name: str, header: list[str], columns) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / name
    np.savetxt(target, np.column_stack(columns), delimiter=",", header=",".join(header), comments="", fmt="%.12g")
    print(f"wrote {target}")
    return target
