import argparse
import csv
from pathlib import Path


def parser(doc: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=doc)
    ap.add_argument("--out", default="results", help="directory for the CSV output")
    return ap


def write_csv(out: str, name: str, header, rows) -> Path:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    p = d / name
    with open(p, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)
    return p
