#!/usr/bin/env python3
"""Prepend a license header to every C++ source under the given roots.

Files that already start with the header are left alone.
"""
import argparse
import pathlib

SUFFIXES = {".hpp", ".cpp", ".h", ".cc"}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("header", type=pathlib.Path)
    ap.add_argument("roots", nargs="+", type=pathlib.Path)
    args = ap.parse_args()
    header = args.header.read_text().rstrip("\n") + "\n\n"
    changed = 0
    for root in args.roots:
        for path in sorted(root.rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text()
            if text.startswith(header):
                continue
            path.write_text(header + text)
            changed += 1
    print(f"updated {changed} files")


if __name__ == "__main__":
    main()
