#!/usr/bin/env python3
"""Replies with a fixed status to every check-sat. Usage: always.py <status>."""
import sys

status = sys.argv[1] if len(sys.argv) > 1 else "sat"
for line in sys.stdin:
    line = line.strip()
    if line.startswith("(check-sat"):
        print(status, flush=True)
    elif line.startswith("(echo"):
        print(line.split('"')[1], flush=True)
