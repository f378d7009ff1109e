#!/usr/bin/env python3
"""Dies on every check-sat."""
import sys

for line in sys.stdin:
    line = line.strip()
    if line.startswith("(check-sat"):
        sys.exit(1)
    elif line.startswith("(echo"):
        print(line.split('"')[1], flush=True)
