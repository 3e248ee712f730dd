"""Print every local forcing case with its completion count and timing.

    python3 scripts/forcing_report.py [n ...]
"""
import sys
import time

from stickweave.forcing import all_cases

for n in [int(a) for a in sys.argv[1:]] or [5, 6]:
    for case in all_cases(n):
        t0 = time.time()
        ok, count = case.run()
        print(f"n={n} {'ok  ' if ok else 'FAIL'} {case.name:32s} completions={count:<4d} "
              f"{time.time() - t0:6.3f}s  {case.claim}")
