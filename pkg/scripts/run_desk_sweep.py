#!/usr/bin/env python3
"""Run the desk-scale sweep and print the seed-averaged trend table.

Equivalent to `secv2x run --config configs/desk.cfg` followed by
`scripts/summarize_results.py` on the output.
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from secv2x.config import load_config, set_key
from secv2x.experiment import run_sweep
from summarize_results import print_summary_table


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=os.path.join(
        os.path.dirname(__file__), "..", "configs", "desk.cfg"))
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    args = parser.parse_args(argv)

    config = load_config(args.config)
    for item in args.overrides:
        key, _, value = item.partition("=")
        config = set_key(config, key, value)
    config.validate()

    t0 = time.time()
    paths = run_sweep(config, progress=lambda msg: print(
        f"[{time.strftime('%H:%M:%S')}] {msg}", flush=True))
    print(f"sweep finished in {time.time() - t0:.0f}s")
    for name, path in sorted(paths.items()):
        print(f"  {name}: {path}")
    print()
    print_summary_table(paths["summary"])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
