#!/usr/bin/env python3
"""Seed-averaged trend table from a sweep's summary.csv.

Prints final-window network efficiency and mean secrecy per (policy,
vehicle count), plus ratios of each learned policy over the random baseline.
"""

import argparse
import collections
import statistics


def read_summary(path):
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != "# schema=1":
        raise SystemExit(f"{path}: not a schema=1 summary file")
    header = lines[1].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[2:]]


def print_summary_table(path):
    rows = read_summary(path)
    cells = collections.defaultdict(list)
    for row in rows:
        key = (row["policy"], int(row["vehicle_count"]))
        cells[key].append((float(row["network_efficiency"]),
                           float(row["mean_secrecy_rate"])))

    counts = sorted({count for _, count in cells})
    policies = [p for p in ("seed", "dqn-wopa", "random")
                if any(p == pol for pol, _ in cells)]

    print(f"{'policy':10s} {'vehicles':>8s} {'seeds':>5s} "
          f"{'efficiency':>10s} {'secrecy':>8s}")
    means = {}
    for policy in policies:
        for count in counts:
            if (policy, count) not in cells:
                continue
            effs, secs = zip(*cells[(policy, count)])
            means[(policy, count)] = statistics.mean(effs)
            print(f"{policy:10s} {count:8d} {len(effs):5d} "
                  f"{statistics.mean(effs):10.3f} {statistics.mean(secs):8.3f}")

    for count in counts:
        if ("random", count) not in means:
            continue
        base = means[("random", count)]
        ratios = [f"{p}/random = {means[(p, count)] / base:.2f}"
                  for p in ("seed", "dqn-wopa") if (p, count) in means]
        if ratios:
            print(f"vehicles {count}: " + ", ".join(ratios))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("summary", help="path to a sweep's summary.csv")
    args = parser.parse_args(argv)
    print_summary_table(args.summary)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
