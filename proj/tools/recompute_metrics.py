#!/usr/bin/env python3
# Copyright 2026 ricnn developers
# SPDX-License-Identifier: Apache-2.0
"""Independent check of a run report against its emitted series file.

Recomputes every metric in report.json from series.csv with plain Python
arithmetic (no shared code with the engine) and compares at 1e-12 relative
tolerance.

    tools/recompute_metrics.py out/series.csv [out/report.json]
"""
import csv
import json
import math
import sys


def annualized_return(values):
    wealth = 1.0
    for v in values:
        wealth *= 1.0 + v
    return wealth ** (12.0 / len(values)) - 1.0


def annualized_risk(values):
    mean = sum(values) / len(values)
    ss = sum((v - mean) ** 2 for v in values)
    return math.sqrt(12.0 * ss / (len(values) - 1))


def max_drawdown(values):
    wealth, peak, worst = 1.0, 1.0, 0.0
    for v in values:
        wealth *= 1.0 + v
        peak = max(peak, wealth)
        worst = min(worst, wealth / peak - 1.0)
    return worst


def block(series, drawdown_series):
    risk = annualized_risk(series)
    ret = annualized_return(series)
    return {
        "annualized_return": ret,
        "risk": risk,
        "risk_adjusted": ret / risk,
        "max_drawdown": max_drawdown(drawdown_series),
    }


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    with open(sys.argv[1], newline="") as f:
        rows = list(csv.DictReader(f))
    col = lambda name: [float(r[name]) for r in rows]

    ics = [v for v in col("oos_rank_ic") if not math.isnan(v)]
    recomputed = {
        "mean_oos_rank_ic": sum(ics) / len(ics) if ics else float("nan"),
        "long": {
            "raw": block(col("alpha"), col("r_long")),
            "cost_adjusted": block(col("alpha_net"), col("r_long_net")),
        },
        "long_short": {
            "raw": block(col("r_long_short"), col("r_long_short")),
            "cost_adjusted": block(col("r_long_short_net"), col("r_long_short_net")),
        },
    }
    print(json.dumps(recomputed, indent=1, sort_keys=True))

    if len(sys.argv) < 3:
        return
    with open(sys.argv[2]) as f:
        report = json.load(f)

    def close(a, b):
        if a is None or b is None:
            return a == b
        return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))

    failures = []
    if not close(report["mean_oos_rank_ic"], recomputed["mean_oos_rank_ic"]):
        failures.append("mean_oos_rank_ic")
    for strategy in ("long", "long_short"):
        if strategy not in report:
            continue
        for variant in ("raw", "cost_adjusted"):
            for metric, value in recomputed[strategy][variant].items():
                if not close(report[strategy][variant][metric], value):
                    failures.append(f"{strategy}.{variant}.{metric}")
    if failures:
        sys.exit("MISMATCH: " + ", ".join(failures))
    print("report matches the series at 1e-12 relative tolerance", file=sys.stderr)


if __name__ == "__main__":
    main()
