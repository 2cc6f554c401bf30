"""
A small benchmark sweep
=======================

Same machinery as the ``bench`` subcommand, just smaller.  Rows come back
as MetricsRow records; ``summarize`` gives per-n means.
"""
import sys

from waitrepair import empty64_map, run_benchmark
from waitrepair.bench import metrics_csv, summarize, summary_csv

rows = run_benchmark(empty64_map(), ["c-repair", "c-sipp", "naive"], [20, 40], instances=3, seed=0)
sys.stdout.write(metrics_csv(rows)[:600] + "...\n\n")
sys.stdout.write(summary_csv(summarize(rows)))
