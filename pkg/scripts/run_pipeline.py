#!/usr/bin/env python3
"""Run the whole workbench once: simulate, collect, analyze, print the table.

Writes the floorplan, dumps, report.json, and plot data under --out
(default runs/seed<seed>) and prints the rendered results table plus any
analysis notes.
"""

import argparse
import time
from pathlib import Path

from srampuf.analyze import analysis_to_report, analyze_dumps, write_plot_data
from srampuf.chipnet.collector import collect
from srampuf.chipnet.server import ChipServer
from srampuf.floorplan import DEFAULT_DESIGNS, format_config, load_config
from srampuf.report import render_table, save_report
from srampuf.simchip import ProcessParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chips", type=int, default=50)
    ap.add_argument("--cycles", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", help="floorplan config (default: built-in)")
    ap.add_argument("--baseline", default="P1_a")
    ap.add_argument("--out", help="run directory (default runs/seed<seed>)")
    args = ap.parse_args()

    if args.config:
        params, designs = load_config(args.config)
    else:
        params, designs = ProcessParams(), DEFAULT_DESIGNS
    out = Path(args.out) if args.out else Path("runs") / f"seed{args.seed}"
    out.mkdir(parents=True, exist_ok=True)
    (out / "floorplan.cfg").write_text(format_config(params, designs),
                                       encoding="utf-8")

    t0 = time.perf_counter()
    with ChipServer(designs, params, args.seed) as server:
        files = collect(server.endpoint, args.chips, args.cycles, out / "dumps",
                        designs=designs, params=params, seed=args.seed)
    t1 = time.perf_counter()
    run = analyze_dumps(out / "dumps", baseline=args.baseline)
    report = analysis_to_report(run)
    save_report(report, out / "report.json")
    plots = write_plot_data(run, out / "plots")
    t2 = time.perf_counter()

    print(render_table(report), end="")
    if run.notes:
        print()
        for note in run.notes:
            print(f"note: {note}")
    print()
    print(f"collected {len(files)} dumps in {t1 - t0:.1f}s, analyzed in "
          f"{t2 - t1:.1f}s; report and {len(plots)} plot files under {out}")


if __name__ == "__main__":
    main()
