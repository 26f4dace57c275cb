"""Print the golden-number table for the bundled scenario (or a given one)."""

import argparse

from qli_sim import scenario as scn
from qli_sim.golden import crystal_rows, feasibility_rows, field_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=scn.PAPER_DEFAULTS)
    args = ap.parse_args()
    doc = scn.load(args.scenario)
    sc = scn.build_scenario(doc)
    rows = field_rows(sc) + feasibility_rows(sc, scn.build_throughput(doc)) + crystal_rows(sc.crystal)
    width = max(len(r.name) for r in rows)
    for r in rows:
        dev = "" if r.informational else f"{r.deviation:+.1%}"
        print(f"{r.status:4s}  {r.name:<{width}}  {r.computed:10.4g} vs {r.expected:<8.4g} {r.unit:10s} {dev:>7s}  {r.note}")


if __name__ == "__main__":
    main()
