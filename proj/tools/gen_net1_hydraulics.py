#!/usr/bin/env python3
"""Synthetic 24 h hydraulics for data/net1.net.

Demands follow the Net1 base demands (gpm) and its 2-hour pattern. The pump
runs high off-peak and low at peak so the tank fills, drains through pipe P110
(reversing it twice), and refills. Pipe flows are the least-norm solution of
nodal continuity, so they are consistent but not head-driven.
"""

import argparse
import sys

import numpy as np

GPM = 6.30902e-5  # m3/s

JUNCTIONS = ["10", "11", "12", "13", "21", "22", "23", "31", "32"]
BASE_GPM = {"10": 0, "11": 150, "12": 150, "13": 100, "21": 150, "22": 200, "23": 150, "31": 100, "32": 100}
PIPES = [
    ("10", "10", "11"), ("11", "11", "12"), ("12", "12", "13"), ("21", "21", "22"),
    ("22", "22", "23"), ("31", "31", "32"), ("110", "2", "12"), ("111", "11", "21"),
    ("112", "12", "22"), ("113", "13", "23"), ("121", "21", "31"), ("122", "22", "32"),
]
PATTERN = [1.0, 1.2, 1.4, 1.6, 1.4, 1.2, 1.0, 0.8, 0.6, 0.4, 0.6, 0.8]  # per 2 h


def pump_flow(hour):
    return 0.06 if 4 <= hour < 12 else 0.10


def solve_hour(hour):
    factor = PATTERN[hour // 2]
    demand = {j: BASE_GPM[j] * GPM * factor for j in JUNCTIONS}
    q_pump = pump_flow(hour)
    rows = []
    rhs = []
    for j in JUNCTIONS:
        row = np.zeros(len(PIPES))
        for k, (_, a, b) in enumerate(PIPES):
            if b == j:
                row[k] += 1.0
            if a == j:
                row[k] -= 1.0
        rows.append(row)
        rhs.append(demand[j] - (q_pump if j == "10" else 0.0))
    flows, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return q_pump, demand, flows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="-")
    parser.add_argument("--tank-volume", type=float, default=6800.0)
    args = parser.parse_args()

    lines = ["time_s,element_id,quantity,value"]
    for hour in range(24):
        t = hour * 3600
        q_pump, demand, flows = solve_hour(hour)
        lines.append(f"{t},PMP9,flow_m3s,{q_pump:.12g}")
        for (pid, _, _), q in zip(PIPES, flows):
            lines.append(f"{t},P{pid},flow_m3s,{q:.12g}")
        for j in JUNCTIONS:
            lines.append(f"{t},{j},demand_m3s,{demand[j]:.12g}")
        if hour == 0:
            lines.append(f"{t},2,tank_volume_m3,{args.tank_volume:.12g}")
            lines.append(f"{t},2,demand_m3s,0")
        lines.append(f"{t},*,duration_s,3600")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
