#!/usr/bin/env python3
"""Regenerates the packaged synthetic scenarios under scenarios/.

Positions are laid out on a local east/north plane (nautical miles) around a
reference point and converted to lat/lon with a flat-earth approximation,
which is accurate to well under 0.1 NM at these distances.

    python3 tools/make_scenarios.py [--out scenarios]
"""

import argparse
import math
import pathlib

LAT0 = 40.0
LON0 = -2.0
STEP = 10  # native logging interval, seconds


def to_latlon(x_nm, y_nm):
    lat = LAT0 + y_nm / 60.0
    lon = LON0 + x_nm / (60.0 * math.cos(math.radians(LAT0)))
    return lat, lon


def write(path, rows):
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="utf-8") as f:
        f.write("time_s,callsign,lat_deg,lon_deg,alt_ft\n")
        for t, cs, x, y, alt in rows:
            lat, lon = to_latlon(x, y)
            f.write(f"{t},{cs},{lat:.6f},{lon:.6f},{alt:.0f}\n")


def deconstruction():
    """AC1 crosses the sector for 20 minutes while three pairs of slower
    aircraft enter and leave one after the other. AC1 is linked to every pair
    it passes; the pairs never link to each other."""
    rows = []
    ac1_speed = 420.0 / 3600.0  # NM/s
    for t in range(0, 1201, STEP):
        rows.append((t, "AC1", -70.0 + ac1_speed * t, 0.0, 35000))

    # (callsigns, side, window start, window end)
    pairs = [
        (("AC2", "AC3"), +1, 130, 470),
        (("AC4", "AC5"), -1, 450, 830),
        (("AC6", "AC7"), +1, 810, 1200),
    ]
    for (near, far), side, t0, t1 in pairs:
        # Relative to AC1 the pair drifts back from dx=+6 NM to dx=-5 NM.
        rel = 11.0 / (t1 - t0)
        for t in range(t0, t1 + 1, STEP):
            x1 = -70.0 + ac1_speed * t
            dx = 6.0 - rel * (t - t0)
            rows.append((t, near, x1 + dx, side * 17.0, 34000))
            rows.append((t, far, x1 + dx + 3.0, side * 25.0, 35000))
    return rows


def pairwise_conflicts():
    """15 minutes, five aircraft. AC4/AC5 converge on one point at t=540 s,
    AC2/AC3 on another at t=600 s, and AC1 reaches the AC2/AC3 crossing
    shortly after, turning that pair into a compound conflict."""
    rows = []
    speed = 450.0 / 3600.0
    p23 = (0.0, 0.0)
    p45 = (0.0, -100.0)

    def track(cs, point, heading_deg, t_cross, alt, miss=0.0):
        hx = math.sin(math.radians(heading_deg))
        hy = math.cos(math.radians(heading_deg))
        # lateral offset of the crossing point
        ox, oy = hy * miss, -hx * miss
        for t in range(0, 901, STEP):
            s = speed * (t - t_cross)
            rows.append((t, cs, point[0] + ox + hx * s, point[1] + oy + hy * s, alt))

    track("AC2", p23, 90.0, 600, 35000)
    track("AC3", p23, 180.0, 600, 35000, miss=2.0)
    track("AC4", p45, 90.0, 540, 36000)
    track("AC5", p45, 270.0, 540, 36000, miss=2.0)
    track("AC1", p23, 135.0, 680, 35000, miss=3.0)
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "scenarios"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write(out / "deconstruction.csv", deconstruction())
    write(out / "pairwise_conflicts.csv", pairwise_conflicts())


if __name__ == "__main__":
    main()
