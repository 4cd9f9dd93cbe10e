#!/usr/bin/env python3
"""Writes data/ieee39.json from the IEEE 39-bus (New England) branch data.

Branch inductance is the series reactance times SCALE, i.e. the network is
expressed on a base SCALE times the 100 MVA system base.
"""
import argparse
import json
import math

# from, to, x (p.u. on 100 MVA)
BRANCHES = [
    (1, 2, 0.0411), (1, 39, 0.0250), (2, 3, 0.0151), (2, 25, 0.0086),
    (2, 30, 0.0181), (3, 4, 0.0213), (3, 18, 0.0133), (4, 5, 0.0128),
    (4, 14, 0.0129), (5, 6, 0.0026), (5, 8, 0.0112), (6, 7, 0.0092),
    (6, 11, 0.0082), (6, 31, 0.0250), (7, 8, 0.0046), (8, 9, 0.0363),
    (9, 39, 0.0250), (10, 11, 0.0043), (10, 13, 0.0043), (10, 32, 0.0200),
    (12, 11, 0.0435), (12, 13, 0.0435), (13, 14, 0.0101), (14, 15, 0.0217),
    (15, 16, 0.0094), (16, 17, 0.0089), (16, 19, 0.0195), (16, 21, 0.0135),
    (16, 24, 0.0059), (17, 18, 0.0082), (17, 27, 0.0173), (19, 20, 0.0138),
    (19, 33, 0.0142), (20, 34, 0.0180), (21, 22, 0.0140), (22, 23, 0.0096),
    (22, 35, 0.0143), (23, 24, 0.0350), (23, 36, 0.0272), (25, 26, 0.0323),
    (25, 37, 0.0232), (26, 27, 0.0147), (26, 28, 0.0474), (26, 29, 0.0625),
    (28, 29, 0.0151), (29, 38, 0.0156),
]


def device(bus, strategy, params=None):
    d = {"bus": bus, "strategy": strategy}
    if params:
        d["params"] = params
    d["operating_point"] = {"ud": 1.0, "uq": 0.0, "id": 0.5, "iq": 0.0}
    return d


def build(scale, extra):
    devices = [device(b, "pll_pq") for b in range(1, 9)]
    devices.append(device(39, "ideal_source", {"l_f": 1e-4, "r_f": 1e-5}))
    return {
        "omega0_rad_s": 2 * math.pi * 60,
        "tau": 0.1,
        "buses": list(range(1, 40)),
        "branches": [{"from": f, "to": t, "l_pu": round(x * scale, 10)} for f, t, x in BRANCHES],
        "devices": devices,
        "retained": [1, 2, 3, 4, 5, 6, 7, 8, 39],
        "extra_device": device(9, extra),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scale", type=float, default=10.0)
    ap.add_argument("--extra", default="droop")
    ap.add_argument("-o", "--output", default="data/ieee39.json")
    args = ap.parse_args()
    with open(args.output, "w") as fh:
        json.dump(build(args.scale, args.extra), fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
