#!/usr/bin/env python3
"""Decay of the potential term on the good and outgoing regions (slow: a few minutes)."""
import argparse

from wpscat import PotentialSpec, annulus_window, make_grid
from wpscat.lab import cone_domination, lemma32_decay_scan, lemma33_cone_scan, probe_battery


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=2.0)
    ap.add_argument("--skip-cone", action="store_true")
    args = ap.parse_args()
    V = PotentialSpec("inverse_poly", C=1.0, delta=args.delta)

    a, R = 12.0, 2.0
    g = make_grid(1, 1024.0, 16384)
    w = annulus_window(g, a / 12, a / 6, sharpness=8.0)
    s = lemma32_decay_scan(V, w, probe_battery(g, a, R), a, R, [5, 7, 10, 14, 20, 28, 40, 50],
                           power_iterations=20)
    print("complement of Gamma_{a,R}:", " ".join(f"{v:.2e}" for v in s.values))
    print(f"  fitted exponent {s.fit_exponent:.3f}")
    if args.skip_cone:
        return

    a = 10.0
    g = make_grid(1, 700.0, 8192)
    w = annulus_window(g, a / 12, a / 6, sharpness=8.0)
    curves = {}
    for b in (10.0, 20.0):
        curves[b] = lemma33_cone_scan(V, w, probe_battery(g, a, b), a, b, 1, [5, 10, 18, 20, 28, 30, 40, 50],
                                      x_stride=8, power_iterations=10)
        print(f"outgoing cone b={b:g}: fitted exponent {curves[b].fit_exponent:.3f}")
    ok, rows = cone_domination(curves[10.0], curves[20.0], 10.0)
    print(f"shifted-curve domination: {ok}")
    for s_, v2, v1 in rows:
        print(f"  s={s_:g}: b=20 {v2:.2e} vs b=10 at s-10 {v1:.2e}")


if __name__ == "__main__":
    main()
