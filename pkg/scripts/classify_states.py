#!/usr/bin/env python3
"""Classify a bound state and a wave-operator image under several windows and regions."""
from wpscat import PropagatorConfig, gaussian_packet, gaussian_window, make_grid, poschl_teller
from wpscat.lab import bound_state_solve, classify_state, cook_wave_operator
from wpscat.regions import KaN

g = make_grid(1, 256.0, 2048)
V = poschl_teller(1.0)
cfg = PropagatorConfig(0.01)
E, ground = bound_state_solve(V, g)
print(f"ground state energy {E:.10f}")
image, _ = cook_wave_operator(gaussian_packet(g, 2.0, 0.0, 3.0), 0.0, V, [5, 10, 20, 40], cfg)

for name, state in (("ground state", ground), ("Cook image", image)):
    for width in (1.0, 2.0):
        w = gaussian_window(g, width)
        ar = classify_state(state, 0.0, V, w, 0.5, 10, 50, cfg, 2)
        kan = classify_state(state, 0.0, V, w, 0.5, 10, 50, cfg, 2, region=KaN(0.5, 10))
        print(f"{name:<13} window width {width:g}: GammaAR {ar:<16} KaN {kan}")
