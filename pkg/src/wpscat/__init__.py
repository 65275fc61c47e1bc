"""Wave packet transforms and phase-space scattering diagnostics for Schrodinger dynamics."""
from .dynamics import PotentialSpec, PropagatorConfig, evolve_full, free_propagate, poschl_teller
from .grid import Field, GridSpec, fourier_forward, fourier_inverse, inner_product, l2_norm, make_grid
from .regions import build_mask, make_region, masked_norm, sheared_wpt
from .wavepacket import Window, annulus_window, gaussian_packet, gaussian_window, wpt_forward, wpt_inverse

__version__ = "0.1.0"
