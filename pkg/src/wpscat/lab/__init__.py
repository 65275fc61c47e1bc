"""Numerical experiments built on the transform and the propagators."""
from .bound_states import bound_state_solve
from .diagnostics import bound_overlap_series, classify_state, duhamel_residual, scat_diagnostic
from .lemmas import (cone_domination, kuroda_envelope_check, lemma32_decay_scan, lemma33_cone_scan,
                     probe_battery)
from .series import ConvergenceTable, DiagnosticSeries, Thresholds
from .wave_operators import cook_wave_operator, inverse_wave_limit
