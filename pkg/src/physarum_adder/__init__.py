"""Single-bit full adder computed from the oscillation frequency of a particle
model of slime mould confined to arenas of different length."""
from .adder import (FRACTION_MAP, AdderInput, AdderOutput, CalibrationTable, calibrate,
                    classify_frequency, decode_bin, encode_bit_count, logical_full_add,
                    physical_full_add, ripple_add)
from .engine import RunConfig, dominant_flux_frequency, run_experiment, sweep
from .lattice import ArenaGeometry
from .particles import ModelParams

__version__ = "0.1.0"
