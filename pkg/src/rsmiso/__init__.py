"""Link-level simulator and analytical toolkit for the two-receiver MISO
broadcast channel with quantized channel feedback.

Subpackages / modules:
  numerics    special functions (exponential integral, incomplete gamma)
  channel     channel sampling, RVQ quantizer, precoder construction
  schemes     per-realization SINRs / rates and closed-form power splits
  montecarlo  ergodic-rate estimation engine with splittable RNG streams
  analytics   closed-form bounds, scaling laws and distribution functions
  cli         command-line surface (sweeps, bound tables, figure presets)
"""

__version__ = "0.1.0"
