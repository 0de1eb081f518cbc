"""Joint-sparse support recovery with SOMP: algorithms, coherence tools,
closed-form recovery guarantees and a seeded Monte-Carlo harness."""

from .coherence import CoherenceReport, erc_constant, mutual_coherence, welch_bound
from .dictionary import (
    GaussianNoise,
    MeasurementMatrix,
    RowSparseSignal,
    SpectralBoundedNoise,
    design_low_coherence,
    gaussian_matrix,
    gen_signal,
    gen_signal_dynamic_range,
    sample_noise,
)
from .somp import RecoveryTrace, Termination, recovery_success, somps, sompt

__version__ = "0.1.0"
