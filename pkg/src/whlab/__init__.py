"""whlab: numerical laboratory for Wiener-Hopf operators on weighted
function spaces over the half-line.

Core objects: uniform grids and sampled functions with twisted Fourier
transforms (`gridfn`), weight families and weighted/Orlicz norms
(`spaces`), translation-commuting operators with norms and growth rates
(`operators`), per-level symbols and their verification (`symbol`),
spectral-annulus certificates (`spectra`), and the finite-dimension
vector-valued extension with matrix weights (`vector`).
"""

from .gridfn import (FrequencyFunction, Grid, SampledFunction, embed,
                     forward_transform, inverse_transform, restrict,
                     strip_eval, twist)
from .operators import (BlackBoxOperator, FiniteSection, KernelOperator,
                        OperatorNorm, ShiftOperator, SpectralRadiusEstimate,
                        WienerHopfOperator, apply_modulation, apply_shift,
                        apply_wh, commutation_residual, fejer_approximant,
                        finite_section, operator_norm, recover_kernel,
                        spectral_radius, strip_interval, twisted_apply)
from .spaces import (AdmissibilityReport, OrliczFunction, SpaceSpec, Weight,
                     capped_exponential_weight, check_admissibility,
                     constant_weight, custom_weight, dyadic_zigzag_weight,
                     exponential_weight, lp_norm, luxemburg_norm, orlicz_power,
                     orlicz_exp_minus_one, power_weight, translation_norm)
from .spectra import (CutoffRequest, CutoffResult, NeumannBound,
                      SpectralCertificate, annulus_certificate, build_cutoff,
                      neumann_resolvent_bound, quasi_eigenvector,
                      recompute_witness_residual, section_witness,
                      shift_residual, symbol_spectrum_inclusion)
from .symbol import (AnalyticityReport, ExtractedSymbol, RepresentationReport,
                     StripBoundReport, StripSpec, SymbolTable,
                     build_symbol_table, extract_symbol, operator_symbol,
                     padded_grid, representation_probes, shift_symbol,
                     symbol_of_kernel, verify_analyticity,
                     verify_representation, verify_strip_bound)
from .vector import (MatrixKernel, MatrixWeightSymbolResult, OperatorSymbolLevel,
                     OperatorWeight, VectorBlackBoxOperator, VectorFunction,
                     VectorKernelOperator, VectorShiftOperator, VectorSpace,
                     identity_operator_weight, matrix_weight_symbol,
                     mixed_exponential_weight_5x5, operator_weight_norm,
                     scalarize, transform_pairing_check,
                     vector_representation_check, vector_spectral_radius,
                     vector_symbol)

__all__ = [name for name in dir() if not name.startswith("_")]
