"""Koopman tensor-network prediction for measure-preserving torus flows."""

from .lattice import MultiIndex, WavenumberLattice, build_lattice, position_of, shift
from .rkha import (FourierVector, RkhaParams, dirichlet_energy, kernel_eval,
                   markov_check, pointwise_product, power_n, rkha_inner,
                   subconvolutivity_constant, weight, weight_vector)
from .dynamics import FlowSpec, generator_matrix, true_flow, vector_field
from .spectrum import (SchemeKind, SpectralBasis, eigendecompose,
                       eigenfunction_values, mass_matrix, q_inverse,
                       regularized_generator, solve_gep)
from .features import (VonMisesParams, bessel_ratio, bessel_ratios,
                       root_feature, scaled_bessel_i, von_mises_eval,
                       von_mises_fourier)
from .predict import (DegenerateStateError, EvalGrid, PredictionContext,
                      classical_predict, error_field, fock_predict,
                      make_context, qm_predict, sample_observable,
                      true_predict, unitary_phases)
from .harness import (ExperimentConfig, run_check, run_convergence,
                      run_prediction, run_spectrum)

__all__ = [n for n in dir() if not n.startswith("_")]
