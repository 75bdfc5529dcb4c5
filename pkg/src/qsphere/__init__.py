"""Quantum SU(2), the standard Podles sphere, quantum fuzzy spheres, and
their metric geometry.

Layers:

* ``qscalar``    scalar modes for the deformation parameter (float64,
                 exact rationals, extended precision)
* ``pbw``        normal-form arithmetic in the coordinate algebra
* ``peter_weyl`` corepresentation matrix coefficients and the GNS basis
* ``hopf``       enveloping-algebra actions and derivation matrices
* ``podles``     sphere subalgebra, localised states, Berezin transform
* ``qmetric``    norm estimation, Lip-norms, spectrum metric, distance
                 bounds
* ``verify``     runnable invariant suites
* ``cli``        command-line harness
"""

from .qscalar import QParam, Scalar, bracket, s_power, sqrt_scalar
from .pbw import (AlgebraElement, Bidegree, Monomial, adjoint,
                  bidegree_components, degree, element, from_json, gen, haar,
                  inner, is_podles, max_coeff_diff, modular_nu, multiply, one,
                  project_phi0, reordered_a_product, to_json, zero)
from .peter_weyl import (TensorPairSum, UIndex, UVector, adjoint_uvector,
                         basis_vector, coproduct, expand, generate_u,
                         l2_norm_sq, left_mult_generator, left_mult_terms,
                         to_element, u_entry, u_middle, unitarity_residual,
                         uvector_diff)
from .hopf import (DerivationMatrix, act_delta, act_delta_pbw, act_partial,
                   act_partial_pbw, conjugate_by_u, delta3, delta_matrix,
                   fundamental_u, fundamental_u_star, mat2_mul, pairing,
                   pairing_pbw, partial_matrix, tau, twisted_commutator)
from .podles import (BerezinCoefficients, FuzzyBasis, berezin, berezin_coeff,
                     berezin_coefficients, berezin_element, counit,
                     definitional_berezin, fuzzy_basis, generators_podles,
                     state_hN)
from .qmetric import (DISTANCE_CSV_HEADER, DistanceReport, MKResult,
                      NormEstimate, OptimizerConfig, TruncationConfig,
                      XqPoint, compression, distq_upper, dq_upper,
                      dq_upper_classical_closed_form, dq_upper_pbw, f_func,
                      g_func, gns_norm, h_transform, lipnorm, mk_lower,
                      mult_matrix, rho_q, spectral_weights)

__version__ = "0.1.0"
