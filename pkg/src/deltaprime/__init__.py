"""Delta-prime interactions as limits of three delta interactions and of
squeezed potentials, on the real line.

Resolvent kernels are compared at the spectral point ``k = i kappa``.  The
building blocks are closed-form kernels (:mod:`.kernels`), the Krein formula
for finite delta arrays (:mod:`.delta_arrays`), bound states
(:mod:`.spectra`), jet arithmetic for expansion identities (:mod:`.series`),
squeezed potentials and their constants (:mod:`.potentials`), an exact
transfer-matrix Schrodinger solver (:mod:`.schrodinger`) and kernel
distances with convergence studies (:mod:`.convergence`).
"""
from .convergence import (
    ConvergenceReport,
    StudyId,
    fit_rate,
    hs_distance,
    measure_c_gamma,
    op_norm_estimate,
    study,
)
from .delta_arrays import (
    ArrayResolvent,
    CouplingConfig,
    DeltaArray,
    GammaMatrix,
    array_resolvent_kernel,
    cs_couplings,
    cs_couplings_perturbed,
    cs_gamma_inverse,
    cs_gamma_matrix,
    gamma_det,
    gamma_inverse,
    gamma_matrix,
    uvw,
)
from .errors import *  # noqa: F401,F403
from .kernels import (
    DeltaPrimeResolvent,
    DirichletResolvent,
    FreeResolvent,
    KernelModel,
    SpectralPoint,
    delta_prime_kernel,
    dirichlet_kernel,
    free_kernel,
    signed_kernel,
)
from .potentials import (
    PotentialShape,
    ScaledPotential,
    c_of_a,
    form_t,
    make_shape,
    parse_shape,
    tau,
    tau_alpha,
    w12_norm,
    w_eval,
)
from .schrodinger import (
    DecayingSolutionPair,
    PiecewiseConstantPotential,
    PotentialResolvent,
    decaying_solutions,
    discretize,
    potential_resolvent_kernel,
)
from .series import ExpansionId, Jet, gamma_inv_jet, jet_D, jet_N, verify_expansion
from .spectra import BoundState, a0_threshold, find_bound_states, secular_residuals

__version__ = "0.1.0"
