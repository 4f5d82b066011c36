"""Exact p-adic arithmetic for the rank-1 theta transfer: Schwartz
functions, Weil representation operators, hyperboloid fiber volumes, the
Whittaker/X orbital-integral transfer, and unramified L-factor bookkeeping.
"""

from .errors import (BadPrime, ConfigError, CosetEnumerationFailure,
                     DimensionMismatch, MetaplecticAmbiguity, NeedsRefinement,
                     NonStabilizing, NormalizationFailure, NotSelfDual,
                     PoleAtS, SingularFiber, WeilTransferError)
from .exactnum import CYC_ONE, CYC_ZERO, CycNum
from .lfactor import (EulerProduct, SatakeData, adjoint_lfactor,
                      assembly_check, chi_perp, dirichlet_factor, lx_sharp,
                      orth_group_order, std_lfactor, volume_x, zeta_factor)
from .padic import (ball_volume, hilbert_symbol, legendre, p_power_half,
                    psi_char, valuation)
from .quadspace import DensityResult, QuadSpace, catalog_space, non_residue
from .schwartz import SchwartzFn, fourier
from .transfer import (XTestFn, basic_f_value, hecke_cosets, hecke_translate,
                       orbital_truncation, p_value, restrict_x,
                       transfer_transform, whittaker_orbital,
                       x_transfer_value)
from .weil import (ELT_W, SL2Elt, act_element, act_factors, act_torus,
                   act_unipotent, act_weyl, apply_isometry, bruhat_factor,
                   elt_n, elt_t, weil_index)

__version__ = "0.1.0"

__all__ = [
    "BadPrime", "CYC_ONE", "CYC_ZERO", "ConfigError",
    "CosetEnumerationFailure", "CycNum", "DensityResult",
    "DimensionMismatch", "ELT_W", "EulerProduct", "MetaplecticAmbiguity",
    "NeedsRefinement", "NonStabilizing", "NormalizationFailure",
    "NotSelfDual", "PoleAtS", "QuadSpace", "SL2Elt", "SatakeData",
    "SchwartzFn", "SingularFiber", "WeilTransferError", "XTestFn",
    "act_element", "act_factors", "act_torus", "act_unipotent", "act_weyl",
    "adjoint_lfactor", "apply_isometry", "assembly_check", "ball_volume",
    "basic_f_value", "bruhat_factor", "catalog_space", "chi_perp",
    "dirichlet_factor", "elt_n", "elt_t", "fourier", "hecke_cosets",
    "hecke_translate", "hilbert_symbol", "legendre", "lx_sharp",
    "non_residue", "orbital_truncation", "orth_group_order", "p_power_half",
    "p_value", "psi_char", "restrict_x", "std_lfactor", "transfer_transform",
    "valuation", "volume_x", "weil_index", "whittaker_orbital",
    "x_transfer_value", "zeta_factor",
]
