"""Gaussian-state entanglement on commutative and noncommutative planes."""
from .symplectic_core import (Basis, VarianceMatrix, partial_transpose, symplectic_spectrum,
                              williamson, is_physical_commutative, standard_form)
from .commutative_states import Pair1D, Pair2D, nu_ppt_1d, nu_ppt_2d, log_negativity
from .nc_kinematics import WavePacket, single_particle_ppt, minimize_xx_uncertainty
from .nc_bipartite import NCPair, nc_blocks, effective_blocks, ppt_branch_eigs, nc_pair_report

__version__ = "0.1.0"
