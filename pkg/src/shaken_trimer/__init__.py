"""Exact and period-averaged dynamics of dipolar bosons in a driven triple well."""
from .bessel import bessel_j, bessel_zero
from .effective import build_effective_hamiltonian, compare_stroboscopic, reachable_subspace
from .fock import FockState, build_basis
from .model import BASE_PARAMS, ModelParams, assemble_hamiltonian, check_resonance
from .planner import TunnelingPlan, plan, verify_plan
from .propagator import Trajectory, propagate

__version__ = "0.1.0"
