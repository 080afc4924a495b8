from .characterize import check_theorem_A, distribution_from_ode, growth_vector, recover_distribution
from .flat_model import build_flat_model
from .killing import calibrate_constant, decompose_killing, solve_polynomial_solutions

__version__ = "0.1.0"
