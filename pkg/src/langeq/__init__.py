"""Language-equation solving for sequential networks with partitioned BDD representations."""
from .dd import Func, Manager
from .errors import FormatError, LangEqError, ResourceLimitError, SolverTimeout, UsageError
from .netlist import Network, elaborate, latch_split, parse_blif_lite
from .solver import (Csf, Problem, make_problem, problem_from_networks, solve_monolithic,
                     solve_partitioned, verify_solution)

__version__ = "0.1.0"

__all__ = [
    "Func", "Manager",
    "FormatError", "LangEqError", "ResourceLimitError", "SolverTimeout", "UsageError",
    "Network", "elaborate", "latch_split", "parse_blif_lite",
    "Csf", "Problem", "make_problem", "problem_from_networks", "solve_monolithic",
    "solve_partitioned", "verify_solution",
]
