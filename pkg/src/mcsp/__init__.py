"""Exact ILP models and solvers for the minimum common string partition problem."""

from .catalog import BlockSet, CommonBlock, SubstringCatalog, build_blocks, build_catalog, count_variables
from .instance import Instance, generate_instance, parse_instance
from .model import IpModel, build_cb, build_cs
from .polyhedral import lift_cs_to_cb, project_cb_to_cs
from .simplex import LpSolution, LpStatus, solve_lp
from .solve import (Solution, SolveReport, branch_and_bound, brute_force, greedy_solution,
                    trivial_solution, verify)

__all__ = [
    "BlockSet", "CommonBlock", "Instance", "IpModel", "LpSolution", "LpStatus", "Solution",
    "SolveReport", "SubstringCatalog", "branch_and_bound", "brute_force", "build_blocks",
    "build_catalog", "build_cb", "build_cs", "count_variables", "generate_instance",
    "greedy_solution", "lift_cs_to_cb", "parse_instance", "project_cb_to_cs", "solve_lp",
    "trivial_solution", "verify",
]
