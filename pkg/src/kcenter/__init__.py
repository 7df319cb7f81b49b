"""k-center heuristics, an exact oracle and adversarial instance search."""

from .core import (
    Assignment,
    Instance,
    InstanceError,
    InstanceTooLarge,
    Point,
    Solution,
    assign,
    distance,
    evaluate_objective,
    solve_exact,
)
from .solvers import (
    SolverConfig,
    SolverKind,
    SolveTrace,
    one_center,
    solve,
    solve_backtrack,
    solve_dragoon,
    solve_greedy,
    solve_macqueen,
    solve_two_approx,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment", "Instance", "InstanceError", "InstanceTooLarge", "Point", "Solution",
    "assign", "distance", "evaluate_objective", "solve_exact",
    "SolverConfig", "SolverKind", "SolveTrace", "one_center", "solve",
    "solve_backtrack", "solve_dragoon", "solve_greedy", "solve_macqueen", "solve_two_approx",
]
