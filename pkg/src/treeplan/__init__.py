"""Tree-based open lists for agile heuristic search on STRIPS tasks."""
from .kernels import BACKEND
from .task import Operator, Task, build_task, is_goal, load_task, parse_task, successors, validate_plan

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Operator",
    "Task",
    "build_task",
    "is_goal",
    "load_task",
    "parse_task",
    "successors",
    "validate_plan",
]
