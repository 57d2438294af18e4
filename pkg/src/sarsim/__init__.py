"""Deadline-aware offloading of vehicle tasks to heterogeneous edge servers."""

from .engine import EngineConfig, PoraSettings, SimulationReport, run
from .model import ConfigurationError, Task, TaskState, task_is_processed
from .rsp import RspKind, RspPolicy, select_pu
from .tsp import TspKind, TspPolicy, order_queue

__all__ = [
    "ConfigurationError",
    "EngineConfig",
    "PoraSettings",
    "RspKind",
    "RspPolicy",
    "SimulationReport",
    "Task",
    "TaskState",
    "TspKind",
    "TspPolicy",
    "order_queue",
    "run",
    "select_pu",
    "task_is_processed",
]
