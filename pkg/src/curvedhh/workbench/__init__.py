"""Scenario files, task runners, JSON reports and the `workbench` command."""

from .report import SCHEMA, Report, compare_golden, load_report, run
from .scenario import TASK_KINDS, RingSpec, Scenario, TaskSpec, load_scenario, parse_scenario
from .tasks import TASKS, Context

__all__ = ["SCHEMA", "Report", "compare_golden", "load_report", "run", "TASK_KINDS", "RingSpec",
           "Scenario", "TaskSpec", "load_scenario", "parse_scenario", "TASKS", "Context"]
