"""Closeness-centrality circuit partitioning for distributed state-vector runs.

The pipeline: parse OpenQASM into a Circuit, build the tensor contraction
graph, score dimension lines by closeness centrality, recursively split the
circuit against a memory hierarchy, lower the tree to an execution plan, and
run the plan on simulated ranks.
"""

from .centrality import CentralityTable, closeness, compute_reach
from .executor import (
    DistState,
    RunResult,
    compare,
    gather,
    oracle_simulate,
    run_plan,
    scatter,
)
from .gates import GATE_SIGNATURES, GateTensor, gate_tensor
from .graph import ContractionGraph, DimIndex, build_graph, insert_barriers
from .partitioner import (
    MemoryHierarchy,
    Partition,
    PartitionTree,
    make_hierarchy,
    partition,
)
from .plan import ExecutionPlan, Task, lower
from .qasm import Circuit, GateApp, QasmError, parse

__version__ = "0.1.0"

__all__ = [
    "GATE_SIGNATURES",
    "CentralityTable",
    "Circuit",
    "ContractionGraph",
    "DimIndex",
    "DistState",
    "ExecutionPlan",
    "GateApp",
    "GateTensor",
    "MemoryHierarchy",
    "Partition",
    "PartitionTree",
    "QasmError",
    "RunResult",
    "Task",
    "build_graph",
    "closeness",
    "compare",
    "compute_reach",
    "gate_tensor",
    "gather",
    "insert_barriers",
    "lower",
    "make_hierarchy",
    "oracle_simulate",
    "parse",
    "partition",
    "run_plan",
    "scatter",
    "__version__",
]
