"""Two-step entanglement routing: serve the most user pairs, then maximize expected throughput."""

from .baselines import B1, FER, QPASS, GreedyPlan, PathMetric, greedy_route
from .lp import FractionalSolution, LpProblem, LpStatus, build_step1_lp, build_step2_lp, solve_lp
from .model import (
    CapacityExceeded,
    ChannelAssignment,
    InvalidArgument,
    InvalidPath,
    NetworkGraph,
    QuantumLink,
    RoutePath,
    SwitchNode,
    UserNode,
    UserPair,
    check_capacity,
    expected_throughput,
    link_success_prob,
    path_success_prob,
    plan_throughput,
    reserve_path,
)
from .montecarlo import McResult, simulate_throughput
from .oracle import InstanceTooLarge, brute_force_step1, brute_force_step2
from .paths import PathSetCatalog, selective_paths, yen_k_shortest
from .step1 import Step1Plan, Step1Search, recover_integer_step1, solve_step1
from .step2 import (
    SearchLimitExceeded,
    Step2Search,
    Step2Plan,
    recover_integer_step2,
    solve_step2,
    solve_throughput_direct,
)
from .topology import GenerationFailed, TopologyConfig, calibrate_alpha, generate_topology

__version__ = "0.1.0"
