"""Workbench for hardware-native Ising-model optimization.

Builds Pegasus-topology random instances, solves them with a roster of
classical heuristics plus an exhaustive oracle, and benchmarks solvers by
relative difference and time-to-match.
"""

from .bench import (BenchmarkGrid, MatchReport, SolverSpec, relative_difference,
                    run_grid, runtime_ratios, time_to_match, write_report_csv)
from .exact import OracleResult, brute_force
from .instances import (InstanceSpec, Mask, ParseError, generate, generate_over,
                        read_instance, write_instance)
from .lp_export import export_ilp, export_iqp
from .model import (InputError, IsingModel, QuboModel, binary_from_spins,
                    delta_energy, energy, from_qubo, hardware_admissible,
                    is_complete, qubo_energy, random_spins, spins_from_binary,
                    to_qubo, unassigned_spins)
from .pegasus import PegasusTopology, apply_mask, pegasus, write_adjacency_csv
from .schedule import ScheduleTable, read_schedule_csv, write_schedule_csv
from .solvers import (SOLVER_NAMES, default_betas, glauber, min_sum, pt_icm,
                      run_solver, scd, simulated_annealing, svmc, tabu,
                      tuned_betas)
from .solvers.physics import measure_swap_acceptance, tune_betas
from .traces import SolveTrace, SolverBudget, monotone_envelope, write_trace_csv

__version__ = "0.1.0"

__all__ = [
    "IsingModel", "QuboModel", "InputError", "ParseError",
    "energy", "delta_energy", "to_qubo", "from_qubo", "qubo_energy",
    "random_spins", "unassigned_spins", "is_complete",
    "spins_from_binary", "binary_from_spins", "hardware_admissible",
    "PegasusTopology", "pegasus", "apply_mask", "write_adjacency_csv",
    "InstanceSpec", "Mask", "generate", "generate_over",
    "read_instance", "write_instance",
    "ScheduleTable", "read_schedule_csv", "write_schedule_csv",
    "SolveTrace", "SolverBudget", "monotone_envelope", "write_trace_csv",
    "scd", "glauber", "tabu", "simulated_annealing",
    "svmc", "pt_icm", "min_sum", "default_betas", "tuned_betas",
    "tune_betas", "measure_swap_acceptance", "run_solver", "SOLVER_NAMES",
    "OracleResult", "brute_force", "export_iqp", "export_ilp",
    "BenchmarkGrid", "SolverSpec", "MatchReport", "relative_difference",
    "time_to_match", "runtime_ratios", "run_grid", "write_report_csv",
]
