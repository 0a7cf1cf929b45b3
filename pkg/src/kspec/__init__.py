"""kspec: estimate the number of communities in a network from the
spectra of its non-backtracking and Bethe Hessian operators."""

from .bench import (ExperimentOutcome, ExperimentPlan, eval_real, export,
                    load_plan, plan_from_dict, run_plan)
from .datasets import REGISTRY, load_dataset
from .eigen import (ComplexSpectrum, EigenConvergenceError, Inertia,
                    SymSpectrum, inertia_ldlt, nonsym_spectrum, sym_smallest)
from .estimators import (METHODS, EstimateReport, SolverConfig,
                         corrected_count, count_negative, estimate_all,
                         estimate_bh, estimate_nb)
from .graphs import (DegreeStats, Graph, degree_stats, from_edge_list,
                     largest_connected_component, load_edge_list,
                     parse_edge_list)
from .operators import (bethe_hessian, full_nonbacktracking, r_average,
                        r_moment, reduced_nonbacktracking)
from .randnet import (BlockModelSpec, EdgeProbabilityMatrix,
                      build_mean_matrix, planted_partition, sample,
                      size_ratio_proportions)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Graph", "DegreeStats", "from_edge_list", "parse_edge_list",
    "load_edge_list", "largest_connected_component", "degree_stats",
    "REGISTRY", "load_dataset",
    "BlockModelSpec", "EdgeProbabilityMatrix", "build_mean_matrix",
    "sample", "planted_partition", "size_ratio_proportions",
    "reduced_nonbacktracking", "full_nonbacktracking", "bethe_hessian",
    "r_moment", "r_average",
    "SymSpectrum", "ComplexSpectrum", "Inertia", "EigenConvergenceError",
    "sym_smallest", "inertia_ldlt", "nonsym_spectrum",
    "METHODS", "SolverConfig", "EstimateReport", "estimate_nb",
    "estimate_bh", "estimate_all", "count_negative", "corrected_count",
    "ExperimentPlan", "ExperimentOutcome", "plan_from_dict", "load_plan",
    "run_plan", "eval_real", "export",
]
