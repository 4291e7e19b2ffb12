"""Random-graph models of geographic dual graphs and their structural statistics.

The package measures degree, connectivity, planarity, spanning-tree counts,
and the probability that a uniform random spanning tree splits into k
balanced pieces, over both real dual-graph files and the grid / point-cloud
random graph models.
"""

from .errors import (
    DualGraphError,
    GraphFormatError,
    InputError,
    NumericalError,
    TrialCapExceeded,
)
from .graph import (
    ComponentDecomposition,
    DegreeStats,
    Graph,
    connected_components,
    degree_stats,
    largest_component,
)
from .io import load_graph, save_graph, write_rows
from .planarity import PlanarityVerdict, is_planar, verify_embedding, verify_kuratowski
from .spanning import (
    SpanningProfile,
    SpanningTree,
    log_spanning_tree_count,
    spanning_profile,
    spanning_tree_constant,
    wilson_ust,
)
from .splitting import (
    BalanceRule,
    SplitEstimate,
    default_rule,
    estimate_splittability,
    find_balanced_split,
    gbas_estimate,
    has_balanced_split,
    splittable_fraction_exact,
)
from .geometry import (
    PointCloud,
    Triangulation,
    delaunay,
    in_circumcircle,
    random_point_cloud,
)
from .models import (
    ModelSpec,
    Stage,
    build_model,
    model_catalog,
    parse_model_spec,
    perturbed_grid,
    resolve_model,
    square_grid,
    triangular_grid,
    tune_model1_base,
)
from .experiments import (
    RegressionFit,
    SweepConfig,
    loglog_fit,
    model_sweep,
    spanning_constant_sweep,
    splittability_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BalanceRule", "ComponentDecomposition", "DegreeStats", "DualGraphError",
    "Graph", "GraphFormatError", "InputError", "ModelSpec", "NumericalError",
    "PlanarityVerdict", "PointCloud", "RegressionFit", "SpanningProfile",
    "SpanningTree", "SplitEstimate", "Stage", "SweepConfig", "TrialCapExceeded",
    "Triangulation", "build_model", "connected_components", "default_rule",
    "degree_stats", "delaunay", "estimate_splittability", "find_balanced_split",
    "gbas_estimate", "has_balanced_split", "in_circumcircle", "is_planar",
    "largest_component", "load_graph", "log_spanning_tree_count", "loglog_fit",
    "model_catalog", "model_sweep", "parse_model_spec", "perturbed_grid",
    "random_point_cloud", "resolve_model", "save_graph", "spanning_constant_sweep",
    "spanning_profile", "spanning_tree_constant", "splittability_sweep",
    "splittable_fraction_exact", "square_grid", "triangular_grid",
    "tune_model1_base", "verify_embedding", "verify_kuratowski", "wilson_ust",
    "write_rows",
]
