"""Loaders, file formats, experiment sweeps and the CLI."""

from .experiment import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    apply_sweep,
    build_instance,
    determinism_digest,
    load_config,
    parse_config,
    run_algorithm,
    run_experiment,
    synthetic_vertex_cover,
)
from .io import (
    COLUMNS,
    FormatError,
    ResultRow,
    format_rows,
    load_features,
    load_graph,
    load_instance,
    load_knapsack,
    load_partition,
    parse_matroid_spec,
    parse_rows,
    save_instance,
)
