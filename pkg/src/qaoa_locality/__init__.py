"""Exact light-cone simulation of the alternating-operator algorithm on
random regular graphs: per-edge expectations reduce to canonical-tree
computations whenever the edge's depth-radius neighborhood is a tree, which
makes ensemble-level predictions and ratio ceilings computable at desk
scale."""
from .errors import InputError, ResourceError
from .graphs import (
    CycleCensus,
    EnsembleSpec,
    Graph,
    Neighborhood,
    complete_bipartite_graph,
    complete_graph,
    count_cycles,
    cycle_graph,
    edge_neighborhood,
    generate_bipartite_regular,
    generate_regular,
    max_cut_of_bipartition,
    path_graph,
    read_edgelist,
    sample_graph,
    tree_edge_fraction,
    write_edgelist,
)
from .qaoa import (
    DEFAULT_QUBIT_CAP,
    INITIAL_STATES,
    MAXCUT,
    MIS,
    CostModel,
    QaoaParams,
    Statevector,
    apply_mixer,
    apply_phase,
    bit_values,
    bits_to_index,
    cost_table,
    cost_value,
    edge_cost,
    expect_edge,
    expect_total,
    index_to_bits,
    prepare_initial,
    run_qaoa,
    sample_bitstrings,
)
from .trees import (
    CanonicalTree,
    TreeExpectation,
    build_canonical_tree,
    neighborhood_expectation,
    predicted_ensemble_cost,
    tree_expectation,
    tree_vertex_count,
)
from .optimize import (
    DEFAULT_BUDGET,
    OptResult,
    SearchDomain,
    grid_search,
    optimize,
    refine,
)
from .experiments import (
    LITERATURE,
    SCHEMA_VERSION,
    LiteratureConstants,
    PruneResult,
    RatioReport,
    csv_from_report,
    cycle_census_experiment,
    cycle_oracle_mean,
    end_to_end,
    ensemble_equivalence,
    locality_check,
    make_report,
    prune,
    ratio_ceiling,
    report_json,
    tree_fraction_experiment,
)
from .rng import as_generator, derive_seeds

__version__ = "0.1.0"
