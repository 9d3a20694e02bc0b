//! Walk-shape census, motif counting, random graph models and asymptotic
//! theory for closed walks in large sparse graphs.

pub mod canon;
pub mod embed;
pub mod error;
pub mod extend;
pub mod generators;
pub mod graph;
pub mod motif;
pub mod netbuild;
pub mod rng;
pub mod sampler;
pub mod shapes;
pub mod theory;

pub use canon::{canonical_form, canonicalize, CanonicalCode, SmallGraph};
pub use embed::{graph_walk_density, ind_count, subgraph_count};
pub use error::{Error, Result};
pub use extend::{extend_walk, extensions_of, is_fully_extended, shape_poset, ShapePoset};
pub use generators::{GraphModel, Kernel, KernelModel, PowerLawModel};
pub use graph::{load_edge_list, EdgeListGraph, Graph, NodeSet};
pub use motif::{closed_walk_count, cycle_count, motif_census, nb_closed_walk_count, scale_summaries, CensusResult};
pub use netbuild::{
    aggregate_url_network, ingest_messages, restricted_damerau_levenshtein, windowed_similarity_network, MessageRecord,
    WindowSpec,
};
pub use sampler::{
    export_samples, render_violin, replicate_count, select_sizes, summarize, violin, ScaleSamples, SizeSelection,
    SummaryConfig, ViolinSummary,
};
pub use shapes::{census, classify_walk, enumerate_walk_shapes, ClosedWalk, WalkShape};
pub use theory::{
    dominant_shapes_kernel, dominant_shapes_nb, empirical_dominance_fraction, expected_ind_kernel, expected_x_powerlaw,
    k_star, rate_experiment, regime_powerlaw, DominanceReport, PowerLawRegime, RateConfig,
};

