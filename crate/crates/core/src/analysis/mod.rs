//! Aggregation of metric series across seeds and problems, rank tables,
//! tour-bound verification and plot data.

mod aggregate;
mod bound;
mod plot;
mod rank;

pub use aggregate::{aggregate, aggregate_normalized_otsd, group_by_method, mean_and_sem, problem_means, Measure, MeanSeries, ProblemScores};
pub use bound::{uniform_traces, verify_otsd_bound, verify_point_sets, BoundReport, BoundRow, BOUND_NOTICE, BOUND_VIOLATION};
pub use plot::{emit_plot_data, WideTable};
pub use rank::{fractional_ranks_desc, mean_relative_ranking, RankDirection, RankTable};
