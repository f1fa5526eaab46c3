"""Mergeable streaming statistics with a cost model and benchmark harnesses."""

from .bench import (
    DESK_GRID,
    FULL_GRID,
    BenchConfig,
    BenchRecord,
    emit_csv,
    kendall_tau,
    run_cell,
    run_grid,
)
from .costmodel import (
    CalibrationError,
    CostBreakdown,
    CovarianceEffectiveness,
    OpCount,
    UnitCosts,
    calibrate_unit_costs,
    covariance_effectiveness,
    covariance_op_counts,
    covariance_time_difference,
    crossover_n1,
    predict_ross_time,
    predict_variance_times,
    ross_component_times,
    variance_op_counts,
)
from .decomposition import (
    COVARIANCE,
    DECOMPOSITIONS,
    MEAN,
    POPULATION_VARIANCE,
    Effectiveness,
    MergeDecomposition,
    decompose_check,
    generic_effectiveness,
)
from .stream import (
    IngestReport,
    MalformedLineError,
    RecordSchema,
    StreamConfig,
    generate_synthetic_stream,
    grid_search,
    ingest,
    parse_record,
    sample_stream_path,
    serve_feed,
)
from .summaries import (
    CovarianceSummary,
    MomentSummary,
    RemainderReport,
    merge_covariance,
    merge_population,
    merge_sample,
    remainder_population,
    remainder_sample,
    ross_update,
    summarize,
    summarize_pairs,
)

__version__ = "0.1.0"
