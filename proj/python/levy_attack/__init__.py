"""Decision-based black-box adversarial attack with alpha-stable proposals."""

import json as _json

from ._core import (
    AttackConfig,
    AttackResult,
    Bounds,
    DomainError,
    FormatError,
    IdxImages,
    IoError,
    Label,
    LabeledDataset,
    LevyError,
    MlpModel,
    NormKind,
    OracleHandle,
    Rng,
    StableParams,
    SweepReport,
    SweepSettings,
    Termination,
    TracePoint,
    TrainOptions,
    TrainResult,
    aggregate,
    analytic_cf,
    assemble_dataset,
    derive_seed,
    empirical_cf,
    impulsiveness_ratio,
    load_idx_images,
    load_idx_labels,
    load_model,
    lp_norm,
    make_synthetic_blobs,
    perturbation_sparsity,
    quantile,
    run_attack,
    run_sweep,
    sample_scalar,
    sample_vector,
    save_model,
    train_toy_classifier,
    write_report,
)

__version__ = "0.1.0"


def sweep_report_dict(report):
    """Return a sweep report as a plain dict matching the JSON schema."""
    return _json.loads(report.json)
