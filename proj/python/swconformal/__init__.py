"""Structure-weighted conformal treatment-effect intervals.

Thin python layer over the C++ core: synthetic generators, dataset and
prior I/O, pipeline runs (single and multi-seed), the scripted experiment
drivers, and the conformal primitives. Reports are plain dicts mirroring
the CLI's JSON schema.
"""

try:
    from ._swconformal import *  # noqa: F401,F403  (installed layout)
    from ._swconformal import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension lives beside the package
    from _swconformal import *  # noqa: F401,F403
    from _swconformal import __version__  # noqa: F401

__all__ = [
    "Dataset",
    "EdgePrior",
    "uniform_prior",
    "gen_synthetic_scm",
    "inject_collider",
    "load_dataset",
    "save_dataset",
    "load_prior",
    "save_prior",
    "scm_oracle_prior",
    "run_pipeline",
    "multi_seed_report",
    "dump_ensemble",
    "run_collider_stress",
    "run_washout",
    "run_calibration_sweep",
    "run_k_sweep",
    "composite_score",
    "conformal_quantile",
]
