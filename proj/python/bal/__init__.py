"""Balanced active-learning selection engine."""

import json as _json

from . import _core
from ._core import (
    BalError,
    FeatureMatrix,
    FormatError,
    InvalidArgument,
    PoolExhausted,
    RunState,
    beta_feasible,
    kmeans,
    read_csv,
    read_fmat,
    read_run_dir,
    score_rows,
    select_cluster,
    select_confidence,
    select_entropy,
    select_random,
    sort_scores,
    subpool_class_balance,
    subpool_window,
    synth_generate,
    write_fmat,
)


def _config_text(config):
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def normalize_config(config=None):
    """Full config with defaults filled in, as a dict."""
    return _json.loads(_core.normalize_config(_config_text(config)))


def run_bal(matrix, config=None, eval=None):
    return _core.run_bal(_config_text(config), matrix, eval)


def run_baseline_random(matrix, config=None, eval=None):
    return _core.run_baseline_random(_config_text(config), matrix, eval)


def write_run_dir(path, state, config=None):
    _core.write_run_dir(str(path), _config_text(config), state)
