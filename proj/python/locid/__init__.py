"""Local identification toolkit for nonparametric and semiparametric conditional moment models."""

import json as _json

from ._locid import (  # noqa: F401
    ConfigError,
    LocidError,
    ccapm_eigenpair,
    cone_rule_suite,
    counterexample,
    index_diagnose,
    list_experiments,
    mc_injectivity,
    partial_out,
    perron_frobenius,
    quantile_model,
    run_experiment_json,
    svd,
)


def run_experiment(config):
    """Run an experiment from a config dict or JSON string; returns the report as a dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(run_experiment_json(text))
