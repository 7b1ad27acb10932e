"""Monte Carlo harness and command line interface."""
from .config import ExperimentConfig, load_config
from .experiments import (ExperimentReport, aggregate, derived_seed,
                          run_experiment, run_testing_bound)

__all__ = ["ExperimentConfig", "ExperimentReport", "aggregate", "derived_seed",
           "load_config", "run_experiment", "run_testing_bound"]
