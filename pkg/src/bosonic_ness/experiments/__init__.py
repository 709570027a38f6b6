"""Sweeps, scaling fits, the local-equilibrium bound and the command line."""

from bosonic_ness.experiments.config import ConfigError, load_config, parse_config
from bosonic_ness.experiments.export import ExportError, export, read
from bosonic_ness.experiments.fit import (DecayFit, ScalingFit, fit_cmi_decay, fit_cmi_scaling,
                                         loglog_slope)
from bosonic_ness.experiments.kato import kato_bound
from bosonic_ness.experiments.presets import PRESETS, get_preset, run_preset
from bosonic_ness.experiments.sweep import SweepSpec, run_sweep, spec_from_config

__all__ = [
    "ConfigError", "load_config", "parse_config",
    "ExportError", "export", "read",
    "DecayFit", "ScalingFit", "fit_cmi_decay", "fit_cmi_scaling", "loglog_slope",
    "kato_bound",
    "PRESETS", "get_preset", "run_preset",
    "SweepSpec", "run_sweep", "spec_from_config",
]
