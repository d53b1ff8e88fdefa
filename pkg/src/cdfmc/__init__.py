"""Modulation classification from the CDF of normalized received amplitudes."""

from cdfmc.constellation import (
    Constellation,
    ModulationFormat,
    amplitude_levels,
    constellation_points,
)
from cdfmc.channel import ChannelConfig, SampleBlock, osnr_to_snr, simulate_block
from cdfmc.features import (
    AmplitudeGrid,
    EmpiricalCdf,
    empirical_cdf,
    normalized_amplitudes,
    reference_cdf_analytic,
    reference_cdf_mc,
)
from cdfmc.classifier import (
    ClassificationResult,
    ReferenceBank,
    build_reference_bank,
    cdf_distance,
    classify,
)

__version__ = "0.1.0"

from cdfmc.harness import (  # noqa: E402  (harness reads __version__)
    ExperimentSpec,
    RequiredOsnr,
    SweepResult,
    merge_results,
    required_osnr,
    run_cell,
    run_sweep,
)

__all__ = [
    "AmplitudeGrid",
    "ChannelConfig",
    "ClassificationResult",
    "Constellation",
    "EmpiricalCdf",
    "ExperimentSpec",
    "ModulationFormat",
    "ReferenceBank",
    "RequiredOsnr",
    "SampleBlock",
    "SweepResult",
    "amplitude_levels",
    "build_reference_bank",
    "cdf_distance",
    "classify",
    "constellation_points",
    "empirical_cdf",
    "merge_results",
    "normalized_amplitudes",
    "osnr_to_snr",
    "reference_cdf_analytic",
    "reference_cdf_mc",
    "required_osnr",
    "run_cell",
    "run_sweep",
    "simulate_block",
]
