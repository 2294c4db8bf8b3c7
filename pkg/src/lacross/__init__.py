"""La-cross LDPC codes, teleported-gate circuit compilation, and decoding."""

from .bposd import DecodeConfig, DecodeResult, TannerGraph, decode, decode_batch
from .builders import (
    build_generic_gadget,
    build_hadamard_gadget,
    build_memory_experiment,
)
from .circuit import Circuit, NoiseModel
from .codes import BaconShorCode, LaCrossCode, build_bacon_shor, build_lacross, code_distance
from .dem import DetectorErrorModel, MalformedDemError, extract_dem
from .frames import FrameSampler
from .harness import (
    ExperimentConfig,
    ResultRow,
    ThresholdEstimate,
    normalize_per_round,
    run_experiment,
    threshold_scan,
)
from .logicals import (
    PartitionError,
    logical_basis,
    representative_partition,
    verify_partition,
)
from .tableau import DeterminismError, tableau_simulate

__version__ = "0.1.0"

__all__ = [
    "BaconShorCode",
    "Circuit",
    "DecodeConfig",
    "DecodeResult",
    "DetectorErrorModel",
    "DeterminismError",
    "ExperimentConfig",
    "FrameSampler",
    "LaCrossCode",
    "MalformedDemError",
    "NoiseModel",
    "PartitionError",
    "ResultRow",
    "TannerGraph",
    "ThresholdEstimate",
    "build_bacon_shor",
    "build_generic_gadget",
    "build_hadamard_gadget",
    "build_lacross",
    "build_memory_experiment",
    "code_distance",
    "decode",
    "decode_batch",
    "extract_dem",
    "logical_basis",
    "normalize_per_round",
    "representative_partition",
    "run_experiment",
    "tableau_simulate",
    "threshold_scan",
    "verify_partition",
]
