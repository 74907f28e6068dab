"""Negativity-based witnessing of non-Markovian qubit dynamics."""
from .dynamics import ENMParams, PauliChannel, RateFunctions, enm_channel, enm_inverse, enm_rates, integrate_rates
from .divisibility import ChoiMatrix, choi_of, enm_decomposition, enm_intermediate_choi, is_cp
from .states import bell_state, negativity, trace_distance
from .witness import WitnessScenario, build_scenario, witness_negativity

__all__ = [
    "ChoiMatrix",
    "ENMParams",
    "PauliChannel",
    "RateFunctions",
    "WitnessScenario",
    "bell_state",
    "build_scenario",
    "choi_of",
    "enm_channel",
    "enm_decomposition",
    "enm_intermediate_choi",
    "enm_inverse",
    "enm_rates",
    "integrate_rates",
    "is_cp",
    "negativity",
    "trace_distance",
    "witness_negativity",
]
__version__ = "0.1.0"
