"""Minimum-cost protection policies for secret states of discrete-event systems."""

from importlib import resources

from .core import (
    Alphabet,
    Plant,
    PlantError,
    Policy,
    Protectable,
    Relabeled,
    Supervisor,
    Unprotectable,
    check_plant,
    erase_relabels,
    language_equivalent,
    reachable_states,
    step_string,
    validate_plant,
)
from .synth import SynthesisResult, build_spec, rcmc, rcmc1, relabel, supcon
from .verify import is_m_securely_reachable, least_k, min_protected_count, verify_policy

__version__ = "0.1.0"


def paper_plant_text() -> str:
    """Source of the bundled two-LAN network model."""
    return resources.files(__name__).joinpath("data", "paper.des").read_text(encoding="utf-8")


def paper_plant() -> Plant:
    from .io import parse_plant

    return parse_plant(paper_plant_text())
