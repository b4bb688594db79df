"""Support classes for type hinting."""
from typing import List, TypedDict


class TolerancesPayload(TypedDict, total=False):
    exact: float
    quadrature: float
    weight: float


class MeasurementPayload(TypedDict, total=False):
    thetas: List[float]
    T_m: float
    time_points: int
    # in units of T_m
    t_start: float
    t_stop: float
    # H0 eigenvalue on the spin up and spin down sectors
    energies: List[float]


class RelstatePayload(TypedDict, total=False):
    samples: int
    max_dim: int
    max_blocks: int


class OscillatorPayload(TypedDict, total=False):
    m: float
    k: float
    hbar: float
    # A/σ of the reference packet
    amplitude_ratio: float
    periods: float
    samples: int
    # σ²/A² of the scaling study
    ratios: List[float]
    steps_per_period: int


class X3PEigenPayload(TypedDict, total=False):
    lambdas: List[float]
    hbar: float


class RelposPayload(TypedDict, total=False):
    masses: List[float]
    p0: float
    width: float
    hbar: float


class ConfigPayload(TypedDict, total=False):
    scenario: str
    seed: int
    output_dir: str
    plots: bool
    tolerances: TolerancesPayload
    measurement: MeasurementPayload
    relstate: RelstatePayload
    oscillator: OscillatorPayload
    x3p_eigen: X3PEigenPayload
    relpos: RelposPayload


class CheckRow(TypedDict):
    scenario: str
    name: str
    computed: str
    expected: str
    tolerance: str
    passed: str
    provenance: str
    detail: str
