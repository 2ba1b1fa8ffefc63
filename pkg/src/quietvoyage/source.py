"""Ship source-level spectra per decidecade band and broadband aggregation.

Levels are monopole source levels in dB re 1 uPa at 1 m.  The model is a
regression spectrum per ship class with power-law corrections for speed
(60 log10 v/vT) and length (20 log10 l/300 ft).  The published model carries
a +/-6 dB (rms) statistical uncertainty; it is reported as metadata here and
never added to computed levels.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Nominal decidecade (one-third-octave) band centers, 12.5 Hz .. 10 kHz.
BAND_CENTERS_HZ: tuple[float, ...] = (
    12.5, 16.0, 20.0, 25.0, 31.5, 40.0, 50.0, 63.0, 80.0, 100.0,
    125.0, 160.0, 200.0, 250.0, 315.0, 400.0, 500.0, 630.0, 800.0, 1000.0,
    1250.0, 1600.0, 2000.0, 2500.0, 3150.0, 4000.0, 5000.0, 6300.0, 8000.0, 10000.0,
)

N_BANDS = len(BAND_CENTERS_HZ)

MODEL_UNCERTAINTY_DB_RMS = 6.0

REFERENCE_LENGTH_FT = 300.0

FEET_PER_METER = 1.0 / 0.3048


class ShipClass(enum.Enum):
    FISHING = "Fishing"
    TUG = "Tug"
    NAVAL = "Naval"
    RECREATIONAL = "Recreational"
    GOVERNMENT_RESEARCH = "GovernmentResearch"
    CRUISE = "Cruise"
    PASSENGER = "Passenger"
    BULKER = "Bulker"
    CONTAINERSHIP = "Containership"
    VEHICLE_CARRIER = "VehicleCarrier"
    TANKER = "Tanker"
    DREDGER = "Dredger"
    OTHER = "Other"


#: Class reference speed vT in knots.
REFERENCE_SPEED_KT: dict[ShipClass, float] = {
    ShipClass.FISHING: 6.4,
    ShipClass.TUG: 3.7,
    ShipClass.NAVAL: 11.1,
    ShipClass.RECREATIONAL: 10.6,
    ShipClass.GOVERNMENT_RESEARCH: 8.0,
    ShipClass.CRUISE: 17.1,
    ShipClass.PASSENGER: 9.7,
    ShipClass.BULKER: 13.9,
    ShipClass.CONTAINERSHIP: 18.0,
    ShipClass.VEHICLE_CARRIER: 15.8,
    ShipClass.TANKER: 12.4,
    ShipClass.DREDGER: 9.5,
    ShipClass.OTHER: 7.4,
}

#: Classes that switch to the low-frequency cargo spectrum below 100 Hz.
CARGO_CLASSES = frozenset(
    {ShipClass.CONTAINERSHIP, ShipClass.VEHICLE_CARRIER, ShipClass.BULKER, ShipClass.TANKER}
)

_CARGO_D = {
    ShipClass.CONTAINERSHIP: 0.8,
    ShipClass.BULKER: 0.8,
    ShipClass.VEHICLE_CARRIER: 1.0,
    ShipClass.TANKER: 1.0,
}


def ship_class_for_ais(ais_type_id: int, length_ft: float = REFERENCE_LENGTH_FT) -> ShipClass:
    """Map an AIS type id (and length, for the 60-69 passenger split) to a class.

    Ids 70 and 75-79 are ambiguous between bulkers and containerships when only
    the id is known; they resolve to Containership here, and bulkers are reached
    through an explicit ship_class field.  Unmatched ids map to Other.
    """
    if ais_type_id < 0:
        raise ValueError(f"ais_type_id must be >= 0, got {ais_type_id}")
    if ais_type_id == 30:
        return ShipClass.FISHING
    if ais_type_id in (31, 32, 52):
        return ShipClass.TUG
    if ais_type_id == 33:
        return ShipClass.DREDGER
    if ais_type_id == 35:
        return ShipClass.NAVAL
    if ais_type_id in (36, 37):
        return ShipClass.RECREATIONAL
    if ais_type_id in (51, 53, 55):
        return ShipClass.GOVERNMENT_RESEARCH
    if 60 <= ais_type_id <= 69:
        length_m = length_ft / FEET_PER_METER
        return ShipClass.CRUISE if length_m > 100.0 else ShipClass.PASSENGER
    if 70 <= ais_type_id <= 79:
        return ShipClass.CONTAINERSHIP
    if 80 <= ais_type_id <= 89:
        return ShipClass.TANKER
    return ShipClass.OTHER


def reference_speed(ais_type_id: int, length_ft: float = REFERENCE_LENGTH_FT) -> float:
    """Reference speed vT in knots for an AIS type id (total via Other)."""
    return REFERENCE_SPEED_KT[ship_class_for_ais(ais_type_id, length_ft)]


@dataclass(frozen=True)
class ShipSpec:
    """Static ship properties used by the source model and the optimizer."""

    name: str
    ais_type_id: int
    ship_class: ShipClass
    length_ft: float
    v_min_kt: float
    v_max_kt: float

    def __post_init__(self):
        if self.length_ft <= 0:
            raise ValueError(f"length_ft must be positive, got {self.length_ft}")
        if not 0 < self.v_min_kt <= self.v_max_kt:
            raise ValueError(f"need 0 < v_min <= v_max, got [{self.v_min_kt}, {self.v_max_kt}]")

    @property
    def reference_speed_kt(self) -> float:
        return REFERENCE_SPEED_KT[self.ship_class]


def baseline_spectrum(f_hz: float, ship_class: ShipClass) -> float:
    """Class baseline level at frequency ``f_hz`` for a ship sailing at vT.

    The bracket is evaluated as ((1 - (f/f1)^2)^2 + D^2) in both branches; the
    unsquared form goes negative above f1*sqrt(1+D^2) and has no real level.
    """
    if f_hz <= 0:
        raise ValueError(f"frequency must be positive, got {f_hz}")
    v_t = REFERENCE_SPEED_KT[ship_class]
    if ship_class in CARGO_CLASSES and f_hz < 100.0:
        f1 = 600.0 / v_t
        k = 208.0
        d = _CARGO_D[ship_class]
        ratio = f_hz / f1
        return (
            k
            - 40.0 * math.log10(ratio)
            + 10.0 * math.log10(f_hz)
            - 10.0 * math.log10((1.0 - ratio**2) ** 2 + d**2)
        )
    f1 = 480.0 / v_t
    k = 191.0
    d = 4.0 if ship_class is ShipClass.CRUISE else 3.0
    ratio = f_hz / f1
    return k - 20.0 * math.log10(f1) - 10.0 * math.log10((1.0 - ratio**2) ** 2 + d**2)


def source_level(f_hz: float, v_kt: float, length_ft: float, ship_class: ShipClass) -> float:
    """Band source level: baseline + 60 log10(v/vT) + 20 log10(l/300 ft)."""
    if v_kt <= 0:
        raise ValueError(f"speed must be positive, got {v_kt}")
    if length_ft <= 0:
        raise ValueError(f"length must be positive, got {length_ft}")
    v_t = REFERENCE_SPEED_KT[ship_class]
    return (
        baseline_spectrum(f_hz, ship_class)
        + 60.0 * math.log10(v_kt / v_t)
        + 20.0 * math.log10(length_ft / REFERENCE_LENGTH_FT)
    )


def source_spectrum(v_kt: float, spec: ShipSpec) -> np.ndarray:
    """All 30 band source levels for a ship state, as a vector."""
    return np.array(
        [source_level(f, v_kt, spec.length_ft, spec.ship_class) for f in BAND_CENTERS_HZ]
    )


def broadband_level(levels_db) -> float:
    """Power-sum a vector of band levels: 10 log10 sum 10^(L/10).

    Bands at -inf carry zero power and are effectively excluded.
    """
    levels = np.asarray(levels_db, dtype=float)
    if levels.size == 0:
        raise ValueError("broadband_level needs at least one band")
    if np.any(np.isnan(levels)) or np.any(levels == np.inf):
        raise ValueError("band levels must not be NaN or +inf")
    return float(10.0 * np.log10(np.sum(np.power(10.0, levels / 10.0))))


def write_spectrum_csv(path: str | Path, levels_db: np.ndarray) -> None:
    """Export a 30-band spectrum as (frequency_hz, level_db) rows."""
    lines = ["frequency_hz,level_db"]
    for f, level in zip(BAND_CENTERS_HZ, levels_db):
        lines.append(f"{f!r},{float(level)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
