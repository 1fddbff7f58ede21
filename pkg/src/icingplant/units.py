"""Unit conversions at the plant's I/O boundary.

All internal computation is SI (m, kg, s, K, Pa).  Operator-facing values
use the plant's customary units instead:

    temperature   degC     <->  K        (K = degC + 273.15)
    water-flow    L/h      <->  m^3/s    (/ 3.6e6)
    air-flow      L/min    <->  m^3/s    (/ 6.0e4)
    pressure      bar      <->  Pa       (* 1.0e5)
    lwc           g/m^3    <->  kg/m^3   (/ 1.0e3)
    mvd           um       <->  m        (* 1.0e-6)

Only these six kinds exist; this is deliberately not a general units
library.
"""

from __future__ import annotations

KELVIN_OFFSET = 273.15

# kind -> multiplicative factor taking the boundary unit to SI
_FACTORS = {
    "water-flow": 1.0 / 3.6e6,
    "air-flow": 1.0 / 6.0e4,
    "pressure": 1.0e5,
    "lwc": 1.0e-3,
    "mvd": 1.0e-6,
}

UNIT_KINDS = ("temperature",) + tuple(_FACTORS)


def to_si(value: float, kind: str) -> float:
    """Convert a boundary-unit quantity to SI.

    Raises ValueError for an unknown kind.
    """
    if kind == "temperature":
        return value + KELVIN_OFFSET
    try:
        return value * _FACTORS[kind]
    except KeyError:
        raise ValueError(f"unknown unit kind: {kind!r} (expected one of {UNIT_KINDS})") from None


def from_si(value: float, kind: str) -> float:
    """Inverse of :func:`to_si`."""
    if kind == "temperature":
        return value - KELVIN_OFFSET
    try:
        return value / _FACTORS[kind]
    except KeyError:
        raise ValueError(f"unknown unit kind: {kind!r} (expected one of {UNIT_KINDS})") from None


def celsius_to_kelvin(t_c: float) -> float:
    return t_c + KELVIN_OFFSET


def kelvin_to_celsius(t_k: float) -> float:
    return t_k - KELVIN_OFFSET


def lph_to_m3s(q: float) -> float:
    """Water flow, L/h to m^3/s."""
    return q / 3.6e6


def m3s_to_lph(q: float) -> float:
    return q * 3.6e6


def lpm_to_m3s(q: float) -> float:
    """Air flow, L/min to m^3/s."""
    return q / 6.0e4


def m3s_to_lpm(q: float) -> float:
    return q * 6.0e4


def bar_to_pa(p: float) -> float:
    return p * 1.0e5


def pa_to_bar(p: float) -> float:
    return p / 1.0e5
