"""Unit conversions applied once, at the configuration boundary."""

from scipy import constants

EV = constants.electron_volt  # J per eV
NM = constants.nano
MM = constants.milli
BAR = constants.bar
W_CM2 = 1.0e4  # W/m^2 per W/cm^2


def ev_to_joule(value: float) -> float:
    return value * EV


def joule_to_ev(value: float) -> float:
    return value / EV


def nm_to_m(value: float) -> float:
    return value * NM


def mm_to_m(value: float) -> float:
    return value * MM


def bar_to_pa(value: float) -> float:
    return value * BAR


def w_cm2_to_w_m2(value: float) -> float:
    return value * W_CM2


def w_m2_to_w_cm2(value: float) -> float:
    return value / W_CM2
