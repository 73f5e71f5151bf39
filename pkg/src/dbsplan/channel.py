"""Access-layer path loss (GN-DBS) and FSO backhaul rate (BS-BS) models.

All functions are vectorised over distances: they accept floats or numpy
arrays and return the same shape.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy.special import erf

SPEED_OF_LIGHT = 299_792_458.0
GROUND_C0_SQ = 1.7e-14  # ground refractive-index structure constant, m^(-2/3)


class NoCoverageError(ValueError):
    """PL_max is below the path loss directly under the DBS."""


class CoverageSaturatedWarning(UserWarning):
    """PL_max is never reached inside the area; radius clamped to the diagonal."""


@dataclass(frozen=True)
class AccessParams:
    h: float = 60.0
    alpha: float = 9.61
    beta: float = 0.16
    eta_los: float = 1.0
    eta_nlos: float = 20.0
    f_c: float = 2e9
    pl_max: float = 110.0
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"DBS height must be positive, got {self.h}")
        if not self.f_c > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.f_c}")
        if not (self.eta_nlos >= self.eta_los >= 0):
            raise ValueError("need eta_nlos >= eta_los >= 0")


@dataclass(frozen=True)
class FsoParams:
    """FSO link parameters in SI units (metres, watts, radians)."""

    beam_waist: float = 0.0025
    kappa: float = 4.3e-4
    tx_power: float = 0.05
    wavelength: float = 1550e-9
    lens_radius: float = 0.1
    responsivity: float = 0.5
    noise_power: float = 10 ** (-60.1 / 10) / 1000
    c0_sq: float = GROUND_C0_SQ
    height: float = 60.0
    zeta_low: float = 1.0
    zeta_high: float = 2.0
    sigma_y: float = 1e-5
    sigma_z: float = 1e-5
    sigma_theta: float = 1e-5
    sigma_phi: float = 1e-5
    misalignment: float = 0.05
    d_max: float = 2500.0
    bandwidth: float = 1e9

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) and f.name != "d_max":
                raise ValueError(f"{f.name} must be finite, got {v}")
            if v < 0 or (v == 0 and f.name not in ("sigma_y", "sigma_z", "sigma_theta",
                                                   "sigma_phi", "misalignment", "height")):
                raise ValueError(f"{f.name} must be positive, got {v}")
        if self.zeta_low > self.zeta_high:
            raise ValueError("zeta_low must not exceed zeta_high")

    @property
    def zeta(self) -> float:
        return 0.5 * (self.zeta_low + self.zeta_high)

    def with_d_max(self, d_max: float) -> "FsoParams":
        return replace(self, d_max=d_max)


# --------------------------------------------------------------------------
# geometry

def distance_2d(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.hypot(p[..., 0] - q[..., 0], p[..., 1] - q[..., 1])


def distance_3d(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.sqrt(distance_2d(p, q) ** 2 + (p[..., 2] - q[..., 2]) ** 2)


def pairwise_2d(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :2] - pts[None, :, :2]
    return np.hypot(diff[..., 0], diff[..., 1])


def pairwise_3d(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1))


# --------------------------------------------------------------------------
# access layer

def elevation_deg(h, d_2d):
    return np.degrees(np.arctan2(h, np.asarray(d_2d, dtype=float)))


def p_los(params: AccessParams, d_2d):
    """Line-of-sight probability; the elevation angle is taken in degrees."""
    omega = elevation_deg(params.h, d_2d)
    return 1.0 / (1.0 + params.alpha * np.exp(-params.beta * (omega - params.alpha)))


def fspl_db(params: AccessParams, d_3d):
    d_3d = np.asarray(d_3d, dtype=float)
    if np.any(d_3d <= 0):
        raise ValueError("free-space path loss needs a positive distance")
    return 20.0 * np.log10(4.0 * np.pi * params.f_c * d_3d / params.c)


def expected_path_loss(params: AccessParams, d_3d, d_2d):
    """Mean path loss in dB mixing LOS and NLOS excess losses by ``p_los``."""
    plos = p_los(params, d_2d)
    return fspl_db(params, d_3d) + plos * params.eta_los + (1.0 - plos) * params.eta_nlos


def path_loss_at(params: AccessParams, d_2d):
    """Expected path loss to a ground node at horizontal distance ``d_2d``."""
    d_2d = np.asarray(d_2d, dtype=float)
    return expected_path_loss(params, np.hypot(d_2d, params.h), d_2d)


def coverage_radius(params: AccessParams, area_diagonal: float = 10_000 * math.sqrt(2),
                    xtol: float = 1e-9, max_iter: int = 200) -> float:
    """Horizontal radius at which the expected path loss reaches ``pl_max``.

    Raises :class:`NoCoverageError` when even the point directly below the
    DBS exceeds ``pl_max``. If ``pl_max`` is not reached within
    ``area_diagonal`` the diagonal is returned and a
    :class:`CoverageSaturatedWarning` is issued.
    """
    lo, hi = 0.0, float(area_diagonal)
    pl0 = float(path_loss_at(params, lo))
    if params.pl_max <= pl0:
        raise NoCoverageError(
            f"pl_max={params.pl_max} dB does not exceed the overhead loss {pl0:.4f} dB")
    if float(path_loss_at(params, hi)) <= params.pl_max:
        warnings.warn(f"pl_max={params.pl_max} dB not reached within {hi:.1f} m",
                      CoverageSaturatedWarning, stacklevel=2)
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if float(path_loss_at(params, mid)) < params.pl_max:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def coverage_indicator(d_2d, r_a):
    return (np.asarray(d_2d, dtype=float) < r_a).astype(int)


# --------------------------------------------------------------------------
# FSO backhaul

def atmospheric_loss(kappa, d):
    return 10.0 ** (-kappa * np.asarray(d, dtype=float) / 10.0)


def beam_width(params: FsoParams, d):
    d = np.asarray(d, dtype=float)
    k = 2.0 * np.pi / params.wavelength
    cn2 = params.c0_sq * math.exp(-params.height / 100.0)
    with np.errstate(divide="ignore"):
        rho = (0.55 * cn2 * k ** 2 * d) ** (-3.0 / 5.0)
        spread = (params.wavelength * d / (np.pi * params.beam_waist ** 2)) ** 2
        w0 = params.beam_waist
        return w0 * np.sqrt(1.0 + (1.0 + 2.0 * w0 ** 2 / rho ** 2) * spread)


def capture_fraction(params: FsoParams, d):
    """Largest fraction of beam power the receiver lens can collect."""
    v1 = params.lens_radius / beam_width(params, d) * math.sqrt(math.pi / 2.0)
    return erf(v1) ** 2


def gml(params: FsoParams, d):
    """Geometric and misalignment loss factor."""
    wd = beam_width(params, d)
    return capture_fraction(params, d) * np.exp(
        -2.0 * params.misalignment ** 2 / (params.zeta * wd ** 2))


def spectral_efficiency(params: FsoParams, d):
    """Unclamped rate in bit/s/Hz. May be negative at long range."""
    d = np.asarray(d, dtype=float)
    hp = atmospheric_loss(params.kappa, d)
    wd = beam_width(params, d)
    a0 = capture_fraction(params, d)
    snr = params.tx_power ** 2 / params.noise_power
    lam1 = params.sigma_y ** 2 + d ** 2 * params.sigma_theta ** 2
    lam2 = params.sigma_z ** 2 + d ** 2 * params.sigma_phi ** 2
    with np.errstate(divide="ignore"):
        log_term = 0.5 * np.log2(math.e / (2.0 * math.pi) * params.responsivity ** 2
                                 * hp ** 2 * snr * a0 ** 2)
    return log_term - 2.0 / (params.zeta * wd ** 2 * math.log(2.0)) * (lam1 + lam2)


def fso_rate(params: FsoParams, d):
    """Achievable backhaul rate in Mbps; zero at or beyond ``d_max``.

    Vectorised. Non-positive distances (the diagonal of a pairwise matrix)
    yield 0.
    """
    d = np.asarray(d, dtype=float)
    safe = np.where(d > 0, d, 1.0)
    mbps = np.maximum(spectral_efficiency(params, safe), 0.0) * params.bandwidth / 1e6
    out = np.where((d > 0) & (d < params.d_max), mbps, 0.0)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# parameter files (Table-II style names and units)

_ACCESS_KEYS = {
    "h": ("h", 1.0),
    "alpha": ("alpha", 1.0),
    "beta": ("beta", 1.0),
    "eta_los": ("eta_los", 1.0),
    "eta_nlos": ("eta_nlos", 1.0),
    "f_c": ("f_c", 1e9),  # GHz
    "pl_max": ("pl_max", 1.0),
}

_FSO_KEYS = {
    "omega_0": ("beam_waist", 1e-2),  # cm
    "kappa": ("kappa", 1.0),
    "P_FSO": ("tx_power", 1e-3),  # mW
    "lambda": ("wavelength", 1e-9),  # nm
    "r_0": ("lens_radius", 1.0),
    "eta": ("responsivity", 1.0),
    "C_0_sq": ("c0_sq", 1.0),
    "zeta_1": ("zeta_low", 1.0),
    "zeta_2": ("zeta_high", 1.0),
    "sigma_y": ("sigma_y", 1.0),
    "sigma_z": ("sigma_z", 1.0),
    "sigma_theta": ("sigma_theta", 1.0),
    "sigma_phi": ("sigma_phi", 1.0),
    "u": ("misalignment", 1.0),
    "d_max": ("d_max", 1.0),
    "bandwidth": ("bandwidth", 1e6),  # MHz
}


PARAM_NAMES = frozenset(_ACCESS_KEYS) | frozenset(_FSO_KEYS) | {"sigma_n2"}


def params_from_mapping(values: dict, access: AccessParams | None = None,
                        fso: FsoParams | None = None) -> tuple[AccessParams, FsoParams]:
    """Build parameter records from a Table-II style mapping.

    Units follow the table: ``f_c`` in GHz, ``omega_0`` in cm, ``P_FSO`` in mW,
    ``lambda`` in nm, ``sigma_n2`` in dBm, ``bandwidth`` in MHz. Keys not
    related to the channel are ignored.
    """
    access = access or AccessParams()
    fso = fso or FsoParams()
    a_kw, f_kw = {}, {}
    for key, value in values.items():
        if key in _ACCESS_KEYS:
            name, scale = _ACCESS_KEYS[key]
            a_kw[name] = float(value) * scale
        elif key in _FSO_KEYS:
            name, scale = _FSO_KEYS[key]
            f_kw[name] = float(value) * scale
        elif key == "sigma_n2":
            f_kw["noise_power"] = 10 ** (float(value) / 10) / 1000
    if "h" in a_kw and "height" not in f_kw:
        f_kw["height"] = a_kw["h"]
    return replace(access, **a_kw), replace(fso, **f_kw)


def params_to_mapping(access: AccessParams, fso: FsoParams) -> dict:
    out = {}
    for key, (name, scale) in _ACCESS_KEYS.items():
        out[key] = getattr(access, name) / scale
    for key, (name, scale) in _FSO_KEYS.items():
        out[key] = getattr(fso, name) / scale
    out["sigma_n2"] = 10 * math.log10(fso.noise_power * 1000)
    return out
