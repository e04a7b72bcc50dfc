"""Fringe analysis of screen densities.

Profiles are z-marginals of a density field over an x window. Visibility
is the textbook ``(I_max - I_min)/(I_max + I_min)`` evaluated on the
extrema flanking the centre of the window. A profile only counts as
fringed when it shows at least two maxima and two minima; two slit images
separated by a single dip are not an interference pattern.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.fft as sfft
from scipy.ndimage import uniform_filter1d
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from .core import DensityField, FringeReport, trapezoid_weights

PROMINENCE = 1e-3


class Profile(NamedTuple):
    z: np.ndarray
    values: np.ndarray


class Visibility(NamedTuple):
    value: float
    flat: bool


class Period(NamedTuple):
    period: float
    spacing: float
    spacing_stderr: float
    count: int


def z_marginal(d: DensityField, x_window: tuple | None = None) -> Profile:
    """Integrate the density over ``x_window`` (inclusive) for every z node.

    Node weights come from the full-grid trapezoid rule, so marginals over
    complementary windows add up to the full marginal exactly.
    """
    x = d.grid.x
    w = trapezoid_weights(d.grid.nx, d.grid.dx)
    if x_window is not None:
        lo, hi = x_window
        mask = (x >= lo) & (x <= hi)
        if not mask.any():
            raise ValueError(f"x window {x_window} contains no grid nodes")
        w = np.where(mask, w, 0.0)
    return Profile(d.grid.z, w @ d.values)


def x_marginal(d: DensityField) -> np.ndarray:
    return d.values @ trapezoid_weights(d.grid.nz, d.grid.dz)


def _refine(u: np.ndarray, v: np.ndarray, idx: int) -> float:
    # vertex of the parabola through three neighbouring samples
    if idx <= 0 or idx >= len(v) - 1:
        return float(u[idx])
    a, b, c = v[idx - 1], v[idx], v[idx + 1]
    den = a - 2.0 * b + c
    if den == 0:
        return float(u[idx])
    return float(u[idx] + 0.5 * (a - c) / den * (u[1] - u[0]))


def extrema(values: np.ndarray, prominence: float = PROMINENCE):
    """Indices of maxima and minima with prominence above ``prominence * max|values|``."""
    scale = float(np.max(np.abs(values)))
    if scale == 0:
        return np.array([], int), np.array([], int)
    prom = prominence * scale
    maxima, _ = find_peaks(values, prominence=prom)
    minima, _ = find_peaks(-values, prominence=prom)
    return maxima, minima


def _window(profile: Profile, z_window):
    z, v = profile
    if z_window is None:
        return z, v
    lo, hi = z_window
    mask = (z >= lo) & (z <= hi)
    return z[mask], v[mask]


def visibility(profile: Profile, z_window: tuple | None = None) -> Visibility:
    """Fringe visibility from the extremum nearest the window centre and its neighbours.

    Returns ``Visibility(0.0, True)`` when the window holds fewer than two
    maxima or fewer than two minima.
    """
    z, v = _window(profile, z_window)
    maxima, minima = extrema(v)
    if len(maxima) < 2 or len(minima) < 2:
        return Visibility(0.0, True)
    idx = np.sort(np.concatenate([maxima, minima]))
    centre = 0.5 * (z[0] + z[-1])
    k = int(np.argmin(np.abs(z[idx] - centre)))
    pairs = []
    for j in (k - 1, k + 1):
        if 0 <= j < len(idx):
            hi, lo = sorted((v[idx[k]], v[idx[j]]), reverse=True)
            if hi + lo > 0:
                pairs.append((hi - lo) / (hi + lo))
    if not pairs:
        return Visibility(0.0, True)
    return Visibility(float(np.clip(np.mean(pairs), 0.0, 1.0)), False)


def detrend(profile: Profile, period: float, floor: float = PROMINENCE) -> Profile:
    """Divide out the envelope: the profile over the exponential of its
    one-period moving average in log space.

    Averaging the logarithm removes a Gaussian envelope up to a constant,
    which a plain moving average does not. Values below ``floor`` times the
    maximum are clamped before taking the log.
    """
    z, v = profile
    size = max(3, int(round(period / (z[1] - z[0]))) | 1)
    lv = np.log(np.maximum(v, floor * v.max()))
    return Profile(z, np.exp(lv - uniform_filter1d(lv, size=size, mode="nearest")))


def _spectral_peak(z: np.ndarray, v: np.ndarray) -> float | None:
    # profiles that do not decay at the edges get a Hann taper against leakage
    y = v.astype(float)
    if max(y[0], y[-1]) > PROMINENCE * y.max():
        y = (y - y.mean()) * np.hanning(len(y))
    amp = lambda k: abs(np.sum(y * np.exp(-1j * k * z)))
    dz = z[1] - z[0]
    # zero padding only interpolates the coarse spectrum; the peak is refined below
    n = 8 * len(z)
    spectrum = np.abs(sfft.rfft(y, n=n))
    ks = 2.0 * np.pi * sfft.rfftfreq(n, d=dz)
    peaks, _ = find_peaks(spectrum)
    if len(peaks) == 0:
        return None
    i = peaks[np.argmax(spectrum[peaks])]
    res = minimize_scalar(lambda k: -amp(k), bounds=(ks[i - 1], ks[i + 1]),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def fringe_period(profile: Profile) -> Period | None:
    """Fringe period of a fringed profile, ``None`` otherwise.

    The period is ``2 pi / k`` with ``k`` the dominant non-zero spatial
    frequency of the profile. Consecutive-extremum spacing of the detrended
    profile is reported alongside; it is biased low when the envelope
    changes appreciably within one fringe.
    """
    z, v = profile
    raw_max, raw_min = extrema(v)
    if len(raw_max) < 2 or len(raw_min) < 2:
        return None
    k = _spectral_peak(z, v)
    if k is None or k <= 0:
        return None
    period = 2.0 * math.pi / k
    osc = detrend(profile, period)
    maxima, minima = extrema(osc.values - 1.0)
    pos_max = np.sort([_refine(z, osc.values, i) for i in maxima])
    pos_min = np.sort([_refine(z, -osc.values, i) for i in minima])
    gaps = np.concatenate([np.diff(pos_max), np.diff(pos_min)])
    gaps = gaps[gaps < 1.5 * period]
    if len(gaps) == 0:
        return Period(period, math.nan, math.nan, len(raw_max) + len(raw_min))
    stderr = float(np.std(gaps, ddof=1) / math.sqrt(len(gaps))) if len(gaps) > 1 else math.nan
    return Period(period, float(np.mean(gaps)), stderr, len(raw_max) + len(raw_min))


class Complementarity(NamedTuple):
    visibility: float
    deviation: float


def complementarity(dplus: Profile, dminus: Profile, reference: Profile | None = None) -> Complementarity:
    """Visibility of the summed lobe profiles, plus the largest relative deviation
    of that sum from ``reference`` (the eraser-off marginal)."""
    if dplus.z.shape != dminus.z.shape or not np.array_equal(dplus.z, dminus.z):
        raise ValueError("profiles are on different z grids")
    total = Profile(dplus.z, dplus.values + dminus.values)
    vis = visibility(total).value
    dev = math.nan
    if reference is not None:
        if not np.array_equal(reference.z, dplus.z):
            raise ValueError("reference profile is on a different z grid")
        ref = reference.values
        mask = ref > 1e-300
        dev = float(np.max(np.abs(total.values[mask] - ref[mask]) / ref[mask]))
    return Complementarity(vis, dev)


def antiphase_offset(dplus: Profile, dminus: Profile, reference: Profile, count: int = 3) -> float:
    """Largest distance from one of the ``count`` most central maxima of the
    upper lobe's oscillation to the nearest minimum of the lower lobe's.

    A lobe's oscillation is its departure from half the eraser-off marginal
    ``reference``.
    """
    z = dplus.z
    op = dplus.values - 0.5 * reference.values
    om = dminus.values - 0.5 * reference.values
    pmax, _ = extrema(op)
    _, mmin = extrema(om)
    if len(pmax) == 0 or len(mmin) == 0:
        return math.inf
    a = np.array([_refine(z, op, i) for i in pmax])
    b = np.array([_refine(z, -om, i) for i in mmin])
    centre = 0.5 * (z[0] + z[-1])
    a = a[np.argsort(np.abs(a - centre))[:count]]
    return float(max(np.min(np.abs(b - u)) for u in a))


class Lobes(NamedTuple):
    centers: list
    split: float | None


def find_lobes(d: DensityField) -> Lobes:
    """Locate the two dominant x-lobes; the split sits at the density minimum between them."""
    x = d.grid.x
    m = x_marginal(d)
    peaks, props = find_peaks(np.concatenate([[-np.inf], m, [-np.inf]]),
                              prominence=PROMINENCE * m.max())
    peaks = peaks - 1
    if len(peaks) < 2:
        top = int(np.argmax(m))
        return Lobes([_refine(x, m, top)], None)
    order = np.argsort(props["prominences"])[::-1][:2]
    i, j = sorted(peaks[order])
    seg = m[i:j + 1]
    low = np.flatnonzero(seg == seg.min()) + i
    # ties go to the node closest to x = 0
    split_idx = int(low[np.argmin(np.abs(x[low]))])
    centers = sorted([_refine(x, m, i), _refine(x, m, j)], reverse=True)
    return Lobes(centers, float(x[split_idx]))


def lobe_windows(d: DensityField, lobes: Lobes) -> list:
    """x windows ``[(upper lobe), (lower lobe)]`` partitioning the grid at the split."""
    g = d.grid
    if lobes.split is None:
        return [(g.x_min, g.x_max)]
    x = g.x
    k = int(np.argmin(np.abs(x - lobes.split)))
    # the split node belongs to the upper lobe only
    return [(x[k], g.x_max), (g.x_min, x[k - 1] if k > 0 else g.x_min)]


class Distinguishability(NamedTuple):
    value: float
    single_lobe: bool


def distinguishability(d: DensityField) -> Distinguishability:
    """One minus the overlap of the two x-lobes.

    Each lobe's tail across the split is estimated by mirroring its outer
    flank about the lobe peak; for symmetric lobes the overlap
    ``int min(p+, p-) dx`` of the normalized lobes is the sum of those two
    normalized tails.
    """
    lobes = find_lobes(d)
    if lobes.split is None:
        return Distinguishability(0.0, True)
    x = d.grid.x
    m = x_marginal(d)
    w = trapezoid_weights(d.grid.nx, d.grid.dx)
    upper, lower = lobes.centers
    s = lobes.split
    mass_upper = float(w @ (m * (x >= s)))
    mass_lower = float(w @ (m * (x < s)))
    tail_upper = float(w @ (m * (x >= 2 * upper - s)))
    tail_lower = float(w @ (m * (x <= 2 * lower - s)))
    overlap = tail_upper / mass_upper + tail_lower / mass_lower
    return Distinguishability(float(np.clip(1.0 - overlap, 0.0, 1.0)), False)


def analyze(d: DensityField, reference: DensityField | None = None) -> FringeReport:
    """Lobe positions, per-lobe visibility, period of the upper lobe,
    visibility of the lobes summed, and distinguishability for one screen."""
    lobes = find_lobes(d)
    profiles = [z_marginal(d, w) for w in lobe_windows(d, lobes)]
    vis = [visibility(pr).value for pr in profiles]
    per = fringe_period(profiles[0])
    ref_profile = z_marginal(reference) if reference is not None else None
    lower = profiles[1] if len(profiles) == 2 else Profile(profiles[0].z, np.zeros_like(profiles[0].values))
    comp = complementarity(profiles[0], lower, ref_profile)
    dist = distinguishability(d)
    return FringeReport(
        lobe_centers=[float(c) for c in lobes.centers],
        visibility_per_lobe=[float(v) for v in vis],
        fringe_period=None if per is None else per.period,
        complementarity=float(comp.visibility),
        distinguishability=float(dist.value),
        fringe_spacing=None if per is None else per.spacing,
        reference_deviation=None if reference is None else float(comp.deviation),
        single_lobe=dist.single_lobe,
    )
