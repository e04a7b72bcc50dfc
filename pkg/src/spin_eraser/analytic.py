"""Closed-form evolution of the double-slit spinor through the eraser setup.

The state leaving the slits is a product of an x-Gaussian with two
z-Gaussians at ``+z0`` (spin up along z) and ``-z0`` (spin down). Every
stage is exact for Gaussians:

* free flight adds ``i hbar dt / 2m`` to each complex width,
* a linear potential ``-F x`` shifts the packet by ``F T^2 / 2m`` and kicks
  it by ``F T`` (plus a global phase, kept so that the oracle can be
  compared amplitude by amplitude if needed),
* the eraser magnet acts in the S_x basis, the which-way magnet in S_z.

``density_no_eraser`` and ``density_eraser`` evaluate the screen patterns
from their own formulas; ``evaluate_state`` reaches the same numbers by
sampling the evolved state, and the test-suite checks one against the other.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .core import (
    Axis,
    Branch,
    ComplexGaussian,
    DensityField,
    GridSpec,
    PhysParams,
    SpinorState,
    validate_params,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


def spread_width(width0: float, t: float, m: float = 1.0, hbar: float = 1.0) -> float:
    """Probability width of a free Gaussian of initial width ``width0`` after time ``t``."""
    return math.sqrt(width0 ** 2 + (hbar * t / (2.0 * m * width0)) ** 2)


def lobe_offset(p: PhysParams, coupling: float, strict_eq12: bool = False) -> float:
    """x position of the deflected lobe at the screen.

    The magnet itself displaces by ``F t_e^2 / 2m``; the kick ``F t_e`` then
    carries the packet a further ``F t_e (t - t_i - t_e) / m``. ``strict_eq12``
    drops that drift.
    """
    shift = coupling * p.t_e ** 2 / (2.0 * p.m)
    if strict_eq12:
        return shift
    return shift + coupling * p.t_e * (p.t - p.t_i - p.t_e) / p.m


def fringe_period_exact(p: PhysParams, t: float | None = None) -> float:
    """Period in z of the cross-term cosine on the screen at time ``t``."""
    t = p.t if t is None else t
    if t <= 0 or p.z0 == 0:
        return math.inf
    tau = p.hbar * t / (2.0 * p.m)
    s2 = spread_width(p.sigma, t, p.m, p.hbar) ** 2
    return 2.0 * math.pi * p.sigma ** 2 * s2 / (p.z0 * tau)


# -- single packets ---------------------------------------------------------

def free_gaussian(g: ComplexGaussian, dt: float, m: float, hbar: float) -> ComplexGaussian:
    if dt == 0:
        return g
    w0 = complex(g.cwidth)
    w1 = w0 + 1j * hbar * dt / (2.0 * m)
    amp = complex(g.amp) * np.sqrt(w0 / w1) * np.exp(-1j * g.kphase ** 2 * dt / (2.0 * m * hbar))
    return ComplexGaussian(g.center + g.kphase * dt / m, w1, g.kphase, complex(amp))


def accelerate_gaussian(g: ComplexGaussian, force: float, duration: float,
                        m: float, hbar: float) -> ComplexGaussian:
    """Exact evolution under ``p^2/2m - force * u`` for ``duration``."""
    f = free_gaussian(g, duration, m, hbar)
    if force == 0:
        return f
    shift = force * duration ** 2 / (2.0 * m)
    phase = -f.kphase * shift - force ** 2 * duration ** 3 / (6.0 * m)
    return ComplexGaussian(
        f.center + shift,
        f.cwidth,
        f.kphase + force * duration,
        complex(f.amp) * np.exp(1j * phase / hbar),
    )


# -- states -----------------------------------------------------------------

def initial_state(p: PhysParams) -> SpinorState:
    """State just behind the slits: spin up at ``+z0``, spin down at ``-z0``."""
    validate_params(p, magnet=False)
    if p.z0 < 3.0 * p.sigma:
        warnings.warn(
            f"z0={p.z0} < 3 sigma: slit packets overlap", RuntimeWarning, stacklevel=2
        )
    ax = (2.0 * math.pi * p.omega ** 2) ** -0.25
    az = (2.0 * math.pi * p.sigma ** 2) ** -0.25
    xpacket = ComplexGaussian(0.0, p.omega ** 2 + 0j, 0.0, ax)
    upper = ComplexGaussian(p.z0, p.sigma ** 2 + 0j, 0.0, az)
    lower = ComplexGaussian(-p.z0, p.sigma ** 2 + 0j, 0.0, az)
    return SpinorState(
        Axis.Z,
        (
            Branch(+1, SQRT_HALF, xpacket, ((+1, upper),)),
            Branch(-1, SQRT_HALF, xpacket, ((+1, lower),)),
        ),
        p.hbar,
    )


def free_evolve(s: SpinorState, p: PhysParams, dt: float) -> SpinorState:
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return s
    branches = tuple(
        Branch(
            b.sign,
            b.coeff,
            free_gaussian(b.xpacket, dt, p.m, p.hbar),
            tuple((sg, free_gaussian(g, dt, p.m, p.hbar)) for sg, g in b.zparts),
        )
        for b in s.branches
    )
    return SpinorState(s.basis, branches, s.hbar)


def magnet_evolve(s: SpinorState, p: PhysParams, coupling: float, duration: float) -> SpinorState:
    """Evolve through a magnet with potential ``-coupling * x * sigma``.

    ``sigma`` is the Pauli matrix along the state's own basis, so each branch
    feels the force ``sign * coupling`` along x.
    """
    branches = tuple(
        Branch(
            b.sign,
            b.coeff,
            accelerate_gaussian(b.xpacket, b.sign * coupling, duration, p.m, p.hbar),
            tuple((sg, free_gaussian(g, duration, p.m, p.hbar)) for sg, g in b.zparts),
        )
        for b in s.branches
    )
    return SpinorState(s.basis, branches, s.hbar)


def _rotate(s: SpinorState, target: Axis) -> SpinorState:
    if not s.branches:
        return SpinorState(target, (), s.hbar)
    ref = s.branches[0].xpacket
    if any(not b.xpacket.same_shape(ref) for b in s.branches):
        raise ValueError("basis change needs a common x-packet on all branches")

    # |+a> = (|+b> + |-b>)/sqrt2 and |-a> = (|+b> - |-b>)/sqrt2 for a, b in {Z, X}
    collected = {+1: [], -1: []}
    for b in s.branches:
        xratio = complex(b.xpacket.amp) / complex(ref.amp)
        for sg, g in b.zparts:
            w = complex(b.coeff) * xratio * sg
            for new_sign in (+1, -1):
                factor = SQRT_HALF if new_sign == 1 else b.sign * SQRT_HALF
                bucket = collected[new_sign]
                for item in bucket:
                    if item[1].same_shape(g):
                        item[0] += factor * w * complex(g.amp) / complex(item[1].amp)
                        break
                else:
                    bucket.append([factor * w, g])

    scale = max(abs(w) for bucket in collected.values() for w, _ in bucket)
    branches = []
    for new_sign in (+1, -1):
        terms = collected[new_sign]
        terms = [(w, g) for w, g in terms if abs(w) > 1e-14 * scale]
        if not terms:
            continue
        coeff = terms[0][0]
        zparts = []
        for w, g in terms:
            r = w / coeff
            sg = 1 if r.real >= 0 else -1
            r = r * sg
            if abs(r - 1.0) > 1e-15:
                g = g.scaled(r)
            zparts.append((sg, g))
        branches.append(Branch(new_sign, coeff, ref, tuple(zparts)))
    return SpinorState(target, tuple(branches), s.hbar)


def basis_rewrite_sx(s: SpinorState) -> SpinorState:
    """Re-express a Z-basis state in the S_x eigenbasis."""
    if s.basis is not Axis.Z:
        raise ValueError("state is already in the X basis")
    return _rotate(s, Axis.X)


def basis_rewrite_sz(s: SpinorState) -> SpinorState:
    if s.basis is not Axis.X:
        raise ValueError("state is already in the Z basis")
    return _rotate(s, Axis.Z)


def _strip_drift(s: SpinorState, p: PhysParams, coupling: float) -> SpinorState:
    shift = lobe_offset(p, coupling, strict_eq12=True)
    branches = tuple(
        Branch(b.sign, b.coeff,
               ComplexGaussian(b.sign * shift, b.xpacket.cwidth, b.xpacket.kphase, b.xpacket.amp),
               b.zparts)
        for b in s.branches
    )
    return SpinorState(s.basis, branches, s.hbar)


def _magnet_schedule(p: PhysParams, axis: Axis, coupling: float, strict_eq12: bool) -> SpinorState:
    validate_params(p, magnet=True)
    s = free_evolve(initial_state(p), p, p.t_i)
    if axis is Axis.X:
        s = basis_rewrite_sx(s)
    s = magnet_evolve(s, p, coupling, p.t_e)
    s = free_evolve(s, p, p.t - p.t_i - p.t_e)
    if strict_eq12:
        s = _strip_drift(s, p, coupling)
    return s


def eraser_evolve(p: PhysParams, strict_eq12: bool = False) -> SpinorState:
    """X-basis state on the screen with the eraser magnet switched on."""
    return _magnet_schedule(p, Axis.X, p.beta, strict_eq12)


def whichway_state(p: PhysParams, strict_eq12: bool = False) -> SpinorState:
    """Z-basis state on the screen when a field ``B0 x`` along z replaces the eraser."""
    return _magnet_schedule(p, Axis.Z, p.b0, strict_eq12)


def whichway_evolve(p: PhysParams, g: GridSpec, strict_eq12: bool = False) -> DensityField:
    return evaluate_state(whichway_state(p, strict_eq12), g)


def evaluate_state(s: SpinorState, g: GridSpec) -> DensityField:
    x, z = g.x, g.z
    rho = np.zeros(g.shape)
    for b in s.branches:
        amp = b.on_grid(x, z, s.hbar)
        rho += amp.real ** 2 + amp.imag ** 2
    return DensityField(g, rho)


# -- screen densities from the closed forms ---------------------------------

def _normal(u, center, width):
    return np.exp(-((u - center) ** 2) / (2.0 * width ** 2)) / (math.sqrt(2.0 * math.pi) * width)


def _z_terms(p: PhysParams, z: np.ndarray):
    sz = spread_width(p.sigma, p.t, p.m, p.hbar)
    upper = _normal(z, p.z0, sz)
    lower = _normal(z, -p.z0, sz)
    tau = p.hbar * p.t / (2.0 * p.m)
    cross = (
        np.exp(-(z ** 2 + p.z0 ** 2) / (2.0 * sz ** 2)) / (math.sqrt(2.0 * math.pi) * sz)
        * np.cos(z * p.z0 * tau / (p.sigma ** 2 * sz ** 2))
    )
    return upper, lower, cross


def density_no_eraser(p: PhysParams, g: GridSpec) -> DensityField:
    """Screen density without the eraser: two incoherently added slit images."""
    validate_params(p, magnet=False)
    sx = spread_width(p.omega, p.t, p.m, p.hbar)
    upper, lower, _ = _z_terms(p, g.z)
    return DensityField(g, 0.5 * np.outer(_normal(g.x, 0.0, sx), upper + lower))


def density_eraser(p: PhysParams, g: GridSpec, strict_eq12: bool = False) -> DensityField:
    """Screen density with the eraser on: two x-lobes carrying antiphase fringes."""
    validate_params(p, magnet=True)
    sx = spread_width(p.omega, p.t, p.m, p.hbar)
    offset = lobe_offset(p, p.beta, strict_eq12)
    upper, lower, cross = _z_terms(p, g.z)
    plus = np.outer(_normal(g.x, offset, sx), upper + lower + 2.0 * cross)
    minus = np.outer(_normal(g.x, -offset, sx), upper + lower - 2.0 * cross)
    return DensityField(g, np.clip(0.25 * (plus + minus), 0.0, None))


def screen_grid(p: PhysParams, nx: int = 512, nz: int = 512, widths: float = 8.0,
                scenario: str = "eraser") -> GridSpec:
    """Symmetric box holding the screen pattern with ``widths`` standard deviations to spare."""
    sx = spread_width(p.omega, p.t, p.m, p.hbar)
    sz = spread_width(p.sigma, p.t, p.m, p.hbar)
    coupling = {"eraser": p.beta, "delayed": p.beta, "whichway": p.b0}.get(scenario, 0.0)
    offset = lobe_offset(p, coupling) if coupling and p.t >= p.t_i + p.t_e else 0.0
    xh = math.ceil(abs(offset) + widths * sx)
    zh = math.ceil(p.z0 + widths * sz)
    return GridSpec(-xh, xh, nx, -zh, zh, nz)
