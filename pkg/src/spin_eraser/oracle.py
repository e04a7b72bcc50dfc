"""Grid-based split-operator propagation of the two-component spinor.

This is the brute-force check on ``analytic``: it knows nothing about
Gaussians, only the Hamiltonians

    free:      p_x^2/2m + p_z^2/2m
    eraser:    p_x^2/2m - beta x sigma_x + p_z^2/2m
    whichway:  p_x^2/2m - B0 x sigma_z + p_z^2/2m

on a periodic box. Kinetic steps are spectral (FFT), potential steps are
diagonal in position after rotating the spinor into the magnet's basis.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .core import Axis, DensityField, GridSpec, PhysParams, SpinorState, validate_params
from . import analytic

log = logging.getLogger(__name__)

SQRT_HALF = 1.0 / math.sqrt(2.0)


class GridTooSmallError(ValueError):
    """The box clips the state: density at the boundary is not negligible."""


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class HamiltonianSpec:
    kind: str
    coupling: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.kind not in ("free", "eraser", "whichway"):
            raise ValueError(f"unknown Hamiltonian kind {self.kind!r}")
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")

    @property
    def axis(self) -> Axis | None:
        return {"eraser": Axis.X, "whichway": Axis.Z}.get(self.kind)


@dataclass
class SpinorGrid:
    """Spinor sampled on ``grid``; ``up``/``down`` are the +/- components along ``basis``."""

    grid: GridSpec
    up: np.ndarray = field(repr=False)
    down: np.ndarray = field(repr=False)
    basis: Axis = Axis.Z
    renorm: float = 1.0

    def __post_init__(self):
        if self.up.shape != self.grid.shape or self.down.shape != self.grid.shape:
            raise ValueError("spinor arrays must match the grid shape")
        self.basis = Axis(self.basis)

    def norm(self) -> float:
        g = self.grid
        total = np.vdot(self.up, self.up).real + np.vdot(self.down, self.down).real
        return float(total * g.dx * g.dz)

    def density(self) -> DensityField:
        rho = self.up.real ** 2 + self.up.imag ** 2 + self.down.real ** 2 + self.down.imag ** 2
        return DensityField(self.grid, rho)

    def copy(self) -> "SpinorGrid":
        return SpinorGrid(self.grid, self.up.copy(), self.down.copy(), self.basis, self.renorm)


def rotate(sg: SpinorGrid, target: Axis) -> SpinorGrid:
    """Change the spin basis of the stored components (Hadamard on the spinor)."""
    target = Axis(target)
    if sg.basis is target:
        return sg
    a = (sg.up + sg.down) * SQRT_HALF
    b = (sg.up - sg.down) * SQRT_HALF
    return SpinorGrid(sg.grid, a, b, target, sg.renorm)


def _boundary_ratio(rho: np.ndarray) -> float:
    peak = rho.max()
    if not peak > 0:
        return math.inf
    edge = max(rho[0].max(), rho[-1].max(), rho[:, 0].max(), rho[:, -1].max())
    return float(edge / peak)


def discretize(s: SpinorState, g: GridSpec, edge_tol: float = 1e-8) -> SpinorGrid:
    """Sample an analytic state on ``g`` and renormalize the discrete norm to 1."""
    x, z = g.x, g.z
    sg = SpinorGrid(g, s.component(+1, x, z), s.component(-1, x, z), s.basis)
    ratio = _boundary_ratio(sg.density().values)
    if ratio > edge_tol:
        raise GridTooSmallError(
            f"boundary density is {ratio:.3g} of the peak (limit {edge_tol:g}); enlarge the grid"
        )
    n = sg.norm()
    factor = 1.0 / math.sqrt(n)
    if abs(factor - 1.0) > 1e-6:
        warnings.warn(f"discretization renormalized by {factor:.9f}", RuntimeWarning, stacklevel=2)
    sg.up *= factor
    sg.down *= factor
    sg.renorm = factor
    return sg


def _kinetic_phase(g: GridSpec, mass: float, hbar: float) -> np.ndarray:
    kx = 2.0 * np.pi * sfft.fftfreq(g.nx, d=g.dx)
    kz = 2.0 * np.pi * sfft.fftfreq(g.nz, d=g.dz)
    return hbar * (kx[:, None] ** 2 + kz[None, :] ** 2) / (2.0 * mass)


def _kinetic(psi: np.ndarray, mult: np.ndarray) -> np.ndarray:
    return sfft.ifft2(sfft.fft2(psi) * mult)


def potential_step(sg: SpinorGrid, h: HamiltonianSpec, tau: float) -> SpinorGrid:
    """Apply ``exp(-i V tau / hbar)`` for the magnet potential ``-coupling * x * sigma``.

    The spinor is rotated into the magnet's basis, where the potential is
    diagonal, and is returned in that basis.
    """
    if h.axis is None:
        return sg
    sg = rotate(sg, h.axis)
    phase = np.exp(1j * h.coupling * sg.grid.x * tau / h.hbar)[:, None]
    return SpinorGrid(sg.grid, sg.up * phase, sg.down * np.conj(phase), sg.basis, sg.renorm)


def split_step(sg: SpinorGrid, h: HamiltonianSpec, dt: float, steps: int) -> SpinorGrid:
    """Advance ``steps`` Strang steps of size ``dt``.

    Each step is half potential, full kinetic, half potential. For the
    ``free`` kind the potential is zero and consecutive kinetic factors
    commute, so the steps are applied as one spectral multiplication.
    Magnet kinds return the state in the magnet's spin basis.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps == 0:
        return sg
    g = sg.grid
    omega_k = _kinetic_phase(g, h.mass, h.hbar)

    if h.kind == "free" or h.coupling == 0:
        mult = np.exp(-1j * omega_k * (dt * steps))
        out = SpinorGrid(g, _kinetic(sg.up, mult), _kinetic(sg.down, mult), sg.basis, sg.renorm)
        _check_finite(out)
        return out

    max_phase = float(omega_k.max()) * dt
    if max_phase > 0.5 * 2.0 * np.pi * 100:
        # only the aliasing-free part of the spectrum matters, so this is lenient
        warnings.warn(f"kinetic phase per step {max_phase:.3g} rad is very large", RuntimeWarning)

    sg = rotate(sg, h.axis)
    half = np.exp(1j * h.coupling * g.x * (0.5 * dt) / h.hbar)[:, None]
    half_conj = np.conj(half)
    mult = np.exp(-1j * omega_k * dt)
    up, down = sg.up * half, sg.down * half_conj
    for i in range(steps):
        up = _kinetic(up, mult)
        down = _kinetic(down, mult)
        if i < steps - 1:
            # two adjacent half steps merge into one full step
            up *= half * half
            down *= half_conj * half_conj
    up *= half
    down *= half_conj
    out = SpinorGrid(g, up, down, sg.basis, sg.renorm)
    _check_finite(out)
    return out


def _check_finite(sg: SpinorGrid):
    if not (np.all(np.isfinite(sg.up)) and np.all(np.isfinite(sg.down))):
        raise PropagationError("NaN or inf in propagated spinor")


def _steps_for(duration: float, dt: float) -> tuple:
    if duration <= 0:
        return 0, dt
    n = max(1, int(round(duration / dt)))
    return n, duration / n


SCENARIOS = ("no-eraser", "eraser", "whichway")


def run_schedule(p: PhysParams, scenario: str, g: GridSpec, dt: float = 0.005) -> SpinorGrid:
    """Propagate from the slits to the screen: free, magnet on ``[t_i, t_i+t_e]``, free.

    The step is adjusted so that each segment holds an integer number of
    steps. The returned spinor is in the Z basis.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    magnet = scenario != "no-eraser"
    validate_params(p, magnet=magnet)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        start = analytic.initial_state(p)
    sg = discretize(start, g)
    n0 = sg.norm()
    free = HamiltonianSpec("free", 0.0, p.m, p.hbar)

    if not magnet:
        n, step = _steps_for(p.t, dt)
        sg = split_step(sg, free, step, n)
    else:
        kind = "eraser" if scenario == "eraser" else "whichway"
        coupling = p.beta if kind == "eraser" else p.b0
        magnet_h = HamiltonianSpec(kind, coupling, p.m, p.hbar)
        for h, duration in ((free, p.t_i), (magnet_h, p.t_e), (free, p.t - p.t_i - p.t_e)):
            n, step = _steps_for(duration, dt)
            sg = split_step(sg, h, step, n)
        sg = rotate(sg, Axis.Z)

    drift = abs(sg.norm() - n0)
    log.debug("schedule %s: norm drift %.3g", scenario, drift)
    ratio = _boundary_ratio(sg.density().values)
    if ratio > 1e-8:
        warnings.warn(f"final state reaches the box edge ({ratio:.3g} of peak)", RuntimeWarning)
    return sg


def compare_l2(a: DensityField, b: DensityField) -> float:
    """Relative L2 residual ``||a - b|| / ||a||``."""
    if a.grid != b.grid:
        raise ValueError("density fields live on different grids")
    return float(np.linalg.norm(a.values - b.values) / np.linalg.norm(a.values))
