"""Domain types shared by the analytic, oracle and analysis layers.

Everything here is immutable. Units are natural (hbar = m = 1 by default);
all lengths and times are plain floats.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np


class ParamError(ValueError):
    """Raised when a physical parameter violates its invariant."""


class Axis(str, enum.Enum):
    Z = "Z"
    X = "X"


@dataclass(frozen=True)
class PhysParams:
    """Constants and timings of one run.

    ``omega`` is the initial x-width of the packets, ``z0`` the half
    separation of the slits, ``beta`` the eraser-magnet gradient and ``b0``
    the which-way magnet gradient. Times are measured from the slits:
    the magnet is entered at ``t_i``, left at ``t_i + t_e`` and the screen
    is reached at ``t``.
    """

    m: float = 1.0
    hbar: float = 1.0
    sigma: float = 1.0
    omega: float = 3.0
    z0: float = 4.0
    beta: float = 0.5
    t_i: float = 2.0
    t_e: float = 2.0
    t: float = 20.0
    b0: float = 0.5

    def replace(self, **changes) -> "PhysParams":
        return replace(self, **changes)


DEFAULT_PARAMS = PhysParams()

_POSITIVE = ("m", "hbar", "sigma", "omega")
_NONNEGATIVE = ("z0", "beta", "b0", "t", "t_i", "t_e")


def validate_params(p: PhysParams, magnet: bool = True) -> PhysParams:
    """Return ``p`` unchanged if it is physically admissible.

    With ``magnet=True`` the timeline must fit the magnet before the screen.
    Raises ParamError naming the first violated invariant.
    """
    for name in _POSITIVE:
        value = getattr(p, name)
        if not np.isfinite(value) or value <= 0:
            raise ParamError(f"{name} must be positive")
    for name in _NONNEGATIVE:
        value = getattr(p, name)
        if not np.isfinite(value) or value < 0:
            raise ParamError(f"{name} must be non-negative")
    if magnet and p.t < p.t_i + p.t_e:
        raise ParamError("t < t_i + t_e")
    return p


@dataclass(frozen=True)
class ComplexGaussian:
    """One-dimensional packet ``amp * exp(-(u-center)^2/(4 cwidth)) * exp(i kphase u/hbar)``.

    ``cwidth`` starts as the squared width and picks up an imaginary part
    under free evolution.
    """

    center: float
    cwidth: complex
    kphase: float = 0.0
    amp: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not complex(self.cwidth).real > 0:
            raise ValueError("cwidth must have a positive real part")

    def __call__(self, u, hbar: float = 1.0):
        return gaussian_eval(self, u, hbar)

    def same_shape(self, other: "ComplexGaussian", tol: float = 1e-13) -> bool:
        # identical up to the amplitude prefactor
        scale = max(1.0, abs(self.center), abs(complex(self.cwidth)), abs(self.kphase))
        return (
            abs(self.center - other.center) <= tol * scale
            and abs(complex(self.cwidth) - complex(other.cwidth)) <= tol * scale
            and abs(self.kphase - other.kphase) <= tol * scale
        )

    def scaled(self, factor: complex) -> "ComplexGaussian":
        return replace(self, amp=complex(self.amp) * factor)

    @property
    def prob_width(self) -> float:
        """Standard deviation of ``|g|^2``."""
        w = complex(self.cwidth)
        return float(np.sqrt(abs(w) ** 2 / w.real))


def gaussian_eval(g: ComplexGaussian, u, hbar: float = 1.0):
    u = np.asarray(u, dtype=float)
    d = u - g.center
    return complex(g.amp) * np.exp(-(d * d) / (4.0 * complex(g.cwidth)) + 1j * g.kphase * u / hbar)


def gaussian_overlap(a: ComplexGaussian, b: ComplexGaussian, hbar: float = 1.0) -> complex:
    """Closed-form ``<a|b>`` over the real line."""

    def quad_coeffs(g):
        w = complex(g.cwidth)
        alpha = 1.0 / (4.0 * w)
        lin = g.center / (2.0 * w) + 1j * g.kphase / hbar
        const = -(g.center ** 2) / (4.0 * w)
        return alpha, lin, const

    aa, la, ca = quad_coeffs(a)
    ab, lb, cb = quad_coeffs(b)
    alpha = np.conj(aa) + ab
    lin = np.conj(la) + lb
    const = np.conj(ca) + cb
    pref = np.conj(complex(a.amp)) * complex(b.amp)
    return complex(pref * np.sqrt(np.pi / alpha) * np.exp(lin * lin / (4.0 * alpha) + const))


ZPart = tuple  # (sign: int, ComplexGaussian)


@dataclass(frozen=True)
class Branch:
    """Spin component ``coeff * xpacket(x) * sum(sign * g(z) for sign, g in zparts)``."""

    sign: int
    coeff: complex
    xpacket: ComplexGaussian
    zparts: tuple = ()

    def x_values(self, x, hbar):
        return self.xpacket(x, hbar)

    def z_values(self, z, hbar):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape, dtype=complex)
        for s, g in self.zparts:
            out += s * g(z, hbar)
        return out

    def on_grid(self, x, z, hbar) -> np.ndarray:
        """Component amplitude with shape ``(len(x), len(z))``."""
        return complex(self.coeff) * np.outer(self.x_values(x, hbar), self.z_values(z, hbar))

    def norm2(self, hbar) -> float:
        nx = gaussian_overlap(self.xpacket, self.xpacket, hbar).real
        nz = 0.0 + 0.0j
        for s1, g1 in self.zparts:
            for s2, g2 in self.zparts:
                nz += s1 * s2 * gaussian_overlap(g1, g2, hbar)
        return float(abs(complex(self.coeff)) ** 2 * nx * nz.real)


@dataclass(frozen=True)
class SpinorState:
    """Analytic two-component state: at most one branch per spin sign of ``basis``."""

    basis: Axis
    branches: tuple
    hbar: float = 1.0

    def __post_init__(self):
        signs = [b.sign for b in self.branches]
        if len(set(signs)) != len(signs) or any(s not in (1, -1) for s in signs):
            raise ValueError("at most one branch per spin sign, signs must be +1 or -1")
        object.__setattr__(self, "basis", Axis(self.basis))

    def branch(self, sign: int):
        for b in self.branches:
            if b.sign == sign:
                return b
        return None

    def component(self, sign: int, x, z) -> np.ndarray:
        b = self.branch(sign)
        if b is None:
            return np.zeros((np.size(x), np.size(z)), dtype=complex)
        return b.on_grid(x, z, self.hbar)

    def norm(self) -> float:
        """Exact norm from Gaussian overlap integrals."""
        return sum(b.norm2(self.hbar) for b in self.branches)


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    nx: int
    z_min: float
    z_max: float
    nz: int

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.nz) != self.nz or self.nx < 2 or self.nz < 2:
            raise ValueError("nx and nz must be integers >= 2")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if not self.z_max > self.z_min:
            raise ValueError("z_max must exceed z_min")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.nz)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / (self.nz - 1)

    @property
    def shape(self) -> tuple:
        return (self.nx, self.nz)


def trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    return w


@dataclass(frozen=True)
class DensityField:
    """Probability density on ``grid``; ``values[i, j]`` sits at ``(x[i], z[j])``."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite and non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def integral(self) -> float:
        wx = trapezoid_weights(self.grid.nx, self.grid.dx)
        wz = trapezoid_weights(self.grid.nz, self.grid.dz)
        return float(wx @ self.values @ wz)


@dataclass(frozen=True)
class FringeReport:
    lobe_centers: list
    visibility_per_lobe: list
    fringe_period: float | None
    complementarity: float
    distinguishability: float
    fringe_spacing: float | None = None
    reference_deviation: float | None = None
    single_lobe: bool = False
