"""Phase plane of rotational profiles.

Orbits live in the half-strips Theta_eps = (0, inf) x (-1, 1), one per sign
eps of z'. The vector field is

    x' = y
    y' = (n - 1) (1 - y^2) / x - n eps h(y) sqrt(1 - y^2)

with h(y) = y + lam for the linear prescription.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .model import ModelParams, PrescribedFunction

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float
    eps: int = 1

    def __post_init__(self):
        if not self.x > 0.0:
            raise ValueError(f"phase state needs x > 0, got {self.x}")
        if not -1.0 < self.y < 1.0:
            raise ValueError(f"phase state needs -1 < y < 1, got {self.y}")
        if self.eps not in (1, -1):
            raise ValueError(f"eps must be +1 or -1, got {self.eps}")


class Regime(str, enum.Enum):
    SPIRAL = "Spiral"
    IMPROPER_NODE = "ImproperNode"
    SINK = "Sink"


@dataclass(frozen=True)
class Equilibrium:
    x0: float
    mu1: complex
    mu2: complex
    regime: Regime
    jacobian: np.ndarray = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "mu": [[self.mu1.real, self.mu1.imag], [self.mu2.real, self.mu2.imag]],
            "regime": self.regime.value,
        }


def rhs(p: ModelParams, f: PrescribedFunction, s: PhaseState) -> tuple[float, float]:
    """Vector field of the first-order system at a phase state."""
    x, y = s.x, s.y
    w = 1.0 - y * y
    dy = (p.n - 1) * w / x - p.n * s.eps * f.unchecked(y) * math.sqrt(w)
    return y, dy


def gamma_curve(p: ModelParams, eps: int, y: float) -> float | None:
    """Nullcline x = Gamma_eps(y) of the linear system, None where it does not exist."""
    if not -1.0 < y < 1.0:
        raise ValueError(f"y must lie in (-1, 1), got {y}")
    d = eps * (y + p.lam)
    if d <= 0.0:
        return None
    return (p.n - 1) * math.sqrt(1.0 - y * y) / (p.n * d)


def linearization(p: ModelParams) -> np.ndarray:
    """Jacobian of the eps = 1 system at the equilibrium."""
    n, lam = p.n, p.lam
    return np.array([[0.0, 1.0], [-(n * n * lam * lam) / (n - 1), -float(n)]])


def regime_of(p: ModelParams) -> Regime:
    # compare 4 lam^2 with n - 1 exactly rather than through sqrt
    lhs, rhs_ = 4.0 * p.lam * p.lam, float(p.n - 1)
    if lhs > rhs_:
        return Regime.SPIRAL
    if lhs == rhs_:
        return Regime.IMPROPER_NODE
    return Regime.SINK


def equilibrium_analysis(p: ModelParams) -> Equilibrium:
    """Equilibrium, eigenvalues of the linearization and the resulting regime."""
    n = p.n
    disc = 1.0 - 4.0 * p.lam * p.lam / (n - 1)
    if disc >= 0.0:
        r = n * math.sqrt(disc)
        mu1, mu2 = complex((-n + r) / 2.0, 0.0), complex((-n - r) / 2.0, 0.0)
    else:
        im = n * math.sqrt(-disc) / 2.0
        mu1, mu2 = complex(-n / 2.0, im), complex(-n / 2.0, -im)
    return Equilibrium(p.cylinder_radius, mu1, mu2, regime_of(p), linearization(p))


def lyapunov_matrix(p: ModelParams) -> np.ndarray:
    """P with A^T P + P A = -I for the linearization A; V(w) = w^T P w decays near e0."""
    a = linearization(p)
    return linalg.solve_continuous_lyapunov(a.T, -np.eye(2))


class Region(str, enum.Enum):
    L1 = "Lambda1"
    L2 = "Lambda2"
    L3 = "Lambda3"
    L4 = "Lambda4"
    L1P = "Lambda1+"
    L2P = "Lambda2+"
    L3P = "Lambda3+"
    L4P = "Lambda4+"
    LPLUS = "Lambda+"
    LMINUS = "Lambda-"
    L1M = "Lambda1-"
    L2M = "Lambda2-"
    L3M = "Lambda3-"
    ON_AXIS_Y0 = "OnAxisY0"
    ON_GAMMA = "OnGamma"


@dataclass(frozen=True)
class RegionInfo:
    label: Region
    sign_dx: int
    sign_dy: int


# sign of y' in each open region; sign of x' is sign(y)
_DY_SIGN = {
    Region.L1: -1, Region.L2: -1, Region.L3: 1, Region.L4: 1,
    Region.L1P: -1, Region.L2P: -1, Region.L3P: 1, Region.L4P: 1,
    Region.LPLUS: 1, Region.LMINUS: 1,
    Region.L1M: 1, Region.L2M: -1, Region.L3M: 1,
}


def region_labels(p: ModelParams, eps: int) -> list[Region]:
    """Open monotonicity regions of Theta_eps."""
    if eps == 1:
        if p.lam >= 1.0:
            return [Region.L1, Region.L2, Region.L3, Region.L4]
        return [Region.L1P, Region.L2P, Region.L3P, Region.L4P]
    if p.lam >= 1.0:
        return [Region.LPLUS, Region.LMINUS]
    return [Region.L1M, Region.L2M, Region.L3M]


def _open_region(p: ModelParams, eps: int, x: float, y: float) -> Region:
    g = gamma_curve(p, eps, y)
    right = g is not None and x > g
    if eps == 1:
        if p.lam >= 1.0:
            # Gamma_1 exists on all of (-1, 1)
            if y > 0:
                return Region.L1 if right else Region.L4
            return Region.L2 if right else Region.L3
        if y > 0:
            return Region.L1P if right else Region.L4P
        return Region.L2P if right else Region.L3P
    if p.lam >= 1.0:
        return Region.LPLUS if y > 0 else Region.LMINUS
    if y > 0:
        return Region.L1M
    return Region.L2M if right else Region.L3M


def classify_region(p: ModelParams, s: PhaseState) -> RegionInfo:
    """Monotonicity region (or boundary label) containing a phase state."""
    x, y, eps = s.x, s.y, s.eps
    if abs(y) <= BOUNDARY_TOL:
        return RegionInfo(Region.ON_AXIS_Y0, 0, _sign(rhs(p, PrescribedFunction.linear(p.lam), s)[1]))
    g = gamma_curve(p, eps, y)
    if g is not None and abs(x - g) <= BOUNDARY_TOL * max(1.0, abs(x)):
        return RegionInfo(Region.ON_GAMMA, _sign(y), 0)
    label = _open_region(p, eps, x, y)
    return RegionInfo(label, _sign(y), _DY_SIGN[label])


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def portrait(p: ModelParams, eps: int = 1, samples: int = 401) -> dict:
    """JSON-ready summary of the phase plane Theta_eps."""
    ys = np.linspace(-1.0, 1.0, samples)[1:-1]
    poly = []
    for y in ys:
        g = gamma_curve(p, eps, float(y))
        if g is not None:
            poly.append([g, float(y)])
    regions = [
        {"label": r.value, "sign_dx": _sign_dx_of(r), "sign_dy": _DY_SIGN[r]}
        for r in region_labels(p, eps)
    ]
    eq = equilibrium_analysis(p)
    return {
        "params": p.to_dict(),
        "eps": eps,
        "regions": regions,
        "gamma_polyline": poly,
        "equilibrium": eq.to_dict(),
    }


def _sign_dx_of(r: Region) -> int:
    upper = {Region.L1, Region.L4, Region.L1P, Region.L4P, Region.LPLUS, Region.L1M}
    return 1 if r in upper else -1
