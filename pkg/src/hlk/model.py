"""Problem parameters, prescribed functions and exact special solutions.

A hypersurface of linear prescribed mean curvature in R^{n+1} satisfies
H = <eta, v> + lam, with eta the unit normal and v the unit density vector.
In the rotational setting v = e_{n+1} and the relation reduces to a function
of the vertical component y of the unit normal, H = h(y).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Argument outside the domain of a prescribed function."""


class ParameterError(ValueError):
    """Invalid problem parameters."""


@dataclass(frozen=True)
class ModelParams:
    """One problem instance.

    Attributes:
        n: dimension of the hypersurface (ambient space is R^{n+1}).
        lam: the prescribed constant.
        v_last: component of the density vector along e_{n+1}.
    """

    n: int
    lam: float
    v_last: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ParameterError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "v_last", float(self.v_last))
        if self.n < 2:
            raise ParameterError(f"n must be >= 2, got {self.n}")
        if not math.isfinite(self.lam):
            raise ParameterError("lambda must be finite")
        if self.lam == 0.0:
            raise ParameterError(
                "lambda = 0 describes translating solitons of mean curvature flow, "
                "which are out of scope"
            )
        if self.lam < 0.0:
            raise ParameterError(
                "lambda must be positive (flip the orientation to turn lambda < 0 "
                "into -lambda)"
            )
        if not abs(self.v_last) <= 1.0:
            raise ParameterError(f"|v_last| must be <= 1, got {self.v_last}")

    @property
    def cylinder_radius(self) -> float:
        """Radius (n-1)/(lam n) of the rotational CMC cylinder."""
        return (self.n - 1) / (self.lam * self.n)

    @property
    def regime_threshold(self) -> float:
        """The value sqrt(n-1)/2 separating spiral, improper node and sink."""
        return math.sqrt(self.n - 1) / 2.0

    def to_dict(self) -> dict:
        return {"n": self.n, "lambda": self.lam, "v_last": self.v_last}


class PrescribedKind(str, enum.Enum):
    LINEAR = "linear"
    COSINE = "cosine"


@dataclass(frozen=True)
class PrescribedFunction:
    """h(y) for y in [-1, 1].

    ``LINEAR`` is y + lam. ``COSINE`` is the comparison function
    cos(pi y / 2) / 2, which is even, non-negative and vanishes at y = +-1.
    """

    kind: PrescribedKind
    lam: float = 1.0

    @classmethod
    def linear(cls, lam: float) -> "PrescribedFunction":
        return cls(PrescribedKind.LINEAR, float(lam))

    @classmethod
    def cosine(cls) -> "PrescribedFunction":
        return cls(PrescribedKind.COSINE, 0.0)

    def __call__(self, y: float) -> float:
        return eval_prescribed(self, y)

    def unchecked(self, y: float) -> float:
        # hot path for integrators, y = cos(theta) is in range by construction
        if self.kind is PrescribedKind.LINEAR:
            return y + self.lam
        return 0.5 * math.cos(0.5 * math.pi * y)


def eval_prescribed(f: PrescribedFunction, y: float) -> float:
    """Evaluate the prescribed function at the vertical normal component y."""
    if not -1.0 <= y <= 1.0:
        raise DomainError(f"y must lie in [-1, 1], got {y!r}")
    return f.unchecked(y)


class Setting(str, enum.Enum):
    CYLINDRICAL = "cylindrical"
    ROTATIONAL = "rotational"


class SolutionKind(str, enum.Enum):
    HYPERPLANE = "Hyperplane"
    ROUND_CYLINDER = "RoundCylinder"
    STRAIGHT_LINE_BASE = "StraightLineBase"
    CIRCLE_BASE = "CircleBase"


@dataclass(frozen=True)
class SpecialSolution:
    """An exact invariant solution.

    ``value`` carries the radius for cylinders and circles, the line angle
    theta0 for straight base lines, and the angle of the unit normal in the
    (x, z) plane for hyperplanes (-pi/2 is the downward normal).
    """

    kind: SolutionKind
    value: float
    setting: Setting

    def residual(self, p: ModelParams) -> float:
        """Defect of the defining curvature relation on this solution."""
        n, lam = p.n, p.lam
        if self.setting is Setting.CYLINDRICAL:
            if self.kind is SolutionKind.STRAIGHT_LINE_BASE:
                kappa, normal_v = 0.0, p.v_last * math.cos(self.value)
            elif self.kind is SolutionKind.HYPERPLANE:
                # base line with unit normal at angle `value`; the normal's v-part
                kappa, normal_v = 0.0, p.v_last * math.sin(self.value)
            else:
                # circle traversed counter-clockwise; rulings parallel to v
                kappa, normal_v = 1.0 / self.value, 0.0
            return abs(kappa - n * (normal_v + lam))
        # rotational: n (x' + lam) = kappa + (n - 1) z' / x
        if self.kind is SolutionKind.ROUND_CYLINDER:
            dx, dz, kappa, x = 0.0, 1.0, 0.0, self.value
            return abs(n * (dx + lam) - kappa - (n - 1) * dz / x)
        if self.kind is SolutionKind.HYPERPLANE:
            # profile x = -s, z = const; normal (-z', x') = (0, -1)
            dx = -1.0
            return abs(n * (dx + lam))
        raise ValueError(f"{self.kind} is not a rotational solution")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "value": self.value, "setting": self.setting.value}


def special_solutions(p: ModelParams, setting: Setting | str) -> list[SpecialSolution]:
    """Every exact solution known in closed form for the given setting."""
    setting = Setting(setting)
    out: list[SpecialSolution] = []
    if setting is Setting.ROTATIONAL:
        out.append(SpecialSolution(SolutionKind.ROUND_CYLINDER, p.cylinder_radius, setting))
        if p.lam == 1.0:
            out.append(SpecialSolution(SolutionKind.HYPERPLANE, -math.pi / 2, setting))
        return out

    v = p.v_last
    if v == 0.0:
        # rulings parallel to the density: constant curvature lam n
        r = 1.0 / (p.lam * p.n)
        out.append(SpecialSolution(SolutionKind.ROUND_CYLINDER, r, setting))
        out.append(SpecialSolution(SolutionKind.CIRCLE_BASE, r, setting))
        return out
    if p.lam <= abs(v):
        c = -p.lam / v
        theta0 = math.pi if c == -1.0 else math.acos(c)
        angles = [theta0] if theta0 in (0.0, math.pi) else [theta0, -theta0]
        for t0 in angles:
            out.append(SpecialSolution(SolutionKind.STRAIGHT_LINE_BASE, t0, setting))
            out.append(SpecialSolution(SolutionKind.HYPERPLANE, t0 + math.pi / 2, setting))
    return out
