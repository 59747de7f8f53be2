"""Rotational profile curves and their phase-plane orbits.

Profiles alpha(s) = (x(s), z(s)) are integrated in the angle form

    x' = cos(theta),  z' = sin(theta),
    theta' = n h(cos(theta)) - (n - 1) sin(theta) / x,

which is regular where the profile has a horizontal tangent direction
(y = +-1), unlike the (x, y) system. The phase state is recovered as
y = cos(theta), eps = sign(sin(theta)).
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from .geometry import count_self_intersections
from .model import ModelParams, PrescribedFunction, PrescribedKind
from .phaseplane import lyapunov_matrix

log = logging.getLogger(__name__)

EVENT_XTOL = 1e-13


class InvalidSeedError(ValueError):
    pass


class SeedKind(str, enum.Enum):
    AXIS_UP = "AxisUp"
    AXIS_DOWN = "AxisDown"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class OrbitSeed:
    kind: SeedKind
    params: ModelParams
    x0: float | None = None
    y0: float | None = None
    eps0: int | None = None

    @classmethod
    def axis_up(cls, p: ModelParams, eps: int | None = None) -> "OrbitSeed":
        return cls(SeedKind.AXIS_UP, p, eps0=eps)

    @classmethod
    def axis_down(cls, p: ModelParams, eps: int | None = None) -> "OrbitSeed":
        return cls(SeedKind.AXIS_DOWN, p, eps0=eps)

    @classmethod
    def interior(cls, p: ModelParams, x0: float, y0: float, eps0: int = 1) -> "OrbitSeed":
        if not (x0 > 0 and -1 < y0 < 1 and eps0 in (1, -1)):
            raise InvalidSeedError(f"interior seed ({x0}, {y0}, {eps0}) is not in the phase plane")
        return cls(SeedKind.INTERIOR, p, float(x0), float(y0), int(eps0))

    @property
    def delta(self) -> int:
        return 1 if self.kind is SeedKind.AXIS_UP else -1


class EventKind(str, enum.Enum):
    AXIS_CONTACT = "AxisContact"
    TURN_PLUS = "TurnAtYPlus1"
    TURN_MINUS = "TurnAtYMinus1"
    CROSS_Y0 = "CrossY0"
    CROSS_GAMMA = "CrossGamma"
    CROSS_CYLINDER = "CrossCylinder"
    CONVERGED_E0 = "ConvergedToE0"
    CONVERGED_ASYMPTOTE = "ConvergedToAsymptote"
    ESCAPED = "Escaped"
    BUDGET = "BudgetExhausted"
    STEP_FAILURE = "StepFailure"
    EXACT = "ExactSolution"


TERMINAL_KINDS = {
    EventKind.CONVERGED_E0, EventKind.CONVERGED_ASYMPTOTE, EventKind.ESCAPED,
    EventKind.BUDGET, EventKind.STEP_FAILURE, EventKind.EXACT,
}


@dataclass(frozen=True)
class Event:
    kind: EventKind
    s: float
    x: float
    y: float
    eps: int
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "s": self.s, "x": self.x, "y": self.y, "eps": self.eps}
        d.update(self.data)
        return d


@dataclass(frozen=True)
class OrbitOptions:
    """Numerical knobs. ``x_max=None`` resolves per problem, see ``resolved_x_max``."""

    tol: float = 1e-11
    s_max: float = 1e5
    x_max: float | None = None
    e0_radius: float = 1e-4
    winding_cap: int = 12
    turn_cap: int | None = None
    sample_step: float = 1e-3
    max_fine_samples: int = 200_000
    direction: int = 1
    s0: float = 1e-5
    axis_tol: float = 1e-9
    stop_after_y0: int | None = None

    def resolved_x_max(self, p: ModelParams, center: float) -> float:
        if self.x_max is not None:
            return float(self.x_max)
        # far enough out that the lam <= 1 asymptote |y + lam| ~ (n-1)/(n x) settles below e0_radius
        return max(1e3 * center, 4.0 * (p.n - 1) / (p.n * self.e0_radius))

    def resolved_turn_cap(self) -> int:
        return self.turn_cap if self.turn_cap is not None else 4 * self.winding_cap


def center_of(p: ModelParams, f: PrescribedFunction) -> float:
    """x-coordinate of the equilibrium on y = 0 for the prescription f."""
    return (p.n - 1) / (p.n * f.unchecked(0.0))


def axis_start_state(p: ModelParams, delta: int, s0: float = 1e-5,
                     f: PrescribedFunction | None = None):
    """Series start off the axis for the profile through (0, delta) in the phase plane.

    Returns ``(s, x, z, theta, kappa0)``. The vertex curvature kappa0 = h(delta)
    follows from l'Hopital at x = 0, where all principal curvatures agree. For
    delta = +1 the profile leaves the axis for s > 0 with theta(0) = 0; for
    delta = -1 it reaches the axis at s = 0 with theta(0) = pi, so the start
    point is at s = -s0.
    """
    if not 0 < s0 <= 1e-4:
        raise ValueError("s0 must lie in (0, 1e-4]")
    f = f or PrescribedFunction.linear(p.lam)
    k0 = f.unchecked(float(delta))
    if delta == 1:
        return s0, s0, 0.5 * k0 * s0 * s0, k0 * s0, k0
    # theta(s) = pi + k0 s near s = 0, x(s) = -s, z(s) = -k0 s^2 / 2
    return -s0, s0, -0.5 * k0 * s0 * s0, math.pi - k0 * s0, k0


def _seed_eps(seed: OrbitSeed, f: PrescribedFunction) -> int | None:
    if seed.kind is SeedKind.INTERIOR:
        return seed.eps0
    k0 = f.unchecked(float(seed.delta))
    if k0 == 0.0:
        return None
    # eps is the sign of z' on the side of the axis the orbit lives on
    return 1 if seed.delta * k0 > 0 else -1


def _check_seed(seed: OrbitSeed, f: PrescribedFunction):
    if seed.kind is SeedKind.INTERIOR or seed.eps0 is None:
        return
    eps = seed.eps0
    if f.kind is PrescribedKind.LINEAR:
        valid = eps * (seed.delta + seed.params.lam) > 0
    else:
        valid = _seed_eps(seed, f) == eps
    if not valid:
        raise InvalidSeedError(
            f"no orbit in Theta_{eps} has (0, {seed.delta}) as endpoint; "
            f"the unique such orbit lives in Theta_{-eps}"
        )


@dataclass
class OrbitTrace:
    """Integrated orbit: resampled states, ordered events and the terminating event.

    Samples are in integration order. They are uniform with spacing
    ``sample_step`` over the first ``max_fine_samples`` steps; beyond that,
    each solver step contributes a triple of samples spaced ``sample_step``
    apart, so local finite differences stay available along the whole orbit.
    """

    seed: OrbitSeed
    prescribed: PrescribedFunction
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    events: list[Event]
    termination: Event
    winding: int
    options: OrbitOptions
    meta: dict = field(default_factory=dict)
    _segments: list = field(default_factory=list, repr=False)

    @property
    def params(self) -> ModelParams:
        return self.seed.params

    @property
    def y(self) -> np.ndarray:
        return np.cos(self.theta)

    @property
    def eps(self) -> np.ndarray:
        return np.where(np.sin(self.theta) >= 0, 1, -1)

    def events_of(self, *kinds: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind in kinds]

    @property
    def turns(self) -> list[Event]:
        return self.events_of(EventKind.TURN_PLUS, EventKind.TURN_MINUS)

    @property
    def cylinder_crossings(self) -> int:
        return len(self.events_of(EventKind.CROSS_CYLINDER))

    def state_at(self, s: float) -> np.ndarray:
        """(x, z, theta) at arc length s from the integrator's dense output."""
        for a, b, dense in self._segments:
            if min(a, b) <= s <= max(a, b):
                return dense(s)
        raise ValueError(f"s={s} outside the integrated range")

    def rows(self):
        eps = self.eps
        for i in range(len(self.s)):
            yield (float(self.s[i]), float(self.x[i]), float(self.z[i]), float(self.theta[i]), int(eps[i]))

    def events_json(self) -> dict:
        return {
            "events": [e.to_dict() for e in self.events],
            "termination": self.termination.to_dict(),
            "winding": self.winding,
            "cylinder_crossings": self.cylinder_crossings,
            "seed": self.seed.kind.value,
            "params": self.params.to_dict(),
            "meta": self.meta,
        }

    @classmethod
    def join(cls, backward: "OrbitTrace", forward: "OrbitTrace") -> "OrbitTrace":
        """Glue a backward and a forward trace from the same seed into one in increasing s."""
        keep = backward.s != forward.s[0]
        cat = lambda a, b: np.concatenate([a[keep][::-1], b])  # noqa: E731
        events = list(reversed(backward.events_of(*set(EventKind) - TERMINAL_KINDS)))
        events += [e for e in forward.events if e.kind not in TERMINAL_KINDS]
        meta = {"backward_termination": backward.termination.to_dict(),
                "forward_termination": forward.termination.to_dict(),
                "backward_winding": backward.winding}
        return cls(forward.seed, forward.prescribed, cat(backward.s, forward.s),
                   cat(backward.x, forward.x), cat(backward.z, forward.z),
                   cat(backward.theta, forward.theta), events, forward.termination,
                   forward.winding, forward.options, meta,
                   backward._segments + forward._segments)


class _Integrator:
    def __init__(self, p: ModelParams, f: PrescribedFunction, opts: OrbitOptions):
        self.p, self.f, self.opts = p, f, opts
        self.n = p.n
        self.center = center_of(p, f)
        self.linear = f.kind is PrescribedKind.LINEAR
        self.P = lyapunov_matrix(p) if self.linear else None

    def fun(self, _s, u):
        x, th = u[0], u[2]
        c, sn = math.cos(th), math.sin(th)
        return np.array([c, sn, self.n * self.f.unchecked(c) - (self.n - 1) * sn / x])

    def kappa(self, x, th):
        c, sn = np.cos(th), np.sin(th)
        h = (c + self.p.lam) if self.linear else 0.5 * np.cos(0.5 * np.pi * c)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.n * h - (self.n - 1) * sn / x

    def event_values(self, u):
        x, th = u[0], u[2]
        vals = {
            "y0": np.cos(th),
            "turn": np.sin(th),
            "gamma": self.kappa(x, th),
            "cyl": x - self.center,
        }
        return vals

    def lyap(self, x, th):
        w = np.array([x - self.center, math.cos(th)])
        return float(w @ self.P @ w)


def _make_event(kind, s, u, **data) -> Event:
    th = float(u[2])
    eps = 1 if math.sin(th) >= 0 else -1
    return Event(kind, float(s), float(u[0]), math.cos(th), eps, data)


def integrate_orbit(seed: OrbitSeed, f: PrescribedFunction | None = None,
                    opts: OrbitOptions | None = None) -> OrbitTrace:
    """Integrate a profile from its seed until one of the termination rules fires.

    Every crossing of y = 0, y = +-1, the nullcline and the line x = e0 is
    located to within 1e-12 in s. Termination: convergence to the equilibrium
    (inside the ``e0_radius`` ball with the linearised Lyapunov function
    decreasing over three consecutive steps), settling onto the asymptote
    y = -lam far from the axis, escape beyond ``x_max``, exhaustion of the
    arc-length or turn budget, or a failed step.
    """
    p = seed.params
    f = f or PrescribedFunction.linear(p.lam)
    opts = opts or OrbitOptions()
    _check_seed(seed, f)
    eng = _Integrator(p, f, opts)
    x_max = opts.resolved_x_max(p, eng.center)

    events: list[Event] = []
    if seed.kind is SeedKind.INTERIOR:
        direction = 1 if opts.direction >= 0 else -1
        if seed.y0 == 0.0 and abs(seed.x0 - eng.center) <= 1e-12 * eng.center:
            return _exact_cylinder(seed, f, opts, direction, eng.center)
        th0 = seed.eps0 * math.acos(seed.y0)
        s_start, u0 = 0.0, np.array([seed.x0, 0.0, th0])
        anchor = None
    else:
        direction = seed.delta
        s_start, x_s, z_s, th_s, k0 = axis_start_state(p, seed.delta, opts.s0, f)
        u0 = np.array([x_s, z_s, th_s])
        anchor = (0.0, np.array([0.0, 0.0, 0.0 if seed.delta == 1 else math.pi]))
        events.append(_make_event(EventKind.AXIS_CONTACT, 0.0, anchor[1], kappa0=k0))
        if k0 == 0.0:
            return _exact_flat(seed, f, opts, events, x_max)

    s_end_budget = s_start + direction * opts.s_max
    solver = DOP853(eng.fun, s_start, u0, s_end_budget, rtol=opts.tol, atol=opts.tol,
                    first_step=min(opts.sample_step, opts.s_max))
    segments = []
    termination = None
    acc_angle, prev_phase = 0.0, None
    lyap_hist: list[float] = []
    n_turns = 0
    n_y0 = 0
    turn_cap = opts.resolved_turn_cap()
    nsub = 8
    gamma_noise = 1e3 * opts.tol * p.n * (1.0 + abs(f.unchecked(1.0)) + abs(f.unchecked(-1.0)))

    while termination is None:
        if solver.status != "running":
            u = solver.y
            termination = _make_event(EventKind.BUDGET, solver.t, u, reason="s_max")
            break
        msg = solver.step()
        if solver.status == "failed":
            u = solver.y
            kind = EventKind.AXIS_CONTACT if u[0] < 10 * opts.axis_tol else EventKind.STEP_FAILURE
            termination = _make_event(EventKind.STEP_FAILURE, solver.t, u, message=str(msg),
                                      cause=kind.value)
            break
        a, b = solver.t_old, solver.t
        dense = solver.dense_output()
        segments.append((a, b, dense))
        ts = np.linspace(a, b, nsub + 1)
        us = dense(ts)

        # crossings
        vals = eng.event_values(us)
        found = []
        for name, g in vals.items():
            if name == "cyl" and not eng.linear:
                continue
            # curvature values below the noise floor carry no sign information
            floor = gamma_noise if name == "gamma" else 0.0
            keep = np.flatnonzero(np.isfinite(g) & (np.abs(g) > floor))
            for i0, i1 in zip(keep[:-1], keep[1:]):
                if g[i0] * g[i1] > 0:
                    continue
                root = _locate(name, eng, dense, ts[i0], ts[i1])
                if abs(root - s_start) <= 1e-10:
                    continue
                found.append((root, name, dense(root)))
        found.sort(key=lambda r: direction * r[0])
        for root, name, u in found:
            if name == "y0":
                events.append(_make_event(EventKind.CROSS_Y0, root, u))
                n_y0 += 1
            elif name == "turn":
                kind = EventKind.TURN_PLUS if math.cos(u[2]) > 0 else EventKind.TURN_MINUS
                ev = _make_event(kind, root, u)
                # eps after the turn, in the direction of integration
                after = dense(root + direction * 1e-9 * max(1.0, abs(b - a)))
                events.append(replace(ev, eps=1 if math.sin(after[2]) >= 0 else -1))
                n_turns += 1
            elif name == "gamma":
                events.append(_make_event(EventKind.CROSS_GAMMA, root, u))
            else:
                events.append(_make_event(EventKind.CROSS_CYLINDER, root, u))

        # winding about e0 in the eps = 1 sheet
        for j in range(nsub + 1):
            xj, thj = us[0, j], us[2, j]
            if math.sin(thj) > 0:
                phi = math.atan2(math.cos(thj), xj - eng.center)
                if prev_phase is not None:
                    d = phi - prev_phase
                    d -= 2 * math.pi * round(d / (2 * math.pi))
                    acc_angle += d
                prev_phase = phi
            else:
                acc_angle, prev_phase = 0.0, None
        winding = int(abs(acc_angle) / math.pi) // 2

        u = solver.y
        x, th = float(u[0]), float(u[2])
        if opts.stop_after_y0 is not None and n_y0 >= opts.stop_after_y0:
            last = [e for e in events if e.kind is EventKind.CROSS_Y0][opts.stop_after_y0 - 1]
            termination = replace(last, kind=EventKind.BUDGET, data={"reason": "y0_crossings"})
            break
        if np.any(us[0] <= opts.axis_tol):
            termination = _make_event(EventKind.STEP_FAILURE, b, u, cause=EventKind.AXIS_CONTACT.value)
            break
        if eng.linear:
            in_sheet = math.sin(th) > 0
            dist = math.hypot(x - eng.center, math.cos(th))
            if in_sheet and dist < max(opts.e0_radius, 0.0):
                lyap_hist.append(eng.lyap(x, th))
            else:
                lyap_hist.clear()
            decreasing = len(lyap_hist) >= 3 and lyap_hist[-3] > lyap_hist[-2] > lyap_hist[-1]
            if decreasing:
                termination = _make_event(EventKind.CONVERGED_E0, b, u, winding=winding,
                                          saturated=False, distance=dist)
                break
            if winding >= opts.winding_cap and in_sheet:
                termination = _make_event(EventKind.CONVERGED_E0, b, u, winding=winding,
                                          saturated=True, distance=dist)
                break
            if p.lam <= 1.0 and abs(math.cos(th) + p.lam) < opts.e0_radius and x > 0.5 * x_max:
                termination = _make_event(EventKind.CONVERGED_ASYMPTOTE, b, u, y_lim=-p.lam)
                break
        if x > x_max:
            termination = _make_event(EventKind.ESCAPED, b, u, x_max=x_max)
            break
        if n_turns >= turn_cap:
            termination = _make_event(EventKind.BUDGET, b, u, reason="turn_cap", turn_cap=turn_cap)
            break

    s_end = termination.s
    events = [e for e in events if direction * (e.s - s_end) <= 0]
    events.append(termination)
    if termination.kind is EventKind.CONVERGED_E0:
        winding = termination.data["winding"]
    trace = _resample(seed, f, opts, segments, s_start, s_end, direction, anchor, events,
                      termination, winding)
    trace.meta.update({"x_max": x_max, "center": eng.center, "direction": direction})
    _check_axis_postcondition(trace)
    return trace


def _locate(name, eng, dense, a, b):
    if name == "y0":
        g = lambda t: math.cos(dense(t)[2])  # noqa: E731
    elif name == "turn":
        g = lambda t: math.sin(dense(t)[2])  # noqa: E731
    elif name == "gamma":
        def g(t):
            u = dense(t)
            return float(eng.kappa(u[0], u[2]))
    else:
        g = lambda t: dense(t)[0] - eng.center  # noqa: E731
    lo, hi = (a, b) if a < b else (b, a)
    return brentq(g, lo, hi, xtol=EVENT_XTOL, rtol=4 * np.finfo(float).eps)


def _sample_grid(s_start, s_end, direction, step, max_fine, seg_ends, anchor_at_zero):
    origin = 0.0 if anchor_at_zero else s_start
    length = abs(s_end - origin)
    k_fine = min(int(math.floor(length / step + 1e-9)), max_fine)
    fine = origin + direction * step * np.arange(k_fine + 1)
    pts = [fine]
    fine_end = fine[-1]
    tail = np.array([t for t in seg_ends if direction * (t - fine_end) > step and direction * (s_end - t) > step])
    if len(tail):
        pts.append(np.column_stack([tail - direction * step, tail, tail + direction * step]).ravel())
    pts.append([s_end])
    s = np.concatenate(pts)
    s = s[direction * (s - origin) >= 0]
    s = np.unique(s)
    if direction < 0:
        s = s[::-1]
    return s, float(fine_end)


def _resample(seed, f, opts, segments, s_start, s_end, direction, anchor, events, termination, winding):
    seg_ends = [b for _, b, _ in segments]
    s, fine_end = _sample_grid(s_start, s_end, direction, opts.sample_step, opts.max_fine_samples,
                               seg_ends, anchor is not None)
    out = np.empty((3, len(s)))
    starts = np.array([a for a, _, _ in segments])
    key = direction * s
    seg_start_key = direction * starts
    idx = np.searchsorted(seg_start_key, key, side="right") - 1
    # samples are ordered along the integration, so each segment owns a contiguous run
    bounds = np.flatnonzero(np.diff(idx)) + 1
    for lo, hi in zip(np.r_[0, bounds], np.r_[bounds, len(s)]):
        k = idx[lo]
        if k < 0:
            # before the first solver point: only the exact axis anchor lives here
            for i in range(lo, hi):
                out[:, i] = anchor[1] if s[i] == anchor[0] else segments[0][2](s[i])
            continue
        out[:, lo:hi] = segments[k][2](s[lo:hi])
    if anchor is not None:
        out[:, s == anchor[0]] = anchor[1][:, None]
    meta = {"fine_end": fine_end, "coarse_tail": bool(direction * (s_end - fine_end) > opts.sample_step)}
    return OrbitTrace(seed, f, s, out[0], out[1], out[2], events, termination, winding, opts,
                      meta, segments)


def dyadic_step(step: float) -> float:
    """Largest power of two <= step; multiples of it are exact in floating point."""
    return 2.0 ** math.floor(math.log2(step))


def _exact_flat(seed, f, opts, events, x_max):
    """Horizontal hyperplane through the axis point, which solves the problem when h(delta) = 0.

    For delta = -1 the profile is x = -s, theta = pi (downward normal); for
    delta = +1 it is x = s, theta = 0.
    """
    step = dyadic_step(opts.sample_step)
    length = min(opts.s_max, x_max, opts.max_fine_samples * opts.sample_step)
    k = int(math.floor(length / step + 1e-9))
    delta = seed.delta
    s = delta * step * np.arange(k + 1)
    x = step * np.arange(k + 1)
    theta = 0.0 if delta == 1 else math.pi
    term = Event(EventKind.EXACT, float(s[-1]), float(x[-1]), float(delta), 1, {"solution": "Hyperplane"})
    events = events + [term]
    return OrbitTrace(seed, f, s, x, np.zeros_like(s), np.full_like(s, theta), events, term, 0,
                      opts, {"exact": "Hyperplane", "direction": delta})


def _exact_cylinder(seed, f, opts, direction, radius):
    """The equilibrium itself: the vertical line x = radius traversed upward or downward."""
    step = dyadic_step(opts.sample_step)
    length = min(opts.s_max, opts.max_fine_samples * opts.sample_step, 10.0)
    k = int(math.floor(length / step + 1e-9))
    s = direction * step * np.arange(k + 1)
    th = np.full_like(s, seed.eps0 * 0.5 * math.pi)
    term = Event(EventKind.EXACT, float(s[-1]), radius, 0.0, seed.eps0, {"solution": "RoundCylinder"})
    return OrbitTrace(seed, f, s, np.full_like(s, radius), seed.eps0 * s, th, [term], term, 0,
                      opts, {"exact": "RoundCylinder", "center": radius, "direction": direction})


def _check_axis_postcondition(trace: OrbitTrace):
    inner = trace.x <= 0.0
    if trace.seed.kind is not SeedKind.INTERIOR:
        inner &= trace.s != 0.0
    if np.any(inner & (np.abs(np.cos(trace.theta)) < 1.0)):
        raise RuntimeError("orbit reached {x = 0, |y| < 1}")


# --- profiles ---------------------------------------------------------------

@dataclass
class ProfileCurve:
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    self_intersections: int
    is_graph_over_axis: bool
    is_horizontal_graph: bool
    params: ModelParams
    prescribed: PrescribedFunction

    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.z])

    def principal_curvatures(self) -> tuple[np.ndarray, np.ndarray]:
        """(kappa_alpha, z'/x): the profile curvature and the (n-1)-fold rotational one."""
        with np.errstate(divide="ignore", invalid="ignore"):
            rot = np.sin(self.theta) / self.x
        return self.kappa, np.where(self.x == 0, self.kappa, rot)

    def convexity_sign(self) -> int:
        """+1 or -1 if all principal curvatures share that strict sign everywhere, else 0.

        The sign depends on the orientation; strict convexity is the statement
        that it is nonzero.
        """
        k, r = self.principal_curvatures()
        both = np.concatenate([k, r])
        if np.all(both > 0):
            return 1
        if np.all(both < 0):
            return -1
        return 0


def profile_kappa(x, theta, p: ModelParams, f: PrescribedFunction):
    c, sn = np.cos(theta), np.sin(theta)
    h = (c + p.lam) if f.kind is PrescribedKind.LINEAR else 0.5 * np.cos(0.5 * np.pi * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = p.n * h - (p.n - 1) * sn / x
    # at the axis all principal curvatures equal h(delta)
    on_axis = x == 0
    k = np.where(on_axis, h, k)
    return k


def _strictly_monotone(a: np.ndarray) -> bool:
    d = np.diff(a)
    return bool(np.all(d > 0) or np.all(d < 0))


def reconstruct_profile(trace: OrbitTrace) -> ProfileCurve:
    """Planar profile with curvature, self-intersection count and graph flags."""
    if len(trace.s) < 2:
        raise ValueError("trace needs at least two samples")
    order = np.argsort(trace.s, kind="stable")
    s, x, z, th = trace.s[order], trace.x[order], trace.z[order], trace.theta[order]
    p, f = trace.params, trace.prescribed
    kappa = profile_kappa(x, th, p, f)
    pts = np.column_stack([x, z])
    return ProfileCurve(
        s, x, z, th, kappa,
        self_intersections=count_self_intersections(pts),
        is_graph_over_axis=_strictly_monotone(z),
        is_horizontal_graph=_strictly_monotone(x),
        params=p, prescribed=f,
    )


def profile_from_samples(s, x, z, theta, p: ModelParams,
                         f: PrescribedFunction | None = None) -> ProfileCurve:
    f = f or PrescribedFunction.linear(p.lam)
    s, x, z, th = map(lambda a: np.asarray(a, dtype=float), (s, x, z, theta))
    return ProfileCurve(s, x, z, th, profile_kappa(x, th, p, f),
                        count_self_intersections(np.column_stack([x, z])),
                        _strictly_monotone(z), _strictly_monotone(x), p, f)


def exact_cylinder_profile(p: ModelParams, length: float = 10.0, step: float = 1e-3) -> ProfileCurve:
    step = dyadic_step(step)
    k = int(round(length / step))
    s = step * np.arange(k + 1)
    x = np.full_like(s, p.cylinder_radius)
    return profile_from_samples(s, x, s.copy(), np.full_like(s, 0.5 * math.pi), p)


def exact_hyperplane_profile(p: ModelParams, length: float = 10.0, step: float = 1e-3) -> ProfileCurve:
    if p.lam != 1.0:
        raise ValueError("the horizontal hyperplane is a solution only for lambda = 1")
    step = dyadic_step(step)
    k = int(round(length / step))
    i = np.arange(k + 1)
    return profile_from_samples(-step * i, step * i, np.zeros(k + 1), np.full(k + 1, math.pi), p)


@dataclass(frozen=True)
class ResidualResult:
    max_residual: float
    points: int
    skipped: int
    warnings: tuple
    fourth_order: int = 0

    def __float__(self):
        return self.max_residual


def _uniform_stencil(s, half: int, max_step: float) -> np.ndarray:
    """Indices i whose neighbours i-half..i+half are equally spaced by at most max_step."""
    d = np.diff(s)
    i = np.arange(half, len(s) - half)
    ref = d[i] if len(i) else d[:0]
    ok = np.abs(ref) <= max_step * (1 + 1e-9)
    for k in range(-half, half):
        ok &= np.abs(d[i + k] - ref) <= 1e-9 * np.abs(ref)
    return i[ok]


def curvature_residual(profile: ProfileCurve, p: ModelParams | None = None,
                       max_step: float = 1e-3) -> ResidualResult:
    """Max |H_fd - h(x')| with H_fd from central differences of (x(s), z(s)) only.

    H_fd = (x' z'' - x'' z' + (n - 1) z' / x) / n is the mean curvature of the
    surface of revolution. Derivatives use the fourth-order five-point stencil
    where five equally spaced samples are available and the three-point one
    otherwise (e.g. the sparse triples of a long tail). Samples with no equal
    stencil of spacing <= ``max_step`` are counted as skipped and reported in
    the warnings.
    """
    p = p or profile.params
    f = profile.prescribed
    s, x, z = profile.s, profile.x, profile.z
    if len(s) < 3:
        return ResidualResult(0.0, 0, len(s), ("too few samples",))
    i5 = _uniform_stencil(s, 2, max_step)
    i3 = np.setdiff1d(_uniform_stencil(s, 1, max_step), i5)
    i5, i3 = i5[x[i5] > 0], i3[x[i3] > 0]
    warnings = []
    used = len(i5) + len(i3)
    skipped = int(len(s) - 2 - used)
    if skipped:
        warnings.append(f"{skipped} samples without an equal-spacing stencil <= {max_step:g} skipped")
    if used == 0:
        return ResidualResult(float("nan"), 0, skipped, tuple(warnings) + ("sampling too coarse",))

    # offsets from the centre value, so constants cancel exactly
    def d5(u, i, h):
        a, b, c, d = (u[i + k] - u[i] for k in (-2, -1, 1, 2))
        d1 = (a - 8 * b + 8 * c - d) / (12 * h)
        d2 = (-a + 16 * b + 16 * c - d) / (12 * h * h)
        return d1, d2

    def d3(u, i, h):
        b, c = u[i - 1] - u[i], u[i + 1] - u[i]
        return (c - b) / (2 * h), (c + b) / (h * h)

    res = []
    for idx, diff in ((i5, d5), (i3, d3)):
        if len(idx) == 0:
            continue
        h = s[idx + 1] - s[idx]
        dx, ddx = diff(x, idx, h)
        dz, ddz = diff(z, idx, h)
        h_fd = (dx * ddz - ddx * dz + (p.n - 1) * dz / x[idx]) / p.n
        target = np.clip(dx, -1.0, 1.0)
        if f.kind is PrescribedKind.LINEAR:
            target = target + p.lam
        else:
            target = 0.5 * np.cos(0.5 * np.pi * target)
        res.append(np.abs(h_fd - target))
    return ResidualResult(float(max(r.max() for r in res)), used, skipped, tuple(warnings), len(i5))


# --- comparison orbits --------------------------------------------------------

@dataclass(frozen=True)
class ComparisonResult:
    closed: bool
    symmetric: bool
    avoids_poles: bool
    closure_gap: float
    symmetry_gap: float
    period: float

    @property
    def ok(self) -> bool:
        return self.closed and self.symmetric and self.avoids_poles


def comparison_orbit(p: ModelParams, x0_star: float, tol: float = 1e-12,
                     gate: float = 1e-6, samples: int = 2001) -> ComparisonResult:
    """Orbit of the cosine comparison prescription through (x0_star, 0).

    Integrates one period (two further y = 0 crossings) and measures how far
    the orbit is from closing and from being symmetric under y -> -y. The
    symmetry gap pairs gamma(s1 + t) with the reflection of gamma(s1 - t) about
    the first crossing s1, an upper bound for the Hausdorff distance of the
    two halves.
    """
    if not x0_star > 0:
        raise ValueError("x0_star must be positive")
    f = PrescribedFunction.cosine()
    center = center_of(p, f)
    if abs(x0_star - center) <= 1e-12 * center:
        return ComparisonResult(True, True, True, 0.0, 0.0, 0.0)
    opts = OrbitOptions(tol=tol, s_max=1e3, stop_after_y0=2, max_fine_samples=0)
    trace = integrate_orbit(OrbitSeed.interior(p, x0_star, 0.0, 1), f, opts)
    crossings = trace.events_of(EventKind.CROSS_Y0)
    avoids = not trace.turns
    if len(crossings) < 2:
        return ComparisonResult(False, False, avoids, math.inf, math.inf, math.nan)
    s1, s2 = crossings[0].s, crossings[1].s
    end = trace.state_at(s2)
    gap = math.hypot(end[0] - x0_star, math.cos(end[2]))
    t = np.linspace(0.0, s1, samples)
    fwd = np.array([trace.state_at(s1 + ti) for ti in t])
    bwd = np.array([trace.state_at(s1 - ti) for ti in t])
    sym = float(np.max(np.hypot(fwd[:, 0] - bwd[:, 0], np.cos(fwd[:, 2]) + np.cos(bwd[:, 2]))))
    return ComparisonResult(gap < gate, sym < gate, avoids, gap, sym, s2)


def comparison_orbit_check(p: ModelParams, x0_star: float) -> bool:
    """True iff the comparison orbit through (x0_star, 0) is closed, symmetric and avoids y = +-1."""
    if p.lam != 1.0:
        raise ValueError("the comparison argument is set up for lambda = 1")
    return comparison_orbit(p, x0_star).ok
