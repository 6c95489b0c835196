"""Numerical flow-category construction on flat tori.

Functions are exact trigonometric polynomials with rational coefficients on
T^n, n <= 3.  Critical points come from damped Newton iteration on the
gradient over a seed grid; connecting orbits from adaptive fourth-order
integration of the negative gradient flow; signs from transporting a fixed
unstable-manifold frame along each rigid trajectory; and one-parameter
families on the two-torus from a bisection partition of the departure
circle of an index-2 point.

Landing basins on the departure circle are told apart by both the rest
point reached and the integer lattice offset of the unwrapped trajectory,
so distinct family components that reach the same rest point stay
distinct.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    EulerMismatchError,
    IncoherentOrientationError,
    InputError,
    IntegrationFailureError,
    MorseSmaleViolationError,
    NotMorseError,
    UnmatchedEndpointError,
)
from .flowcat import (
    BrokenFlow,
    CircleComponent,
    FlowCategory,
    IntervalComponent,
    ModuliFamily,
    OrientationData,
    RigidFlow,
    check_orientation_coherence,
    validate_morse_smale,
)

TWO_PI = 2.0 * math.pi


# -- exact trigonometric functions ------------------------------------------


def _parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise InputError("boolean is not a coefficient")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {value!r}: {exc}") from None
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    raise InputError(f"bad rational {value!r}")


def _emit_rational(q: Fraction):
    return int(q) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class TrigTerm:
    """One term c*cos(2 pi k.x) + s*sin(2 pi k.x) with integer frequency k."""

    frequency: tuple[int, ...]
    cos_coeff: Fraction = Fraction(0)
    sin_coeff: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "frequency", tuple(int(k) for k in self.frequency))
        object.__setattr__(self, "cos_coeff", _parse_rational(self.cos_coeff))
        object.__setattr__(self, "sin_coeff", _parse_rational(self.sin_coeff))


@dataclass(frozen=True)
class TrigPolynomial:
    """A finite trigonometric polynomial on the flat torus T^dimension."""

    dimension: int
    terms: tuple[TrigTerm, ...]

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise InputError("dimension must be 1, 2, or 3")
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        for t in terms:
            if len(t.frequency) != self.dimension:
                raise InputError(
                    f"frequency {t.frequency} does not match dimension {self.dimension}"
                )
        if not any(
            any(t.frequency) and (t.cos_coeff or t.sin_coeff) for t in terms
        ):
            raise InputError("need at least one nonconstant term")

    def to_json(self) -> dict:
        return {
            "dim": self.dimension,
            "terms": [
                {
                    "freq": list(t.frequency),
                    "cos": _emit_rational(t.cos_coeff),
                    "sin": _emit_rational(t.sin_coeff),
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrigPolynomial":
        try:
            dim = int(data["dim"])
            raw = data["terms"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad function payload: {exc}") from None
        terms = []
        for rec in raw:
            terms.append(
                TrigTerm(
                    tuple(int(k) for k in rec["freq"]),
                    _parse_rational(rec.get("cos", 0)),
                    _parse_rational(rec.get("sin", 0)),
                )
            )
        return cls(dim, tuple(terms))


class _Compiled:
    """Float-compiled evaluators for one trigonometric polynomial."""

    def __init__(self, f: TrigPolynomial):
        self.n = f.dimension
        self.freqs = np.array([t.frequency for t in f.terms], dtype=float)
        self.cos = np.array([float(t.cos_coeff) for t in f.terms])
        self.sin = np.array([float(t.sin_coeff) for t in f.terms])
        self.scalar_terms = [
            (
                tuple(float(k) for k in t.frequency),
                float(t.cos_coeff),
                float(t.sin_coeff),
            )
            for t in f.terms
        ]

    # scalar paths (hot loop of the integrator)

    def value(self, x: Sequence[float]) -> float:
        total = 0.0
        for freq, c, s in self.scalar_terms:
            ph = 0.0
            for j in range(self.n):
                ph += freq[j] * x[j]
            ph *= TWO_PI
            total += c * math.cos(ph) + s * math.sin(ph)
        return total

    def neg_grad(self, x: Sequence[float]) -> list[float]:
        n = self.n
        g = [0.0] * n
        for freq, c, s in self.scalar_terms:
            ph = 0.0
            for j in range(n):
                ph += freq[j] * x[j]
            ph *= TWO_PI
            w = TWO_PI * (c * math.sin(ph) - s * math.cos(ph))
            for j in range(n):
                g[j] += w * freq[j]
        return g

    # vectorized paths

    def np_grad(self, x: np.ndarray) -> np.ndarray:
        ph = TWO_PI * (self.freqs @ x)
        w = TWO_PI * (self.sin * np.cos(ph) - self.cos * np.sin(ph))
        return w @ self.freqs

    def np_hess(self, x: np.ndarray) -> np.ndarray:
        ph = TWO_PI * (self.freqs @ x)
        w = -TWO_PI * TWO_PI * (self.cos * np.cos(ph) + self.sin * np.sin(ph))
        return (self.freqs * w[:, None]).T @ self.freqs

    def grad_batch(self, x: np.ndarray) -> np.ndarray:
        ph = TWO_PI * (x @ self.freqs.T)
        w = TWO_PI * (np.cos(ph) * self.sin - np.sin(ph) * self.cos)
        return w @ self.freqs

    def hess_batch(self, x: np.ndarray) -> np.ndarray:
        ph = TWO_PI * (x @ self.freqs.T)
        w = -TWO_PI * TWO_PI * (np.cos(ph) * self.cos + np.sin(ph) * self.sin)
        return np.einsum("pt,ti,tj->pij", w, self.freqs, self.freqs)


@functools.lru_cache(maxsize=64)
def _compiled(f: TrigPolynomial) -> _Compiled:
    return _Compiled(f)


def eval_grad_hess(f: TrigPolynomial, x: Sequence[float]):
    """Value, gradient, and second-derivative matrix of f at x."""
    if len(x) != f.dimension:
        raise InputError(f"point has {len(x)} coordinates, expected {f.dimension}")
    comp = _compiled(f)
    xv = np.asarray(x, dtype=float)
    return comp.value(list(xv)), comp.np_grad(xv), comp.np_hess(xv)


# -- configuration and result types -----------------------------------------


@dataclass(frozen=True)
class NumericalConfig:
    """Tolerances and resolutions for the numerical pipeline."""

    grid_resolution: int = 32
    newton_tol: float = 1e-12
    newton_max_iter: int = 80
    grad_tol: float = 1e-10
    dedupe_radius: float = 1e-7
    nondeg_tol: float = 1e-6
    sphere_radius: float = 1e-3
    landing_radius: float = 1e-4
    step_init: float = 1e-2
    step_min: float = 1e-9
    step_max: float = 5e-2
    step_tol: float = 1e-8
    bisection_tol: float = 1e-10
    max_flow_time: float = 60.0
    max_steps: int = 200000
    circle_samples: int = 64
    endpoint_match_tol: float = 1e-6
    probe_offset: float = 1e-3
    reverse_orientation: bool = False

    def __post_init__(self):
        for name in (
            "grid_resolution", "newton_tol", "newton_max_iter", "grad_tol",
            "dedupe_radius", "nondeg_tol", "sphere_radius", "landing_radius",
            "step_init", "step_min", "step_max", "step_tol", "bisection_tol",
            "max_flow_time", "max_steps", "circle_samples",
            "endpoint_match_tol", "probe_offset",
        ):
            if getattr(self, name) <= 0:
                raise InputError(f"config field {name} must be positive")
        if self.landing_radius >= self.sphere_radius:
            raise InputError("landing radius must be below the departure radius")

    def with_overrides(self, **kwargs) -> "NumericalConfig":
        return replace(self, **kwargs)

    @classmethod
    def from_json(cls, data: dict) -> "NumericalConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        bad = set(data) - known
        if bad:
            raise InputError(f"unknown config fields: {sorted(bad)}")
        return cls(**data)


@dataclass(frozen=True)
class CriticalPoint:
    """A nondegenerate rest point of the gradient flow."""

    id: str
    position: tuple[float, ...]
    value: float
    index: int
    hessian_eigenvalues: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "position": list(self.position),
            "value": self.value,
            "index": self.index,
            "hessian_eigenvalues": list(self.hessian_eigenvalues),
        }


@dataclass(frozen=True)
class FlowLine:
    """A rigid trajectory between critical points with its transported sign."""

    id: str
    source: str
    target: str
    sign: int
    departure_direction: tuple[float, ...]
    departure_angle: float | None
    lattice_offset: tuple[int, ...]
    trajectory: tuple[tuple[float, tuple[float, ...]], ...]


@dataclass(frozen=True)
class IntervalFamily:
    """A one-parameter interval of flows with matched broken-flow endpoints."""

    start_angle: float
    end_angle: float
    start_break: tuple[FlowLine, FlowLine]
    end_break: tuple[FlowLine, FlowLine]


@dataclass(frozen=True)
class CircleFamily:
    """A closed one-parameter family covering the whole departure circle."""


# -- torus geometry helpers -------------------------------------------------


def _torus_residual(x: Sequence[float], p: Sequence[float]):
    """Nearest-lift displacement of x from p: (residual, lattice offset, distance)."""
    res = []
    off = []
    d2 = 0.0
    for xi, pi in zip(x, p):
        d = xi - pi
        o = round(d)
        r = d - o
        res.append(r)
        off.append(int(o))
        d2 += r * r
    return res, tuple(off), math.sqrt(d2)


def torus_distance(x: Sequence[float], p: Sequence[float]) -> float:
    return _torus_residual(x, p)[2]


class _Landing(NamedTuple):
    point: CriticalPoint
    offset: tuple[int, ...]
    time: float
    state: tuple[float, ...]
    trajectory: tuple[tuple[float, tuple[float, ...]], ...] | None


class _Boundary(NamedTuple):
    angle: float
    saddle: CriticalPoint
    landing: _Landing


class _Arc(NamedTuple):
    start: float
    end: float
    landing_class: tuple[str, tuple[int, ...]]


# -- critical point search --------------------------------------------------


def find_critical_points(
    f: TrigPolynomial, cfg: NumericalConfig = NumericalConfig()
) -> list[CriticalPoint]:
    """Locate all critical points via Newton iteration from a uniform seed grid.

    Raises NotMorseError when a converged point has a near-singular second
    derivative and EulerMismatchError when signed counts fail to cancel
    (a symptom of missed points; raise the grid resolution).
    """
    comp = _compiled(f)
    n = f.dimension
    res = cfg.grid_resolution
    axes = [np.arange(res) / res] * n
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    active = np.ones(len(x), dtype=bool)
    for _ in range(cfg.newton_max_iter):
        g = comp.grad_batch(x)
        gnorm = np.linalg.norm(g, axis=1)
        work = active & (gnorm > cfg.newton_tol)
        if not work.any():
            break
        h = comp.hess_batch(x[work])
        dets = np.linalg.det(h)
        ok = np.abs(dets) > 1e-300
        idx = np.flatnonzero(work)
        active[idx[~ok]] = False
        if not ok.any():
            break
        step = np.linalg.solve(h[ok], g[work][ok][..., None])[..., 0]
        norms = np.linalg.norm(step, axis=1)
        big = norms > 0.25
        if big.any():
            step[big] *= (0.25 / norms[big])[:, None]
        x[idx[ok]] -= step
        x[idx[ok]] %= 1.0

    g = comp.grad_batch(x)
    gnorm = np.linalg.norm(g, axis=1)
    keep = active & (gnorm <= cfg.grad_tol)
    candidates = sorted(
        (tuple(float(v) % 1.0 for v in pt), float(gn))
        for pt, gn in zip(x[keep], gnorm[keep])
    )
    reps: list[tuple[tuple[float, ...], float]] = []
    for pt, gn in candidates:
        for i, (rp, rg) in enumerate(reps):
            if torus_distance(pt, rp) <= cfg.dedupe_radius:
                if gn < rg:
                    reps[i] = (pt, gn)
                break
        else:
            reps.append((pt, gn))

    enriched = []
    for pt, _ in reps:
        xv = np.array(pt)
        hess = comp.np_hess(xv)
        eigs = np.linalg.eigvalsh(hess)
        if np.min(np.abs(eigs)) < cfg.nondeg_tol:
            raise NotMorseError(
                f"degenerate critical point near {tuple(round(v, 9) for v in pt)}: "
                f"second-derivative eigenvalues {[float(e) for e in eigs]}"
            )
        index = int(np.sum(eigs < 0.0))
        enriched.append((pt, comp.value(list(pt)), index, tuple(float(e) for e in eigs)))

    euler = sum((-1) ** e[2] for e in enriched)
    if euler != 0:
        raise EulerMismatchError(
            f"signed critical point count is {euler}, expected 0; "
            "raise grid_resolution"
        )

    enriched.sort(key=lambda e: (-e[2], tuple(round(v, 9) for v in e[0])))
    out = []
    counters: dict[int, int] = {}
    for pt, val, index, eigs in enriched:
        k = counters.get(index, 0)
        counters[index] = k + 1
        out.append(CriticalPoint(f"p{index}.{k}", pt, val, index, eigs))
    return out


# -- the trajectory engine --------------------------------------------------


class _Analysis:
    """Shared caches for one function + configuration pair."""

    def __init__(
        self,
        f: TrigPolynomial,
        cfg: NumericalConfig,
        critical_points: list[CriticalPoint] | None = None,
    ):
        self.f = f
        self.cfg = cfg
        self.comp = _compiled(f)
        self.n = f.dimension
        self.points = (
            list(critical_points)
            if critical_points is not None
            else find_critical_points(f, cfg)
        )
        self.by_id = {p.id: p for p in self.points}
        dists = [
            torus_distance(p.position, q.position)
            for i, p in enumerate(self.points)
            for q in self.points[i + 1 :]
        ]
        self.min_separation = min(dists) if dists else 1.0
        if cfg.sphere_radius >= 0.5 * self.min_separation:
            raise InputError(
                "departure radius is not below half the minimal distance "
                "between critical points"
            )
        self._frames: dict[str, np.ndarray] = {}
        self._partitions: dict[str, tuple[list[_Boundary], list[_Arc]]] = {}

    # frames ---------------------------------------------------------------

    def unstable_frame(self, p: CriticalPoint) -> np.ndarray:
        """Ordered eigenbasis of the negative eigenspace, sign-normalized columns."""
        cached = self._frames.get(p.id)
        if cached is not None:
            return cached
        hess = self.comp.np_hess(np.array(p.position))
        w, q = np.linalg.eigh(hess)
        cols = q[:, : int(np.sum(w < 0.0))].copy()
        for j in range(cols.shape[1]):
            col = cols[:, j]
            lead = next((v for v in col if abs(v) > 1e-8), 1.0)
            if lead < 0:
                cols[:, j] = -col
        if self.cfg.reverse_orientation and cols.shape[1]:
            cols[:, 0] = -cols[:, 0]
        self._frames[p.id] = cols
        return cols

    # integration ----------------------------------------------------------

    def _land(self, x: Sequence[float]) -> tuple[CriticalPoint, tuple[int, ...]] | None:
        for cp in self.points:
            res, off, dist = _torus_residual(x, cp.position)
            if dist <= self.cfg.landing_radius:
                return cp, off
        return None

    def integrate(self, x0: Sequence[float], record: bool = False) -> _Landing:
        """Follow the negative gradient from x0 until it rests near a critical point."""
        cfg = self.cfg
        comp = self.comp
        n = self.n
        g = comp.neg_grad
        x = list(x0)
        t = 0.0
        h = cfg.step_init
        fx = comp.value(x)
        traj = [(0.0, tuple(x))] if record else None
        steps = 0
        while t <= cfg.max_flow_time:
            hit = self._land(x)
            if hit is not None:
                return _Landing(
                    hit[0], hit[1], t, tuple(x), tuple(traj) if record else None
                )
            steps += 1
            if steps > cfg.max_steps:
                raise IntegrationFailureError("step budget exhausted")
            while True:
                k1 = g(x)
                half_h = 0.5 * h
                k2 = g([x[j] + half_h * k1[j] for j in range(n)])
                k3 = g([x[j] + half_h * k2[j] for j in range(n)])
                k4 = g([x[j] + h * k3[j] for j in range(n)])
                full = [
                    x[j] + (h / 6.0) * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
                    for j in range(n)
                ]
                quarter = 0.25 * h
                m1 = k1
                m2 = g([x[j] + quarter * m1[j] for j in range(n)])
                m3 = g([x[j] + quarter * m2[j] for j in range(n)])
                m4 = g([x[j] + half_h * m3[j] for j in range(n)])
                mid = [
                    x[j] + (half_h / 6.0) * (m1[j] + 2.0 * (m2[j] + m3[j]) + m4[j])
                    for j in range(n)
                ]
                l1 = g(mid)
                l2 = g([mid[j] + quarter * l1[j] for j in range(n)])
                l3 = g([mid[j] + quarter * l2[j] for j in range(n)])
                l4 = g([mid[j] + half_h * l3[j] for j in range(n)])
                twohalf = [
                    mid[j] + (half_h / 6.0) * (l1[j] + 2.0 * (l2[j] + l3[j]) + l4[j])
                    for j in range(n)
                ]
                err = max(abs(full[j] - twohalf[j]) for j in range(n))
                if err > cfg.step_tol and h > cfg.step_min:
                    h = max(0.5 * h, cfg.step_min)
                    continue
                xn = [twohalf[j] + (twohalf[j] - full[j]) / 15.0 for j in range(n)]
                fn = comp.value(xn)
                if fn >= fx:
                    if h > cfg.step_min:
                        h = max(0.5 * h, cfg.step_min)
                        continue
                    raise IntegrationFailureError(
                        "function value failed to decrease at the minimal step"
                    )
                break
            x = xn
            fx = fn
            t += h
            if record:
                traj.append((t, tuple(x)))
            if err * 32.0 < cfg.step_tol:
                h = min(2.0 * h, cfg.step_max)
        raise IntegrationFailureError(
            f"no rest point reached within flow time {cfg.max_flow_time}"
        )

    # classification -------------------------------------------------------

    def seed(self, p: CriticalPoint, direction: np.ndarray) -> list[float]:
        return [
            p.position[j] + self.cfg.sphere_radius * float(direction[j])
            for j in range(self.n)
        ]

    def classify(self, p: CriticalPoint, direction: np.ndarray) -> _Landing:
        landing = self.integrate(self.seed(p, direction))
        if landing.point.index >= p.index:
            raise MorseSmaleViolationError(
                f"trajectory from {p.id} reached {landing.point.id} of index "
                f"{landing.point.index} >= {p.index}"
            )
        return landing

    # index-1 sources --------------------------------------------------------

    def saddle_flows(self, a: CriticalPoint) -> list[FlowLine]:
        if a.index != 1:
            raise InputError("saddle_flows requires an index-1 source")
        w = self.unstable_frame(a)[:, 0]
        flows = []
        counters: dict[str, int] = {}
        for direction in (w, -w):
            landing = self.classify(a, direction)
            target = landing.point
            rec = self.integrate(self.seed(a, direction), record=True)
            if rec.point.id != target.id:
                raise MorseSmaleViolationError("landing changed between passes")
            sign = self.transport_sign(a, direction, target)
            k = counters.get(target.id, 0)
            counters[target.id] = k + 1
            flows.append(
                FlowLine(
                    id=f"{a.id}>{target.id}#{k}",
                    source=a.id,
                    target=target.id,
                    sign=sign,
                    departure_direction=tuple(float(v) for v in direction),
                    departure_angle=None,
                    lattice_offset=rec.offset,
                    trajectory=rec.trajectory,
                )
            )
        return flows

    # index-2 sources --------------------------------------------------------

    def direction_at(self, a: CriticalPoint, theta: float) -> np.ndarray:
        frame = self.unstable_frame(a)
        return math.cos(theta) * frame[:, 0] + math.sin(theta) * frame[:, 1]

    def _classify_angle(self, a: CriticalPoint, theta: float):
        landing = self.classify(a, self.direction_at(a, theta))
        if landing.point.index == 0:
            return ("sink", (landing.point.id, landing.offset), landing)
        return ("saddle", None, landing)

    def partition(self, a: CriticalPoint) -> tuple[list[_Boundary], list[_Arc]]:
        """Split the departure circle of an index-2 point by landing class."""
        if a.index != 2:
            raise InputError("circle partition requires an index-2 source")
        cached = self._partitions.get(a.id)
        if cached is not None:
            return cached
        cfg = self.cfg
        n_samples = cfg.circle_samples
        step = TWO_PI / n_samples
        thetas = [k * step for k in range(n_samples)]
        results = [self._classify_angle(a, th) for th in thetas]

        boundaries: list[_Boundary] = []
        for k, (kind, _, landing) in enumerate(results):
            if kind == "saddle":
                boundaries.append(_Boundary(thetas[k], landing.point, landing))
        for k in range(n_samples):
            kind0, cls0, _ = results[k]
            kind1, cls1, _ = results[(k + 1) % n_samples]
            if kind0 != "sink" or kind1 != "sink":
                continue
            if cls0 == cls1:
                continue
            boundaries.extend(
                self._bisect_boundaries(a, thetas[k], cls0, thetas[k] + step, cls1)
            )

        boundaries.sort(key=lambda b: b.angle)
        merged: list[_Boundary] = []
        for b in boundaries:
            if merged and abs(b.angle - merged[-1].angle) <= cfg.bisection_tol:
                continue
            merged.append(b)
        if (
            len(merged) > 1
            and (merged[0].angle + TWO_PI) - merged[-1].angle <= cfg.bisection_tol
        ):
            merged.pop()
        boundaries = merged

        arcs: list[_Arc] = []
        if not boundaries:
            sink = next((r for r in results if r[0] == "sink"), None)
            if sink is None:
                raise MorseSmaleViolationError(
                    "every sampled direction rests at a higher-index point"
                )
            arcs.append(_Arc(0.0, TWO_PI, sink[1]))
        else:
            for i, b in enumerate(boundaries):
                nxt = boundaries[(i + 1) % len(boundaries)]
                end = nxt.angle if i + 1 < len(boundaries) else nxt.angle + TWO_PI
                inside = [
                    results[k][1]
                    for k, th in enumerate(thetas)
                    for shift in (0.0, TWO_PI)
                    if results[k][0] == "sink"
                    and b.angle + cfg.bisection_tol
                    < th + shift
                    < end - cfg.bisection_tol
                ]
                if inside:
                    cls = inside[0]
                else:
                    midth = 0.5 * (b.angle + end)
                    kind, cls, _ = self._classify_angle(a, midth)
                    if kind != "sink":
                        raise MorseSmaleViolationError(
                            "arc midpoint rests at an intermediate-index point"
                        )
                arcs.append(_Arc(b.angle, end, cls))
        self._partitions[a.id] = (boundaries, arcs)
        return boundaries, arcs

    def _bisect_boundaries(
        self, a: CriticalPoint, lo: float, lo_cls, hi: float, hi_cls
    ) -> list[_Boundary]:
        cfg = self.cfg
        while hi - lo > cfg.bisection_tol:
            mid = 0.5 * (lo + hi)
            kind, cls, landing = self._classify_angle(a, mid)
            if kind == "saddle":
                return [_Boundary(mid % TWO_PI, landing.point, landing)]
            if cls == lo_cls:
                lo = mid
            elif cls == hi_cls:
                hi = mid
            else:
                return self._bisect_boundaries(
                    a, lo, lo_cls, mid, cls
                ) + self._bisect_boundaries(a, mid, cls, hi, hi_cls)
        raise MorseSmaleViolationError(
            "basin boundary did not resolve to an intermediate rest point "
            f"near angle {0.5 * (lo + hi):.12f}"
        )

    def max_flows(self, a: CriticalPoint) -> list[FlowLine]:
        """Rigid flows out of an index-2 point, one per basin boundary direction."""
        boundaries, _ = self.partition(a)
        flows = []
        counters: dict[str, int] = {}
        for b in boundaries:
            direction = self.direction_at(a, b.angle)
            rec = self.integrate(self.seed(a, direction), record=True)
            if rec.point.id != b.saddle.id:
                raise MorseSmaleViolationError(
                    f"boundary direction near angle {b.angle:.9f} rests at "
                    f"{rec.point.id}, expected {b.saddle.id}"
                )
            sign = self.transport_sign(a, direction, b.saddle)
            k = counters.get(b.saddle.id, 0)
            counters[b.saddle.id] = k + 1
            flows.append(
                FlowLine(
                    id=f"{a.id}>{b.saddle.id}#{k}",
                    source=a.id,
                    target=b.saddle.id,
                    sign=sign,
                    departure_direction=tuple(float(v) for v in direction),
                    departure_angle=b.angle,
                    lattice_offset=rec.offset,
                    trajectory=rec.trajectory,
                )
            )
        return flows

    # frame transport --------------------------------------------------------

    def transport_sign(
        self, a: CriticalPoint, direction: np.ndarray, target: CriticalPoint
    ) -> int:
        """Sign of a rigid flow: transported unstable frame against the arrival basis."""
        cfg = self.cfg
        comp = self.comp
        x = np.array(self.seed(a, direction))
        v = self.unstable_frame(a).copy()
        h = cfg.step_init
        t = 0.0
        steps = 0

        def rhs(state_x: np.ndarray, state_v: np.ndarray):
            return -comp.np_grad(state_x), -comp.np_hess(state_x) @ state_v

        while t <= cfg.max_flow_time:
            res, _, dist = _torus_residual(x, target.position)
            if dist <= cfg.landing_radius:
                break
            for cp in self.points:
                if cp.id != target.id and cp.id != a.id:
                    if torus_distance(x, cp.position) <= cfg.landing_radius:
                        raise MorseSmaleViolationError(
                            f"transport along {a.id}->{target.id} rested at {cp.id}"
                        )
            steps += 1
            if steps > cfg.max_steps:
                raise IntegrationFailureError("transport step budget exhausted")
            while True:
                kx1, kv1 = rhs(x, v)
                half_h = 0.5 * h
                kx2, kv2 = rhs(x + half_h * kx1, v + half_h * kv1)
                kx3, kv3 = rhs(x + half_h * kx2, v + half_h * kv2)
                kx4, kv4 = rhs(x + h * kx3, v + h * kv3)
                xf = x + (h / 6.0) * (kx1 + 2.0 * (kx2 + kx3) + kx4)
                vf = v + (h / 6.0) * (kv1 + 2.0 * (kv2 + kv3) + kv4)
                xm, vm = x, v
                for _ in range(2):
                    mx1, mv1 = rhs(xm, vm)
                    qh = 0.25 * h
                    mx2, mv2 = rhs(xm + qh * mx1, vm + qh * mv1)
                    mx3, mv3 = rhs(xm + qh * mx2, vm + qh * mv2)
                    mx4, mv4 = rhs(xm + half_h * mx3, vm + half_h * mv3)
                    xm = xm + (half_h / 6.0) * (mx1 + 2.0 * (mx2 + mx3) + mx4)
                    vm = vm + (half_h / 6.0) * (mv1 + 2.0 * (mv2 + mv3) + mv4)
                err = float(np.max(np.abs(xf - xm)))
                if err > cfg.step_tol and h > cfg.step_min:
                    h = max(0.5 * h, cfg.step_min)
                    continue
                break
            x = xm + (xm - xf) / 15.0
            # Orientation-safe re-orthonormalization: with R's diagonal kept
            # positive, replacing the frame by Q preserves the sign class.
            q, r = np.linalg.qr(vm)
            diag = np.diagonal(r)
            if np.any(diag == 0.0):
                raise IntegrationFailureError("transported frame collapsed")
            v = q * np.sign(diag)
            t += h
            if err * 32.0 < cfg.step_tol:
                h = min(2.0 * h, cfg.step_max)
        else:
            raise IntegrationFailureError(
                f"transport along {a.id}->{target.id} did not arrive"
            )

        arrival = -comp.np_grad(x)
        speed = np.linalg.norm(arrival)
        if speed == 0.0:
            raise IntegrationFailureError("vanishing velocity at arrival")
        cols = [arrival / speed]
        tframe = self.unstable_frame(target)
        for j in range(tframe.shape[1]):
            cols.append(tframe[:, j])
        basis = np.column_stack(cols)
        if basis.shape[0] == basis.shape[1]:
            m = np.linalg.solve(basis, v)
        else:
            m = np.linalg.lstsq(basis, v, rcond=None)[0]
        det = float(np.linalg.det(m))
        if abs(det) < 1e-6:
            raise MorseSmaleViolationError(
                f"ambiguous frame comparison along {a.id}->{target.id}"
            )
        return 1 if det > 0 else -1

    # one-parameter families ---------------------------------------------------

    def _exit_direction(
        self, a: CriticalPoint, theta: float, saddle: CriticalPoint, sink: CriticalPoint
    ):
        """Direction along which a near-boundary trajectory leaves the saddle."""
        rec = self.integrate(self.seed(a, self.direction_at(a, theta)), record=True)
        if rec.point.id != sink.id:
            raise UnmatchedEndpointError(
                f"probe at angle {theta:.9f} rested at {rec.point.id}, "
                f"expected {sink.id}"
            )
        pts = [p for _, p in rec.trajectory]
        dists = [torus_distance(p, saddle.position) for p in pts]
        near = min(range(len(pts)), key=lambda i: dists[i])
        exit_radius = min(0.1, 0.4 * self.min_separation)
        for i in range(near, len(pts)):
            if dists[i] >= exit_radius:
                res, _, dist = _torus_residual(pts[i], saddle.position)
                return np.array(res) / dist
        res, _, dist = _torus_residual(pts[-1], saddle.position)
        if dist == 0.0:
            raise UnmatchedEndpointError("probe trajectory never left the saddle")
        return np.array(res) / dist

    def families(
        self, a: CriticalPoint, c: CriticalPoint, flows: list[FlowLine]
    ) -> list[IntervalFamily | CircleFamily]:
        """Components of the one-parameter family from an index-2 point to a sink."""
        cfg = self.cfg
        boundaries, arcs = self.partition(a)
        out: list[IntervalFamily | CircleFamily] = []
        if not boundaries:
            if arcs and arcs[0].landing_class[0] == c.id:
                return [CircleFamily()]
            return []

        def boundary_at(angle: float) -> _Boundary:
            def gap(b: _Boundary) -> float:
                return abs((b.angle - angle + math.pi) % TWO_PI - math.pi)

            best = min(boundaries, key=gap)
            if gap(best) > 1e-9:
                raise UnmatchedEndpointError(
                    f"no partition boundary at angle {angle:.9f}"
                )
            return best

        def first_flow(b: _Boundary) -> FlowLine:
            for fl in flows:
                if fl.source != a.id or fl.target != b.saddle.id:
                    continue
                if fl.departure_angle is None:
                    continue
                delta = abs((fl.departure_angle - b.angle + math.pi) % TWO_PI - math.pi)
                if delta <= cfg.endpoint_match_tol:
                    return fl
            raise UnmatchedEndpointError(
                f"no rigid flow {a.id}->{b.saddle.id} matches the boundary at "
                f"angle {b.angle:.9f}"
            )

        def second_flow(b: _Boundary, boundary_theta: float, inward: float) -> FlowLine:
            # Probes too close to the boundary can rest at the saddle itself;
            # back off geometrically until one reaches the sink.
            width_cap = 0.25 * abs(inward)
            exit_dir = None
            last_error: UnmatchedEndpointError | None = None
            eta = min(cfg.probe_offset, width_cap)
            while eta <= width_cap + 1e-15:
                try:
                    exit_dir = self._exit_direction(
                        a, boundary_theta + math.copysign(eta, inward), b.saddle, c
                    )
                    break
                except UnmatchedEndpointError as exc:
                    last_error = exc
                    eta *= 2.0
            if exit_dir is None:
                raise last_error or UnmatchedEndpointError(
                    f"no usable probe near angle {boundary_theta:.9f}"
                )
            best = None
            best_dot = -math.inf
            for fl in flows:
                if fl.source != b.saddle.id or fl.target != c.id:
                    continue
                dot = float(np.dot(exit_dir, np.array(fl.departure_direction)))
                if dot > best_dot:
                    best, best_dot = fl, dot
            if best is None or best_dot < 0.5:
                raise UnmatchedEndpointError(
                    f"no rigid flow {b.saddle.id}->{c.id} matches the family "
                    f"boundary at angle {b.angle:.9f}"
                )
            return best

        for arc in arcs:
            if arc.landing_class[0] != c.id:
                continue
            b_start = boundary_at(arc.start)
            b_end = boundary_at(arc.end)
            width = arc.end - arc.start
            start_second = second_flow(b_start, arc.start, width)
            end_second = second_flow(b_end, arc.end, -width)
            out.append(
                IntervalFamily(
                    start_angle=arc.start,
                    end_angle=arc.end,
                    start_break=(first_flow(b_start), start_second),
                    end_break=(first_flow(b_end), end_second),
                )
            )
        return out


# -- public operations ------------------------------------------------------


def _resolve(analysis: _Analysis, p: CriticalPoint) -> CriticalPoint:
    got = analysis.by_id.get(p.id)
    if got is None or torus_distance(got.position, p.position) > 1e-6:
        raise InputError(f"critical point {p.id!r} does not belong to this function")
    return got


def connecting_orbits(
    f: TrigPolynomial,
    a: CriticalPoint,
    b: CriticalPoint,
    cfg: NumericalConfig = NumericalConfig(),
    critical_points: list[CriticalPoint] | None = None,
) -> list[FlowLine]:
    """Rigid flows from a to b, for an index gap of one."""
    if a.index - b.index != 1:
        raise InputError("rigid flows require an index gap of exactly one")
    analysis = _Analysis(f, cfg, critical_points)
    a = _resolve(analysis, a)
    b = _resolve(analysis, b)
    if a.index == 1:
        flows = analysis.saddle_flows(a)
    elif a.index == 2:
        flows = analysis.max_flows(a)
    else:
        raise InputError(
            "connecting orbits are only seeded from index-1 and index-2 points"
        )
    return [fl for fl in flows if fl.target == b.id]


def moduli_family(
    f: TrigPolynomial,
    a: CriticalPoint,
    c: CriticalPoint,
    flows: list[FlowLine],
    cfg: NumericalConfig = NumericalConfig(),
    critical_points: list[CriticalPoint] | None = None,
) -> list[IntervalFamily | CircleFamily]:
    """One-parameter family components between an index-2 point and a sink on T^2.

    `flows` must contain the rigid flows out of `a` and out of the
    intermediate saddles, as returned by `connecting_orbits`.
    """
    if f.dimension != 2:
        raise InputError("one-parameter families are computed on the two-torus")
    if a.index - c.index != 2:
        raise InputError("families require an index gap of exactly two")
    analysis = _Analysis(f, cfg, critical_points)
    return analysis.families(_resolve(analysis, a), _resolve(analysis, c), flows)


def _assemble(analysis: _Analysis) -> tuple[FlowCategory, OrientationData, list[FlowLine]]:
    points = analysis.points
    flows: list[FlowLine] = []
    for p in points:
        if p.index == 1:
            flows.extend(analysis.saddle_flows(p))
        elif p.index == 2:
            flows.extend(analysis.max_flows(p))
    moduli = []
    for a in points:
        if a.index != 2:
            continue
        for c in points:
            if c.index != 0:
                continue
            fams = analysis.families(a, c, flows)
            if not fams:
                continue
            comps: list[IntervalComponent | CircleComponent] = []
            for fam in fams:
                if isinstance(fam, CircleFamily):
                    comps.append(CircleComponent())
                    continue
                s1, s2 = fam.start_break
                e1, e2 = fam.end_break
                comps.append(
                    IntervalComponent(
                        (
                            BrokenFlow(s1.target, s1.id, s2.id),
                            BrokenFlow(e1.target, e1.id, e2.id),
                        )
                    )
                )
            moduli.append(ModuliFamily(a.id, c.id, tuple(comps)))
    cat = FlowCategory(
        tuple(p.id for p in points),
        {p.id: p.index for p in points},
        tuple(RigidFlow(fl.id, fl.source, fl.target) for fl in flows),
        tuple(moduli),
    )
    orientation = OrientationData({fl.id: fl.sign for fl in flows})
    ms = validate_morse_smale(cat)
    if not ms.passed:
        raise MorseSmaleViolationError(ms.summary())
    coh = check_orientation_coherence(cat, orientation)
    if not coh.passed:
        raise IncoherentOrientationError(coh.summary())
    return cat, orientation, flows


def build_flow_category(
    f: TrigPolynomial, cfg: NumericalConfig = NumericalConfig()
) -> tuple[FlowCategory, OrientationData]:
    """Construct and validate the full flow category of a function on T^1 or T^2."""
    if f.dimension > 2:
        raise InputError(
            "full flow categories are built on the one- and two-torus; "
            "use find_critical_points and connecting_orbits in higher dimension"
        )
    analysis = _Analysis(f, cfg)
    cat, orientation, _ = _assemble(analysis)
    return cat, orientation


def flow_lines(
    f: TrigPolynomial, cfg: NumericalConfig = NumericalConfig()
) -> list[FlowLine]:
    """All rigid trajectories of a function on T^1 or T^2, with trajectories recorded."""
    if f.dimension > 2:
        raise InputError("trajectory dumps cover the one- and two-torus")
    analysis = _Analysis(f, cfg)
    flows: list[FlowLine] = []
    for p in analysis.points:
        if p.index == 1:
            flows.extend(analysis.saddle_flows(p))
        elif p.index == 2:
            flows.extend(analysis.max_flows(p))
    return flows


# -- trajectory exports -----------------------------------------------------


def trajectory_csv(flows: Iterable[FlowLine]) -> str:
    """Plain CSV dump of all recorded trajectory samples."""
    flows = list(flows)
    dim = len(flows[0].trajectory[0][1]) if flows else 0
    header = "flow,t," + ",".join(f"x{j}" for j in range(dim))
    lines = [header]
    for fl in flows:
        for t, pos in fl.trajectory:
            coords = ",".join(f"{v % 1.0:.9f}" for v in pos)
            lines.append(f"{fl.id},{t:.9f},{coords}")
    return "\n".join(lines) + "\n"


_SVG_COLORS = ("#1b6ca8", "#a83232", "#2e8540", "#7d3ca8", "#a8742e", "#2ea89d")


def trajectories_svg(flows: Iterable[FlowLine], size: int = 480) -> str:
    """Trajectories drawn on the unit square (fundamental domain), wrap-aware."""
    flows = list(flows)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 1 1">',
        '<rect x="0" y="0" width="1" height="1" fill="white" stroke="black" '
        'stroke-width="0.002"/>',
    ]
    for i, fl in enumerate(flows):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        total = max(t for t, _ in fl.trajectory) or 1.0
        runs: list[list[tuple[float, float]]] = [[]]
        prev = None
        for t, pos in fl.trajectory:
            if len(pos) >= 2:
                pt = (pos[0] % 1.0, pos[1] % 1.0)
            else:
                pt = (pos[0] % 1.0, t / total)
            if prev is not None and (
                abs(pt[0] - prev[0]) > 0.5 or abs(pt[1] - prev[1]) > 0.5
            ):
                runs.append([])
            runs[-1].append(pt)
            prev = pt
        for run in runs:
            if len(run) < 2:
                continue
            points = " ".join(f"{x:.6f},{1.0 - y:.6f}" for x, y in run)
            out.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="0.004" '
                f'points="{points}"><title>{fl.id}</title></polyline>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
