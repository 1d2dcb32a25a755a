"""Shortest paths for the Dubins car: unit speed forward, |turn rate| <= 1.

Candidates are the CSC words (arc, line, arc) built from common tangents of
the unit turning circles at both ends, and the CCC words (three tangent
arcs, middle arc in [pi, 2*pi)). The shortest feasible candidate wins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numeric import TWO_PI, mod2pi, wrap_angle

WORDS = ("LSL", "RSR", "LSR", "RSL", "LRL", "RLR")
TIE_TOL = 1e-12
_TURN = {"L": 1, "R": -1, "S": 0}


@dataclass(frozen=True)
class PlanarPose:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)


@dataclass(frozen=True)
class DubinsPath:
    """Segment parameters are arc angles for C segments and length for S."""

    word: str
    segment_params: tuple[float, float, float]

    @property
    def length(self) -> float:
        # unit turning radius: arc length equals arc angle
        return float(sum(self.segment_params))

    @property
    def is_csc(self) -> bool:
        return self.word[1] == "S"


def _center(q: PlanarPose, s: int) -> np.ndarray:
    """Center of the unit circle traced when turning with sign s (+1 left)."""
    return np.array([q.x - s * math.sin(q.theta), q.y + s * math.cos(q.theta)])


def _csc(q0: PlanarPose, q1: PlanarPose, s0: int, s1: int):
    c0 = _center(q0, s0)
    c1 = _center(q1, s1)
    d = c1 - c0
    D = math.hypot(d[0], d[1])
    ang = math.atan2(d[1], d[0])
    if s0 == s1:
        if D == 0.0:
            # concentric circles: the path is a single arc
            phi = q0.theta
        else:
            phi = ang
        L = D
    else:
        if D < 2.0:
            return None
        L = math.sqrt(max(D * D - 4.0, 0.0))
        phi = ang + math.atan2(2.0 * s0, L)
    a0 = mod2pi(s0 * (phi - q0.theta))
    a1 = mod2pi(s1 * (q1.theta - phi))
    return (a0, L, a1)


def _ccc(q0: PlanarPose, q1: PlanarPose, s: int):
    c0 = _center(q0, s)
    c1 = _center(q1, s)
    d = c1 - c0
    D = math.hypot(d[0], d[1])
    if D > 4.0:
        return None
    ang = math.atan2(d[1], d[0])
    half = math.acos(min(1.0, D / 4.0))
    best = None
    for psi in (ang + half, ang - half):
        cm = c0 + 2.0 * np.array([math.cos(psi), math.sin(psi)])
        e = c1 - cm
        chi = math.atan2(e[1], e[0])
        phi1 = psi + s * math.pi / 2.0
        phi2 = chi - s * math.pi / 2.0
        a0 = mod2pi(s * (phi1 - q0.theta))
        a1 = mod2pi(-s * (phi2 - phi1))
        a2 = mod2pi(s * (q1.theta - phi2))
        if not (math.pi <= a1 < TWO_PI):
            continue
        cand = (a0, a1, a2)
        if best is None or sum(cand) < sum(best):
            best = cand
    return best


def solve_word(q0: PlanarPose, q1: PlanarPose, word: str) -> DubinsPath | None:
    """Path of the given word from q0 to q1, or None when geometrically infeasible."""
    if word not in WORDS:
        raise ValueError(f"unknown word {word!r}")
    if word[1] == "S":
        params = _csc(q0, q1, _TURN[word[0]], _TURN[word[2]])
    else:
        params = _ccc(q0, q1, _TURN[word[0]])
    if params is None:
        return None
    return DubinsPath(word, tuple(float(p) + 0.0 for p in params))  # drop -0.0


def candidates(q0: PlanarPose, q1: PlanarPose) -> list[DubinsPath]:
    out = []
    for w in WORDS:
        p = solve_word(q0, q1, w)
        if p is not None:
            out.append(p)
    return out


def shortest_path(q0: PlanarPose, q1: PlanarPose) -> DubinsPath:
    """Minimum-length candidate; ties go to the earlier word in WORDS."""
    best = None
    for p in candidates(q0, q1):
        if best is None or p.length < best.length - TIE_TOL:
            best = p
    if best is None:
        raise RuntimeError("no feasible Dubins word")  # CSC outer tangents always exist
    return best


def advance(q: PlanarPose, turn: int, s: float) -> tuple[float, float, float]:
    """Pose after moving arclength s with constant turn sign (unwrapped heading)."""
    x, y, th = q.x, q.y, q.theta
    if turn == 0:
        return x + s * math.cos(th), y + s * math.sin(th), th
    th1 = th + turn * s
    return (x + turn * (math.sin(th1) - math.sin(th)),
            y + turn * (math.cos(th) - math.cos(th1)),
            th1)


def sample_path(p: DubinsPath, q0: PlanarPose, n: int) -> list[PlanarPose]:
    """n poses at uniform arclength; first is q0, last is the path's endpoint."""
    if n < 2:
        raise ValueError("n must be >= 2")
    turns = [_TURN[c] for c in p.word]
    # segment start poses
    starts = [q0]
    for turn, seg in zip(turns[:-1], p.segment_params[:-1]):
        starts.append(PlanarPose(*advance(starts[-1], turn, seg)))
    bounds = np.cumsum((0.0,) + p.segment_params)
    out = []
    for s in np.linspace(0.0, p.length, n):
        i = int(np.searchsorted(bounds, s, side="right") - 1)
        i = min(max(i, 0), 2)
        out.append(PlanarPose(*advance(starts[i], turns[i], float(s - bounds[i]))))
    return out


def endpoint(p: DubinsPath, q0: PlanarPose) -> PlanarPose:
    q = q0
    for c, seg in zip(p.word, p.segment_params):
        q = PlanarPose(*advance(q, _TURN[c], seg))
    return q
