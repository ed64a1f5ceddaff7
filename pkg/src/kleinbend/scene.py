"""Ball-model hyperbolic geometry: geodesic planes, perpendiculars,
horospheres, sphere pencils, and the right-angled dodecahedron.

Geodesic planes of the unit-ball model are the generalized spheres
orthogonal to the unit sphere, so everything here is a thin layer of
constructions over the Lorentz pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .conformal import (
    ConformalPoint,
    GenSphere,
    LorentzFrame,
    MobiusTransform,
    _canonical_null,
    _normalize_sphere,
    apply,
    apply_sphere,
    inversive_product,
    lift_point,
    reflect_in_sphere,
    sphere_center_radius,
    sphere_from_center_radius,
    sphere_from_plane,
)
from .errors import KleinbendError, NoCircle, PlanesIntersect

__all__ = [
    "BallModel",
    "GeodesicPlane",
    "GeodesicLine",
    "Polyhedron",
    "SpherePencil",
    "unit_ball_boundary",
    "geodesic_plane_from_sphere",
    "common_perpendicular",
    "circle_from_spheres",
    "plane_through_circle",
    "horosphere_at",
    "build_right_angled_dodecahedron",
    "icosahedral_directions",
]


def unit_ball_boundary(frame: Optional[LorentzFrame] = None) -> GenSphere:
    frame = frame or LorentzFrame(3)
    return sphere_from_center_radius(np.zeros(frame.n), 1.0, frame)


@dataclass(frozen=True)
class BallModel:
    """The unit-ball model of hyperbolic n+... space with its boundary sphere."""

    frame: LorentzFrame = field(default_factory=lambda: LorentzFrame(3))

    @property
    def boundary(self) -> GenSphere:
        return unit_ball_boundary(self.frame)


@dataclass(frozen=True, eq=False)
class GeodesicPlane:
    """A totally geodesic plane of the ball model: a sphere orthogonal
    to the boundary sphere."""

    sphere: GenSphere

    @property
    def frame(self):
        return self.sphere.frame

    def reflection(self, label: str = "") -> MobiusTransform:
        return reflect_in_sphere(self.sphere, label)


def geodesic_plane_from_sphere(s: GenSphere, tol: Optional[Tolerances] = None) -> GeodesicPlane:
    tol = tol or DEFAULT_TOL
    boundary = unit_ball_boundary(s.frame)
    p = inversive_product(s, boundary)
    if abs(p) > 1e-6:
        raise KleinbendError(f"sphere is not orthogonal to the ball boundary (product {p:.3g})")
    return GeodesicPlane(s)


@dataclass(frozen=True, eq=False)
class GeodesicLine:
    """A geodesic of the ball model given by its two ideal endpoints."""

    endpoints: Tuple[ConformalPoint, ConformalPoint]

    @property
    def frame(self):
        return self.endpoints[0].frame


def common_perpendicular(w1: GeodesicPlane, w2: GeodesicPlane,
                         tol: Optional[Tolerances] = None) -> GeodesicLine:
    """The unique geodesic orthogonal to two disjoint geodesic planes.

    The span of the two sphere vectors has signature (+,-) exactly when the
    planes are disjoint; its two null rays are the ideal endpoints of the
    common perpendicular.
    """
    tol = tol or DEFAULT_TOL
    a, b = w1.sphere, w2.sphere
    p = inversive_product(a, b)
    if abs(p) <= 1.0 + tol.tangency:
        raise PlanesIntersect(f"planes meet or touch (inversive product {p:.6g})")
    disc = np.sqrt(p * p - 1.0)
    pts = []
    for beta in (-p + disc, -p - disc):
        v = a.vector + beta * b.vector
        if v[0] < 0:
            v = -v
        pts.append(_canonical_null(a.frame, v))
    return GeodesicLine((pts[0], pts[1]))


def line_orthogonality_residual(line: GeodesicLine, plane: GeodesicPlane) -> float:
    """How far the line is from being orthogonal to the plane: the
    reflection in the plane must swap the line's endpoints."""
    r = reflect_in_sphere(plane.sphere)
    img = apply(r, line.endpoints[0])
    return float(np.linalg.norm(img.lift[1:] - line.endpoints[1].lift[1:]))


# ---------------------------------------------------------------------------
# Circles and pencils
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpherePencil:
    """The one-parameter family of spheres through a fixed circle.

    Stored as the canonical orthonormal pair (plane of the circle, minimal
    sphere through it); members are unit combinations cos(phi) q + sin(phi) m.
    """

    plane_member: GenSphere   # the unique flat member
    round_member: GenSphere   # the minimal-radius member, orthogonal to it

    @property
    def frame(self):
        return self.plane_member.frame

    def member(self, phi: float) -> GenSphere:
        v = np.cos(phi) * self.plane_member.vector + np.sin(phi) * self.round_member.vector
        return GenSphere(self.frame, v)

    def phi_of(self, s: GenSphere) -> float:
        """Pencil angle of a member sphere (its vector must lie in the span)."""
        c = inversive_product(s, self.plane_member)
        d = inversive_product(s, self.round_member)
        return float(np.arctan2(d, c))

    def residual(self, s: GenSphere) -> float:
        """Distance of a sphere vector from the pencil span."""
        v = s.vector
        c = inversive_product(s, self.plane_member)
        d = inversive_product(s, self.round_member)
        rem = v - c * self.plane_member.vector - d * self.round_member.vector
        return float(np.linalg.norm(rem))

    def circle_points(self, count: int = 16) -> List[np.ndarray]:
        """Deterministic sample points on the base circle."""
        c, r = sphere_center_radius(self.round_member)
        normal, _ = _plane_normal_offset(self.plane_member)
        e1 = _unit_orthogonal(normal)
        pts = []
        if self.frame.n == 2:
            return [c + r * e1, c - r * e1]
        e2 = np.cross(normal, e1)
        for k in range(count):
            th = 2.0 * np.pi * k / count
            pts.append(c + r * (np.cos(th) * e1 + np.sin(th) * e2))
        return pts


def _plane_normal_offset(s: GenSphere):
    from .conformal import sphere_plane
    res = sphere_plane(s)
    if res is None:
        raise KleinbendError("expected a flat pencil member")
    return res


def _unit_orthogonal(v: np.ndarray) -> np.ndarray:
    k = int(np.argmin(np.abs(v)))
    e = np.zeros_like(v)
    e[k] = 1.0
    u = e - v * v[k]
    return u / np.linalg.norm(u)


def circle_from_spheres(a: GenSphere, b: GenSphere,
                        tol: Optional[Tolerances] = None) -> SpherePencil:
    """Canonicalize the circle a ∩ b as its pencil of spheres.

    Requires |<a,b>| < 1.  The flat member is the unique combination with
    vanishing center-term; the round member is obtained by Gram-Schmidt
    and is the minimal sphere through the circle.
    """
    tol = tol or DEFAULT_TOL
    p = inversive_product(a, b)
    if abs(p) >= 1.0 - tol.tangency:
        raise NoCircle(f"spheres do not meet in a circle (inversive product {p:.6g})")
    frame = a.frame
    # flat member: u-component (index0+index1) of alpha*a + beta*b vanishes
    ua = a.vector[0] + a.vector[1]
    ub = b.vector[0] + b.vector[1]
    if abs(ua) < 1e-14 and abs(ub) < 1e-14:
        # both are planes; circle is a line, keep a as the "plane" member
        q = a
    else:
        v = ub * a.vector - ua * b.vector
        q = _normalize_sphere(frame, v)
    w = b if q is a else a
    rem = w.vector - inversive_product(w, q) * q.vector
    m = _normalize_sphere(frame, rem)
    # orient deterministically: first significant entry positive
    qv = _sign_canonical(q.vector)
    mv = _sign_canonical(m.vector)
    return SpherePencil(GenSphere(frame, qv), GenSphere(frame, mv))


def _sign_canonical(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-12:
            return v if x > 0 else -v
    return v


def plane_through_circle(a: GenSphere, b: GenSphere,
                         t0: Optional[GenSphere] = None,
                         t1: Optional[GenSphere] = None):
    """Parameterized pencil of spheres through the circle a ∩ b.

    Returns (pencil, family) where family(t) interpolates linearly in
    Lorentz-vector space between the endpoint members (defaults: the flat
    member at t=0 and the minimal sphere at t=1), renormalized.
    """
    pencil = circle_from_spheres(a, b)
    lo = t0 if t0 is not None else pencil.plane_member
    hi = t1 if t1 is not None else pencil.round_member
    for s in (lo, hi):
        r = pencil.residual(s)
        if r > 1e-8:
            raise NoCircle(f"endpoint sphere is not a pencil member (residual {r:.3g})")
    v0, v1 = lo.vector.copy(), hi.vector.copy()
    if float(np.dot(v0 * pencil.frame.metric_signs, v1)) < 0:
        v1 = -v1  # keep the interpolation inside one half-circle

    def family(t: float) -> GenSphere:
        v = (1.0 - t) * v0 + t * v1
        return _normalize_sphere(pencil.frame, v)

    return pencil, family


def horosphere_at(xi, size: float, frame: Optional[LorentzFrame] = None) -> GenSphere:
    """Sphere tangent to the unit sphere at xi from the outside.

    size is the Euclidean radius; size=inf degenerates to the tangent plane.
    """
    pt = lift_point(xi, frame)
    frame = pt.frame
    x = pt.coords()
    if isinstance(x, str):
        raise KleinbendError("horosphere base point must be finite")
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise KleinbendError("horosphere base point must lie on the unit sphere")
    if size <= 0:
        raise KleinbendError("horosphere size must be positive")
    if np.isinf(size):
        return sphere_from_plane(x / np.linalg.norm(x), 1.0, frame)
    center = x * (1.0 + size)
    return sphere_from_center_radius(center, size, frame)


# ---------------------------------------------------------------------------
# The right-angled dodecahedron
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Polyhedron:
    """Geodesic face planes with their adjacency combinatorics."""

    faces: List[GeodesicPlane]
    adjacency: List[Tuple[int, int]]
    labels: List[str]

    def face_reflections(self) -> List[MobiusTransform]:
        return [f.reflection(lbl) for f, lbl in zip(self.faces, self.labels)]

    def opposite_pairs(self) -> List[Tuple[int, int]]:
        out = []
        for i in range(len(self.faces)):
            ci, _ = sphere_center_radius(self.faces[i].sphere)
            for j in range(i + 1, len(self.faces)):
                cj, _ = sphere_center_radius(self.faces[j].sphere)
                if np.linalg.norm(ci + cj) < 1e-9 * np.linalg.norm(ci):
                    out.append((i, j))
        return out

    def adjacent_to(self, i: int) -> List[int]:
        out = []
        for a, b in self.adjacency:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)


def icosahedral_directions() -> np.ndarray:
    """The 12 unit vectors through icosahedron vertices, in a fixed order."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    raw = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            raw.append((0.0, s1, s2 * phi))
            raw.append((s1, s2 * phi, 0.0))
            raw.append((s2 * phi, 0.0, s1))
    dirs = np.array(sorted(set(raw)))
    dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    order = np.lexsort((dirs[:, 2], dirs[:, 1], dirs[:, 0]))
    return dirs[order]


def build_right_angled_dodecahedron(tol: Optional[Tolerances] = None) -> Polyhedron:
    """The hyperbolic dodecahedron with all dihedral angles pi/2.

    Faces are geodesic planes centered along the 12 icosahedral axes at a
    common center distance d (radius sqrt(d^2-1) keeps them orthogonal to
    the ball boundary).  d is found by scalar bisection on the condition
    that adjacent face pairs have inversive product zero.
    """
    tol = tol or DEFAULT_TOL
    frame = LorentzFrame(3)
    dirs = icosahedral_directions()
    cos_adj = float(np.cos(np.arctan(2.0)))  # adjacent axis angle: 1/sqrt(5)

    def adjacent_product(d: float) -> float:
        # product between two faces whose axes meet at the adjacent angle
        r2 = d * d - 1.0
        dist2 = 2.0 * d * d * (1.0 - cos_adj)
        return (2.0 * r2 - dist2) / (2.0 * r2)

    lo, hi = 1.0 + 1e-9, 10.0
    for _ in range(tol.bisection_iters):
        mid = 0.5 * (lo + hi)
        if adjacent_product(mid) > 0.0:
            hi = mid  # product grows with d; positive means too far out
        else:
            lo = mid
        if hi - lo < tol.bisection:
            break
    d = 0.5 * (lo + hi)
    r = float(np.sqrt(d * d - 1.0))

    faces = [GeodesicPlane(sphere_from_center_radius(d * u, r, frame)) for u in dirs]
    adjacency = []
    for i in range(12):
        for j in range(i + 1, 12):
            cosang = float(np.dot(dirs[i], dirs[j]))
            if abs(cosang - cos_adj) < 1e-6:
                adjacency.append((i, j))
    labels = [f"f{i:02d}" for i in range(12)]
    return Polyhedron(faces, adjacency, labels)
