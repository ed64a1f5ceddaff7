"""Conformal transformations of the n-sphere in the Lorentz model.

Points of R^n together with infinity lift to future-pointing null rays in
R^{1,n+1}; generalized spheres (round spheres and planes alike) become unit
space-like vectors; every conformal map becomes a J-orthogonal matrix.  All
geometric predicates reduce to the Lorentz pairing <a, b> = a^T J b with
J = diag(-1, +1, ..., +1), so reflections, tangency and angles need no
special cases for planes or for infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import FixesInfinity, FrameMismatch, Inconclusive

__all__ = [
    "INFINITY",
    "LorentzFrame",
    "ConformalPoint",
    "GenSphere",
    "MobiusTransform",
    "Classification",
    "lift_point",
    "point_coords",
    "chordal_distance",
    "sphere_from_center_radius",
    "sphere_from_plane",
    "sphere_center_radius",
    "sphere_plane",
    "inversive_product",
    "reflect_in_sphere",
    "identity_transform",
    "compose",
    "inverse",
    "apply",
    "apply_sphere",
    "relorentz",
    "lorentz_residual",
    "isometric_sphere",
    "tangency_point",
    "sample_sphere_points",
    "verify_isometric_mapping",
    "classify",
]

#: Sentinel accepted by :func:`lift_point` for the point at infinity.
INFINITY = "inf"


@dataclass(frozen=True)
class LorentzFrame:
    """Ambient model data: dimension n of the sphere and the metric."""

    n: int = 3

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError("frame dimension must be 2 or 3")

    @property
    def dim(self) -> int:
        return self.n + 2

    @property
    def metric(self) -> np.ndarray:
        j = np.ones(self.dim)
        j[0] = -1.0
        return np.diag(j)

    @property
    def metric_signs(self) -> np.ndarray:
        j = np.ones(self.dim)
        j[0] = -1.0
        return j

    @property
    def infinity_vector(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[0] = 1.0
        v[1] = -1.0
        return v


def _pair(frame: LorentzFrame, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.dot(a * frame.metric_signs, b))


def _check_frames(*objs) -> LorentzFrame:
    frames = {o.frame.n for o in objs}
    if len(frames) != 1:
        raise FrameMismatch(f"mixed frame dimensions {sorted(frames)}")
    return objs[0].frame


@dataclass(frozen=True, eq=False)
class ConformalPoint:
    """A point of S^n as a canonical future-pointing null vector.

    The lift is scaled so its time component is 1; the spatial part then
    lies on the unit sphere of R^{n+1}, and infinity is the ordinary vector
    (1, -1, 0, ..., 0) rather than a special case.
    """

    frame: LorentzFrame
    lift: np.ndarray
    at_infinity: bool = False

    def coords(self):
        return point_coords(self)

    def __repr__(self):
        if self.at_infinity:
            return "ConformalPoint(inf)"
        return f"ConformalPoint({np.round(self.coords(), 9)})"


def _canonical_null(frame: LorentzFrame, v: np.ndarray) -> ConformalPoint:
    """Rescale a future null vector to time component 1, re-projecting
    the spatial part onto the unit sphere to kill drift."""
    if v[0] <= 0:
        raise ValueError("null vector is not future-pointing")
    u = v[1:] / v[0]
    nu = np.linalg.norm(u)
    if nu == 0:
        raise ValueError("degenerate null vector")
    lift = np.empty(frame.dim)
    lift[0] = 1.0
    lift[1:] = u / nu
    at_inf = abs(lift[0] + lift[1]) < 1e-12
    return ConformalPoint(frame, lift, at_inf)


def lift_point(x, frame: Optional[LorentzFrame] = None) -> ConformalPoint:
    """Lift a point of R^n (or the INFINITY sentinel) to the null cone."""
    if isinstance(x, ConformalPoint):
        return x
    is_inf = isinstance(x, str) and x == INFINITY
    if frame is None:
        frame = LorentzFrame(3) if is_inf else LorentzFrame(len(x))
    if is_inf:
        return ConformalPoint(frame, frame.infinity_vector.copy(), True)
    x = np.asarray(x, dtype=float)
    if x.shape != (frame.n,):
        raise ValueError(f"expected an {frame.n}-vector")
    sq = float(x @ x)
    raw = np.empty(frame.dim)
    raw[0] = (1.0 + sq) / 2.0
    raw[1] = (1.0 - sq) / 2.0
    raw[2:] = x
    return _canonical_null(frame, raw)


def point_coords(p: ConformalPoint):
    """Drop a lifted point back to R^n, or return the INFINITY sentinel."""
    u = p.lift[0] + p.lift[1]
    if abs(u) < 1e-13:
        return INFINITY
    return p.lift[2:] / u


def chordal_distance(p: ConformalPoint, q: ConformalPoint) -> float:
    """Distance in the round metric's chordal embedding; handles infinity."""
    _check_frames(p, q)
    return float(np.linalg.norm(p.lift[1:] - q.lift[1:]))


@dataclass(frozen=True, eq=False)
class GenSphere:
    """A generalized sphere of S^n as a unit space-like vector.

    The sign of the vector selects an interior: x is interior exactly when
    <lift(x), vector> > 0.  Spheres built from (center, radius) are oriented
    with the round ball as interior; planes with the normal pointing out of
    the interior half-space.
    """

    frame: LorentzFrame
    vector: np.ndarray

    def flipped(self) -> "GenSphere":
        return GenSphere(self.frame, -self.vector)

    def side_of(self, p: ConformalPoint) -> float:
        _check_frames(self, p)
        return _pair(self.frame, p.lift, self.vector)

    def contains(self, p, tol: float = 1e-9) -> bool:
        pt = lift_point(p, self.frame)
        return abs(self.side_of(pt)) < tol

    def __repr__(self):
        cr = sphere_center_radius(self)
        if cr is not None:
            c, r = cr
            return f"GenSphere(center={np.round(c, 9)}, radius={r:.9g})"
        nrm, off = sphere_plane(self)
        return f"GenSphere(plane n={np.round(nrm, 9)}, offset={off:.9g})"


def _normalize_sphere(frame: LorentzFrame, v: np.ndarray) -> GenSphere:
    s = _pair(frame, v, v)
    if s <= 0:
        raise ValueError("sphere vector is not space-like")
    return GenSphere(frame, v / np.sqrt(s))


def sphere_from_center_radius(center, radius: float,
                              frame: Optional[LorentzFrame] = None) -> GenSphere:
    """Round sphere |x - c| = r, oriented with the ball as interior."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    center = np.asarray(center, dtype=float)
    if frame is None:
        frame = LorentzFrame(len(center))
    sq = float(center @ center)
    v = np.empty(frame.dim)
    v[0] = (1.0 + sq - radius * radius) / (2.0 * radius)
    v[1] = (1.0 - sq + radius * radius) / (2.0 * radius)
    v[2:] = center / radius
    return GenSphere(frame, v)


def sphere_from_plane(normal, offset: float,
                      frame: Optional[LorentzFrame] = None) -> GenSphere:
    """Plane normal.x = offset, oriented with the normal pointing out."""
    normal = np.asarray(normal, dtype=float)
    if frame is None:
        frame = LorentzFrame(len(normal))
    nn = np.linalg.norm(normal)
    if not np.isclose(nn, 1.0, atol=1e-8):
        raise ValueError("normal must be a unit vector")
    normal = normal / nn
    v = np.empty(frame.dim)
    v[0] = offset
    v[1] = -offset
    v[2:] = normal
    return GenSphere(frame, v)


def sphere_center_radius(s: GenSphere) -> Optional[Tuple[np.ndarray, float]]:
    """(center, radius) for a round sphere, or None for a plane."""
    u = s.vector[0] + s.vector[1]
    if abs(u) < 1e-12:
        return None
    r = 1.0 / u
    return s.vector[2:] * r, abs(r)


def sphere_plane(s: GenSphere) -> Optional[Tuple[np.ndarray, float]]:
    """(unit normal, offset) for a plane, or None for a round sphere."""
    u = s.vector[0] + s.vector[1]
    if abs(u) >= 1e-12:
        return None
    m = s.vector[2:]
    nm = np.linalg.norm(m)
    return m / nm, float(s.vector[0] / nm)


def inversive_product(a: GenSphere, b: GenSphere) -> float:
    """Lorentz pairing of two sphere vectors.

    |value| < 1 means the spheres intersect at angle arccos|value|;
    |value| = 1 tangency; |value| > 1 disjoint, with value > +1 nested
    (one interior inside the other) and value < -1 separated exteriors
    under the interior orientation convention.
    """
    frame = _check_frames(a, b)
    return _pair(frame, a.vector, b.vector)


@dataclass(frozen=True, eq=False)
class MobiusTransform:
    """A conformal map of S^n as a J-orthogonal, future-preserving matrix."""

    frame: LorentzFrame
    matrix: np.ndarray
    label: str = ""
    _depth: int = field(default=0, repr=False, compare=False)

    @property
    def is_reflection_like(self) -> bool:
        """True when the matrix reverses orientation of S^n (det < 0)."""
        return bool(np.linalg.det(self.matrix) < 0)

    def __repr__(self):
        tag = f" '{self.label}'" if self.label else ""
        return f"MobiusTransform{tag}(n={self.frame.n})"


def lorentz_residual(g: MobiusTransform) -> float:
    """||M^T J M - J||_inf, the defect from the Lorentz group."""
    J = g.frame.metric
    return float(np.abs(g.matrix.T @ J @ g.matrix - J).max())


def relorentz(matrix: np.ndarray, frame: LorentzFrame,
              iters: int = 3) -> np.ndarray:
    """Project a near-Lorentz matrix back onto O(1, n+1).

    Newton iteration for the polar factor in the J-inner product:
    X <- (X + J X^{-T} J) / 2 has the J-orthogonal matrices as fixed
    points and converges quadratically near the group.
    """
    J = frame.metric
    X = np.asarray(matrix, dtype=float)
    scale = max(1.0, float(np.abs(X).max()))
    for _ in range(iters):
        R = X.T @ J @ X - J
        if np.abs(R).max() < 4.0e-16 * scale * scale:
            break
        X = 0.5 * (X + J @ np.linalg.inv(X).T @ J)
    return X


def identity_transform(frame: LorentzFrame, label: str = "") -> MobiusTransform:
    return MobiusTransform(frame, np.eye(frame.dim), label)


def reflect_in_sphere(s: GenSphere, label: str = "") -> MobiusTransform:
    """The inversion fixing s pointwise: M = Id - 2 s s^T J."""
    frame = s.frame
    v = s.vector
    M = np.eye(frame.dim) - 2.0 * np.outer(v, v * frame.metric_signs)
    return MobiusTransform(frame, M, label)


def compose(g: MobiusTransform, h: MobiusTransform) -> MobiusTransform:
    """g o h.  Re-projects onto the Lorentz group every few compositions
    so long words do not drift."""
    frame = _check_frames(g, h)
    M = g.matrix @ h.matrix
    depth = g._depth + h._depth + 1
    if depth >= DEFAULT_TOL.renorm_every:
        M = relorentz(M, frame)
        depth = 0
    label = f"{g.label} {h.label}".strip()
    return MobiusTransform(frame, M, label, depth)


def inverse(g: MobiusTransform) -> MobiusTransform:
    """J M^T J; exact inverse for an exactly J-orthogonal matrix."""
    J = g.frame.metric
    M = J @ g.matrix.T @ J
    label = _invert_label(g.label)
    return MobiusTransform(g.frame, M, label, g._depth)


def _invert_label(label: str) -> str:
    if not label:
        return ""
    parts = label.split()
    out = []
    for p in reversed(parts):
        out.append(p[:-3] if p.endswith("^-1") else p + "^-1")
    return " ".join(out)


def apply(g: MobiusTransform, p) -> ConformalPoint:
    """Image of a point; canonical scaling is restored after the product."""
    pt = lift_point(p, g.frame)
    return _canonical_null(g.frame, g.matrix @ pt.lift)


def apply_sphere(g: MobiusTransform, s: GenSphere) -> GenSphere:
    """Image of a generalized sphere, orientation transported."""
    _check_frames(g, s)
    return _normalize_sphere(g.frame, g.matrix @ s.vector)


def _expansion_at_infinity(g: MobiusTransform, inverted: bool) -> float:
    """u-component of M^{+-1} applied to the infinity vector; vanishes
    exactly when the transform fixes infinity."""
    frame = g.frame
    M = inverse(g).matrix if inverted else g.matrix
    w = M @ frame.infinity_vector
    return float(w[0] + w[1])


def isometric_sphere(g: MobiusTransform,
                     tol: Optional[Tolerances] = None) -> Tuple[GenSphere, GenSphere]:
    """The spheres where g (resp. g^{-1}) has unit conformal stretch.

    For g not fixing infinity, the vector M^{-1} n_inf - n_inf is space-like
    and cuts out the sphere centered at g^{-1}(inf) on which |g'| = 1; the
    transform carries it onto the corresponding sphere of g^{-1}, exchanging
    interior and exterior.
    """
    tol = tol or DEFAULT_TOL
    frame = g.frame
    n_inf = frame.infinity_vector
    Minv = inverse(g).matrix
    mu_fwd = _expansion_at_infinity(g, inverted=True)
    mu_bwd = _expansion_at_infinity(g, inverted=False)
    scale = max(1.0, float(np.abs(g.matrix).max()))
    if min(abs(mu_fwd), abs(mu_bwd)) < tol.infinity * scale:
        raise FixesInfinity("transform fixes infinity; conjugate first")
    i_g = _normalize_sphere(frame, Minv @ n_inf - n_inf)
    i_ginv = _normalize_sphere(frame, g.matrix @ n_inf - n_inf)
    return i_g, i_ginv


def tangency_point(a: GenSphere, b: GenSphere) -> ConformalPoint:
    """Point of tangency of two tangent spheres.

    At |<a,b>| = 1 the span of the two vectors degenerates and contains a
    single null ray, which is the lift of the common point.
    """
    frame = _check_frames(a, b)
    p = inversive_product(a, b)
    v = b.vector - p * a.vector  # <v, v> = 1 - p^2, null at tangency
    w = v if v[0] > 0 else -v
    return _canonical_null(frame, w)


def _orthobasis_for_sphere(s: GenSphere):
    """Center, radius and an orthonormal tangent frame used for sampling."""
    cr = sphere_center_radius(s)
    if cr is not None:
        return cr
    normal, offset = sphere_plane(s)
    return None, (normal, offset)


def sample_sphere_points(s: GenSphere, count: int = 64) -> list:
    """Deterministic points on a generalized sphere (Fibonacci pattern)."""
    frame = s.frame
    cr = sphere_center_radius(s)
    pts = []
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    if cr is not None:
        c, r = cr
        if frame.n == 2:
            for k in range(count):
                th = 2.0 * np.pi * k / count
                pts.append(c + r * np.array([np.cos(th), np.sin(th)]))
        else:
            for k in range(count):
                z = 1.0 - 2.0 * (k + 0.5) / count
                rho = np.sqrt(max(0.0, 1.0 - z * z))
                th = 2.0 * np.pi * k / golden
                pts.append(c + r * np.array([rho * np.cos(th), rho * np.sin(th), z]))
    else:
        normal, offset = sphere_plane(s)
        base = normal * offset
        e1 = _any_orthonormal(normal)
        e2 = np.cross(normal, e1) if frame.n == 3 else None
        for k in range(count):
            th = 2.0 * np.pi * k / golden
            rad = 0.25 + 2.0 * ((k + 0.5) / count)
            if frame.n == 2:
                pts.append(base + rad * np.cos(th) * e1)
            else:
                pts.append(base + rad * (np.cos(th) * e1 + np.sin(th) * e2))
    return pts


def _any_orthonormal(v: np.ndarray) -> np.ndarray:
    k = int(np.argmin(np.abs(v)))
    e = np.zeros_like(v)
    e[k] = 1.0
    u = e - v * v[k]
    return u / np.linalg.norm(u)


def verify_isometric_mapping(g: MobiusTransform, count: int = 64) -> float:
    """Max residual of sampled points of I_g landing on I_{g^-1}."""
    i_g, i_ginv = isometric_sphere(g)
    worst = 0.0
    for x in sample_sphere_points(i_g, count):
        image = apply(g, x)
        worst = max(worst, abs(i_ginv.side_of(image)))
    return worst


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    """Element type with its numeric certificate."""

    kind: str  # identity | elliptic | parabolic | loxodromic
    fixed_points: tuple = ()
    rotation_angle: float = 0.0
    translation_length: float = 0.0
    certificate: dict = field(default_factory=dict)

    def __repr__(self):
        extra = ""
        if self.kind == "elliptic":
            extra = f", angle={self.rotation_angle:.6g}"
        if self.kind == "loxodromic":
            extra = (f", length={self.translation_length:.6g}"
                     f", angle={self.rotation_angle:.6g}")
        return f"Classification({self.kind}{extra})"


def _cluster_eigenvalues(lam: np.ndarray, radius: float):
    """Greedy union of eigenvalues into clusters of the given radius."""
    order = np.lexsort((lam.imag, lam.real))
    lam = lam[order]
    used = np.zeros(len(lam), dtype=bool)
    clusters = []
    for i in range(len(lam)):
        if used[i]:
            continue
        members = [i]
        used[i] = True
        for j in range(i + 1, len(lam)):
            if not used[j] and any(abs(lam[j] - lam[k]) < radius for k in members):
                members.append(j)
                used[j] = True
        vals = lam[members]
        clusters.append({"mean": complex(vals.mean()),
                         "size": len(members),
                         "spread": float(np.abs(vals - vals.mean()).max())})
    return clusters


def _fixed_subspace(M: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of M - Id."""
    U, sv, Vt = np.linalg.svd(M - np.eye(M.shape[0]))
    scale = max(sv.max(), 1.0)
    keep = sv < rtol * scale
    return Vt[keep].T


def _null_direction_in(frame: LorentzFrame, basis: np.ndarray):
    """Future null ray inside a degenerate subspace, if one exists."""
    if basis.size == 0:
        return None
    G = basis.T @ (frame.metric_signs[:, None] * basis)
    w, V = np.linalg.eigh(G)
    k = int(np.argmin(np.abs(w)))
    if abs(w[k]) > 1e-5:
        return None
    v = basis @ V[:, k]
    if abs(v[0]) < 1e-9:
        return None
    if v[0] < 0:
        v = -v
    return _canonical_null(frame, v)


def _boundary_fixed_points(frame: LorentzFrame, basis: np.ndarray):
    """Null rays of a fixed subspace with signature (1, k): the two cone
    directions of its Lorentz part, used for loxodromic axes."""
    if basis.shape[1] < 2:
        return []
    G = basis.T @ (frame.metric_signs[:, None] * basis)
    w, V = np.linalg.eigh(G)
    if w[0] > -1e-9 or w[1] < 1e-12:
        return []
    if basis.shape[1] > 2:
        return []  # a whole circle of fixed points; none is canonical
    a = basis @ V[:, 0]
    b = basis @ V[:, 1]
    a /= np.sqrt(abs(w[0]))
    b /= np.sqrt(w[1])
    pts = []
    for v in (a + b, a - b):
        if v[0] < 0:
            v = -v
        pts.append(_canonical_null(frame, v))
    return pts


def _confirmed_translation_length(frame: LorentzFrame, M: np.ndarray,
                                  lam: np.ndarray) -> float:
    """Spectral radius accepted only with structural confirmation.

    The spectrum of a J-orthogonal matrix is closed under inversion, while
    the spurious eigenvalues of a defective block are a generic perturbation
    that breaks that symmetry.  A translation length is confirmed when the
    reciprocal modulus appears in the same spectrum and an independently
    computed spectrum of J M^T J (= M^{-1}) reproduces the radius.
    """
    rho = float(np.abs(lam).max())
    if rho <= 1.0:
        return 0.0
    ell = float(np.log(rho))
    dev = float(np.min(np.abs(np.abs(lam) * rho - 1.0)))
    if dev > 0.2 * (rho - 1.0):
        return 0.0
    J = frame.metric
    lam2 = np.linalg.eigvals(J @ M.T @ J)
    rho2 = float(np.abs(lam2).max())
    if rho2 <= 1.0 or abs(np.log(rho2) - ell) > 0.2 * ell:
        return 0.0
    return ell


def _extreme_eigvec_separation(frame: LorentzFrame, M: np.ndarray) -> float:
    """Chordal distance between the fixed points suggested by the largest
    and smallest eigenvalues.  A genuine loxodromic keeps them apart; the
    spurious large eigenvalues of a defective matrix collapse both onto
    the single parabolic fixed point."""
    w, V = np.linalg.eig(M)
    pts = []
    for idx in (int(np.argmax(np.abs(w))), int(np.argmin(np.abs(w)))):
        v = np.real(V[:, idx])
        if np.linalg.norm(v) < 1e-9:
            return 0.0
        if v[0] < 0:
            v = -v
        if v[0] <= 1e-12 or np.linalg.norm(v[1:]) < 1e-12 * v[0]:
            return 0.0
        pts.append(_canonical_null(frame, v))
    return chordal_distance(pts[0], pts[1])


def _kernel_signature(frame: LorentzFrame, M: np.ndarray):
    """Numerical kernel of M - Id together with its Lorentz signature.

    The fixed subspace decides the classical trichotomy: a time-like fixed
    vector means an interior fixed point (elliptic), a degenerate kernel
    means a boundary fixed point only (parabolic), a positive-definite or
    empty kernel belongs to a loxodromic.
    """
    basis = _fixed_subspace(M, rtol=1e-10)
    if basis.size == 0:
        return basis, "empty", np.zeros(0)
    G = basis.T @ (frame.metric_signs[:, None] * basis)
    gamma = np.linalg.eigvalsh(G)
    if gamma[0] < -1e-8:
        kind = "timelike"
    elif gamma[0] < 1e-8:
        kind = "null"
    else:
        kind = "posdef"
    return basis, kind, gamma


def classify(g: MobiusTransform, tol: Optional[Tolerances] = None) -> Classification:
    """Classify a conformal transformation with a numeric certificate.

    The verdict rests on the Lorentz signature of the fixed subspace
    ker(M - Id), which stays well-conditioned even when M is defective;
    eigenvalues of a parabolic matrix are individually accurate only to
    about eps^(1/3), so a translation length is believed only when the
    spectrum passes the reciprocal-pairing confirmation and the extreme
    eigenvectors point at genuinely separated fixed points.  Elements
    closer to the parabolic boundary than the pollution floor are reported
    parabolic (their fixed points merge within tolerance); verdicts whose
    certificates conflict raise Inconclusive.
    """
    tol = tol or DEFAULT_TOL
    frame = g.frame
    M = g.matrix
    m = frame.dim
    scale = max(1.0, float(np.abs(M).max()))

    dist_id = float(np.abs(M - np.eye(m)).max())
    if dist_id < tol.identity:
        return Classification("identity", certificate={"norm_to_id": dist_id})

    lam = np.linalg.eigvals(M)
    radius = max(tol.cluster_radius, 30.0 * (2.3e-16 * scale) ** (1.0 / 3.0))
    clusters = _cluster_eigenvalues(lam, radius)
    basis, kernel_kind, gamma = _kernel_signature(frame, M)
    cert = {
        "eigenvalues": [complex(v) for v in lam],
        "cluster_means": [c["mean"] for c in clusters],
        "cluster_spreads": [c["spread"] for c in clusters],
        "cluster_radius": radius,
        "scale": scale,
        "fixed_space_dim": int(basis.shape[1]) if basis.size else 0,
        "fixed_space_gram": [float(x) for x in gamma],
        "fixed_space_kind": kernel_kind,
    }

    nontrivial = [c for c in clusters
                  if abs(c["mean"] - 1.0) >= radius and abs(abs(c["mean"]) - 1.0) < 0.1]
    angle = max((abs(float(np.angle(c["mean"]))) for c in nontrivial), default=0.0)
    noise_floor = max(tol.parabolic, 100.0 * 2.3e-16 * scale)
    ell_conf = _confirmed_translation_length(frame, M, lam)
    cert["confirmed_length"] = ell_conf

    if kernel_kind in ("posdef", "empty"):
        # no interior or boundary-degenerate fixed vector: loxodromic
        if ell_conf <= noise_floor:
            raise Inconclusive("translation length below the certifiable floor", cert)
        return _finish_loxodromic(g, lam, cert, tol)

    # degenerate or time-like fixed space: a short loxodromic hugging the
    # parabolic boundary is recognized by a confirmed spectral radius AND
    # two genuinely separated fixed points; otherwise the fixed-space
    # signature wins and spurious eigenvalue spread is ignored
    separation = _extreme_eigvec_separation(frame, M)
    cert["extreme_fixed_separation"] = separation
    split = separation > tol.fixed_point_merge and ell_conf > noise_floor

    if kernel_kind == "timelike":
        if split:
            raise Inconclusive("interior fixed vector conflicts with split fixed points", cert)
        if basis.shape[1] == 2 and not nontrivial:
            # a lone (-,+) fixed plane with unit spectrum is the signature
            # of two merging loxodromic fixed points, not of a rotation
            raise Inconclusive("degenerate axis plane at the parabolic boundary", cert)
        if not nontrivial:
            raise Inconclusive("unit spectrum with no resolvable rotation angle", cert)
        fixed = tuple(_boundary_fixed_points(frame, basis))
        return Classification("elliptic", fixed, rotation_angle=angle, certificate=cert)

    # kernel_kind == "null"
    if split:
        return _finish_loxodromic(g, lam, cert, tol)
    pt = _null_direction_in(frame, basis)
    if pt is None:
        raise Inconclusive("degenerate fixed space without a null direction", cert)
    return Classification("parabolic", (pt,), rotation_angle=angle, certificate=cert)


def _finish_loxodromic(g, lam, cert, tol):
    frame = g.frame
    w, V = np.linalg.eig(g.matrix)
    length = float(np.log(np.abs(w).max()))
    fixed = []
    for idx in (int(np.argmax(np.abs(w))), int(np.argmin(np.abs(w)))):
        v = np.real(V[:, idx])
        if np.linalg.norm(v) < 1e-9:
            continue
        if v[0] < 0:
            v = -v
        if v[0] <= 0:
            continue
        fixed.append(_canonical_null(frame, v))
    if len(fixed) == 2 and chordal_distance(fixed[0], fixed[1]) < tol.fixed_point_merge:
        raise Inconclusive("loxodromic certificate with merged fixed points", cert)
    angle = 0.0
    for v in lam:
        if abs(abs(v) - 1.0) < 0.5 * min(length, 1.0):
            angle = max(angle, abs(float(np.angle(v))))
    return Classification("loxodromic", tuple(fixed), rotation_angle=angle,
                          translation_length=length, certificate=cert)
