"""Word enumeration, stabilizers, strong-invariance and combination checks,
edge-cycle verification, and the axis-translation power search.

Group-theoretic hypotheses are verified on word-length-L balls; every
verdict carries the word length it was certified at.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .config import DEFAULT_TOL, Tolerances
from .conformal import (
    Classification,
    ConformalPoint,
    GenSphere,
    LorentzFrame,
    MobiusTransform,
    apply,
    apply_sphere,
    classify,
    compose,
    identity_transform,
    inverse,
    inversive_product,
    isometric_sphere,
    lorentz_residual,
    relorentz,
    tangency_point,
)
from .errors import (
    BallTooLarge,
    Inconclusive,
    KleinbendError,
    OpenCycle,
    PairingMismatch,
    PreconditionFailed,
    SearchFailed,
)
from .scene import GeodesicLine, GeodesicPlane, common_perpendicular

__all__ = [
    "GeneratorSet",
    "LetterSystem",
    "WordGroup",
    "CombinationScene",
    "InvarianceReport",
    "EdgeCycleReport",
    "ChiSearchResult",
    "enumerate_ball",
    "evaluate_word",
    "stabilizer_of_sphere",
    "strong_invariance_check",
    "combine",
    "poincare_edge_cycle_check",
    "chi_power_search",
]


# ---------------------------------------------------------------------------
# Generator sets and letter systems
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GeneratorSet:
    """Labeled generators; reflections are detected and used as their own
    inverses during word enumeration."""

    generators: List[Tuple[str, MobiusTransform]]
    relations_hint: Optional[List[str]] = None

    def __post_init__(self):
        labels = [lbl for lbl, _ in self.generators]
        if len(set(labels)) != len(labels):
            raise KleinbendError("generator labels must be unique")

    @property
    def frame(self) -> LorentzFrame:
        return self.generators[0][1].frame

    @property
    def labels(self) -> List[str]:
        return [lbl for lbl, _ in self.generators]

    def involution_flags(self, tol: Optional[Tolerances] = None) -> Dict[str, bool]:
        tol = tol or DEFAULT_TOL
        flags = {}
        for lbl, g in self.generators:
            m = g.matrix
            flags[lbl] = bool(np.abs(m @ m - np.eye(m.shape[0])).max() < 1e-9)
        return flags

    def transform(self, label: str) -> MobiusTransform:
        for lbl, g in self.generators:
            if lbl == label:
                return g
        raise KeyError(label)

    def letter_system(self) -> "LetterSystem":
        return LetterSystem.from_generators(self)

    def conjugated(self, h: MobiusTransform, suffix: str = "") -> "GeneratorSet":
        hinv = inverse(h)
        gens = []
        for lbl, g in self.generators:
            m = relorentz(h.matrix @ g.matrix @ hinv.matrix, g.frame)
            gens.append((lbl + suffix, MobiusTransform(g.frame, m, lbl + suffix)))
        return GeneratorSet(gens)


@dataclass(eq=False)
class LetterSystem:
    """Flattened alphabet: generators plus explicit inverses where needed."""

    frame: LorentzFrame
    labels: List[str]
    mats: np.ndarray          # (G, m, m)
    inv_of: np.ndarray        # (G,)
    source: GeneratorSet

    @classmethod
    def from_generators(cls, base: GeneratorSet) -> "LetterSystem":
        flags = base.involution_flags()
        labels: List[str] = []
        mats: List[np.ndarray] = []
        inv_pairs: List[int] = []
        for lbl, g in base.generators:
            idx = len(labels)
            labels.append(lbl)
            mats.append(g.matrix)
            if flags[lbl]:
                inv_pairs.append(idx)
            else:
                labels.append(lbl + "^-1")
                mats.append(inverse(g).matrix)
                inv_pairs.append(idx + 1)
                inv_pairs.append(idx)
        return cls(base.frame, labels, np.array(mats), np.array(inv_pairs, dtype=np.int64), base)

    def word_string(self, letters: Sequence[int]) -> str:
        return " ".join(self.labels[i] for i in letters)

    def word_matrix(self, letters: Sequence[int]) -> np.ndarray:
        M = np.eye(self.frame.dim)
        for i in letters:
            M = M @ self.mats[i]
        return M


def evaluate_word(base: GeneratorSet, word: str) -> MobiusTransform:
    """Evaluate a space-separated word; 'a^-1' inverts generator 'a'."""
    g = identity_transform(base.frame, "")
    for token in word.split():
        if token.endswith("^-1"):
            g = compose(g, inverse(base.transform(token[:-3])))
        else:
            g = compose(g, base.transform(token))
    return MobiusTransform(base.frame, g.matrix, word)


# ---------------------------------------------------------------------------
# Canonical matrix index (tolerance-safe dedup)
# ---------------------------------------------------------------------------

class MatrixIndex:
    """Dictionary keyed by quantized matrix entries.

    Rounding alone can split two copies of the same element across a bucket
    boundary, so lookups also probe the neighbor buckets of entries that sit
    close to a boundary, and bucket hits are confirmed with an exact
    tolerance test.
    """

    def __init__(self, quantum: float = 1e-7, atol: float = 1e-9):
        self.quantum = quantum
        self.atol = atol
        self._buckets: Dict[bytes, List[int]] = {}
        self.mats: List[np.ndarray] = []

    def __len__(self):
        return len(self.mats)

    def _canonical(self, M: np.ndarray) -> np.ndarray:
        flat = M.ravel()
        for x in flat:
            if abs(x) > 1e-12:
                return M if x > 0 else -M
        return M

    def _key_of(self, grid: np.ndarray) -> bytes:
        # rounded float64 values are canonical bytes; +0.0 folds -0.0 away
        # and avoids int64 overflow for very large matrix entries
        return (grid + 0.0).tobytes()

    def _probe_keys(self, M: np.ndarray) -> List[bytes]:
        scaled = M.ravel() / self.quantum
        grid = np.round(scaled)
        keys = [self._key_of(grid)]
        frac = scaled - grid
        risky = np.nonzero(np.abs(np.abs(frac) - 0.5) < 1e-3)[0]
        for r in range(1, len(risky) + 1):
            if r > 3:
                break
            for combo in itertools.combinations(risky, r):
                for signs in itertools.product((-1.0, 1.0), repeat=r):
                    alt = grid.copy()
                    for pos, s in zip(combo, signs):
                        alt[pos] = np.round(scaled[pos] + 0.5 * s)
                    keys.append(self._key_of(alt))
        return keys

    def find(self, M: np.ndarray) -> Optional[int]:
        M = self._canonical(M)
        for key in self._probe_keys(M):
            for idx in self._buckets.get(key, ()):
                if np.abs(self.mats[idx] - M).max() < self.atol:
                    return idx
        return None

    def insert(self, M: np.ndarray) -> int:
        """Insert (no duplicate check) and return the new index."""
        M = self._canonical(M)
        idx = len(self.mats)
        self.mats.append(M)
        key = self._key_of(np.round(M.ravel() / self.quantum))
        self._buckets.setdefault(key, []).append(idx)
        return idx


# ---------------------------------------------------------------------------
# Ball enumeration
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class WordGroup:
    """Deduplicated ball of group elements up to a word length."""

    base: GeneratorSet
    max_word_length: int
    mats: np.ndarray                 # (N, m, m)
    words: List[str]
    lengths: np.ndarray              # (N,)
    index: MatrixIndex
    letters: List[Tuple[int, ...]]

    @property
    def count(self) -> int:
        return len(self.words)

    def contains_matrix(self, M: np.ndarray) -> bool:
        return self.index.find(M) is not None

    def word_of_matrix(self, M: np.ndarray) -> Optional[str]:
        idx = self.index.find(M)
        return None if idx is None else self.words[idx]

    def transforms(self) -> List[MobiusTransform]:
        frame = self.base.frame
        return [MobiusTransform(frame, m, w) for m, w in zip(self.mats, self.words)]


def enumerate_ball(base: GeneratorSet, length: int,
                   dedup_tol: Optional[float] = None,
                   tol: Optional[Tolerances] = None) -> WordGroup:
    """All group elements of word length <= length, shortest word kept.

    Breadth-first over reduced words, deduplicated by canonical matrix key;
    the enumeration order (level by level, generators in label order) makes
    the output independent of everything but the inputs.
    """
    tol = tol or DEFAULT_TOL
    q = dedup_tol if dedup_tol is not None else tol.dedup_quantum
    if length < 0:
        raise KleinbendError("word length must be >= 0")
    ls = base.letter_system()
    frame = base.frame
    index = MatrixIndex(quantum=q, atol=max(10 * q * 1e-2, 1e-9))
    index.insert(np.eye(frame.dim))
    words = [""]
    lengths = [0]
    letters: List[Tuple[int, ...]] = [()]

    frontier = np.eye(frame.dim)[None, :, :]
    frontier_last = np.array([-1], dtype=np.int64)
    frontier_letters: List[Tuple[int, ...]] = [()]

    for k in range(1, length + 1):
        prod, parents, letts = _kernels.expand_products(frontier, frontier_last, ls.mats, ls.inv_of)
        new_mats = []
        new_last = []
        new_letters = []
        for row in range(prod.shape[0]):
            M = prod[row]
            if index.find(M) is not None:
                continue
            if len(index) >= tol.ball_cap:
                raise BallTooLarge(f"ball exceeded cap of {tol.ball_cap} elements")
            index.insert(M)
            seq = frontier_letters[parents[row]] + (int(letts[row]),)
            words.append(ls.word_string(seq))
            lengths.append(k)
            letters.append(seq)
            new_mats.append(M)
            new_last.append(letts[row])
            new_letters.append(seq)
        if not new_mats:
            break
        frontier = np.array(new_mats)
        frontier_last = np.array(new_last, dtype=np.int64)
        frontier_letters = new_letters

    return WordGroup(base, length, np.array(index.mats), words,
                     np.array(lengths, dtype=np.int64), index, letters)


# ---------------------------------------------------------------------------
# Stabilizers
# ---------------------------------------------------------------------------

def stabilizer_of_sphere(ball: WordGroup, s: GenSphere,
                         tol: Optional[Tolerances] = None) -> GeneratorSet:
    """Ball elements preserving a sphere, returned as a generating set.

    Elements h with h(s) = +-s within tolerance are collected with their
    shortest words; a generating subset is extracted greedily by closing
    the chosen generators inside the stabilizer set.
    """
    tol = tol or DEFAULT_TOL
    v = s.vector
    imgs = ball.mats @ v
    res_plus = np.abs(imgs - v).max(axis=1)
    res_minus = np.abs(imgs + v).max(axis=1)
    hit = np.minimum(res_plus, res_minus) < tol.stabilizer
    members = [i for i in np.nonzero(hit)[0]]
    frame = ball.base.frame

    member_index = MatrixIndex()
    for i in members:
        member_index.insert(ball.mats[i])

    chosen: List[int] = []
    generated = MatrixIndex()
    generated.insert(np.eye(frame.dim))
    for i in members:
        if ball.lengths[i] == 0:
            continue
        if generated.find(ball.mats[i]) is not None:
            continue
        chosen.append(i)
        # close the chosen generators inside the stabilizer member set
        frontier = list(range(len(generated.mats)))
        while frontier:
            nxt = []
            for fi in frontier:
                for ci in chosen:
                    for M in (generated.mats[fi] @ ball.mats[ci],
                              generated.mats[fi] @ np.linalg.inv(ball.mats[ci])):
                        if member_index.find(M) is None:
                            continue
                        if generated.find(M) is None:
                            nxt.append(generated.insert(M))
            frontier = nxt

    gens = [(f"s{j}", MobiusTransform(frame, ball.mats[i], ball.words[i]))
            for j, i in enumerate(chosen)]
    if not gens:
        gens = [("id", identity_transform(frame, "id"))]
    out = GeneratorSet(gens)
    out.member_words = [ball.words[i] for i in members]  # type: ignore[attr-defined]
    return out


# ---------------------------------------------------------------------------
# Strong invariance
# ---------------------------------------------------------------------------

@dataclass
class InvarianceReport:
    """Outcome of a strong-invariance sweep, certified up to a word length."""

    check: str
    verdict: str                      # pass | fail | inconclusive
    word_length: int
    words_checked: int
    amalgam_hits: int
    min_clearance: float              # smallest |pairing| among clear words
    witnesses: List[dict] = field(default_factory=list)
    unmatched_stabilizers: List[dict] = field(default_factory=list)
    residuals: Dict[str, float] = field(default_factory=dict)
    parameters: Dict[str, object] = field(default_factory=dict)

    @property
    def caveat(self) -> str:
        return f"certified up to word length {self.word_length}"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "parameters": self.parameters,
            "word_length": self.word_length,
            "verdict": self.verdict,
            "words_checked": self.words_checked,
            "amalgam_hits": self.amalgam_hits,
            "min_clearance": _round(self.min_clearance),
            "witnesses": self.witnesses,
            "unmatched_stabilizers": self.unmatched_stabilizers,
            "residuals": {k: _round(v) for k, v in self.residuals.items()},
            "caveat": self.caveat,
        }


def _round(x, digits: int = 12):
    if isinstance(x, float):
        if not np.isfinite(x):
            return None
        return float(f"{x:.{digits}g}")
    return x


def strong_invariance_check(base: GeneratorSet, amalgam: GeneratorSet,
                            wall: GenSphere, word_length: int,
                            tol: Optional[Tolerances] = None,
                            check_name: str = "strong-invariance") -> InvarianceReport:
    """Verify that the amalgam preserves the wall while every other word
    in the ball moves it completely off itself.

    Sweeps all reduced words of length <= word_length over the base
    alphabet; a word is a violation when its wall image meets the wall
    (|inversive product| <= 1) and the element lies outside the amalgam
    ball.  Wall stabilizers not found in the amalgam ball make the verdict
    inconclusive rather than failed.
    """
    tol = tol or DEFAULT_TOL
    ls = base.letter_system()
    frame = base.frame

    stab_residual = 0.0
    for lbl, h in amalgam.generators:
        img = apply_sphere(h, wall)
        r = min(float(np.abs(img.vector - wall.vector).max()),
                float(np.abs(img.vector + wall.vector).max()))
        stab_residual = max(stab_residual, r)
    if stab_residual > tol.stabilizer:
        return InvarianceReport(
            check=check_name, verdict="fail", word_length=word_length,
            words_checked=0, amalgam_hits=0, min_clearance=0.0,
            witnesses=[{"word": lbl, "kind": "amalgam does not stabilize wall",
                        "residual": _round(stab_residual)}],
            residuals={"amalgam_wall_residual": stab_residual},
            parameters={"margin": tol.stabilizer})

    amalgam_ball = enumerate_ball(amalgam, word_length, tol=tol)

    total, cand_letters, cand_pair, min_clear, _, overflow = _kernels.wall_sweep(
        ls.mats, ls.inv_of, frame.metric_signs, wall.vector, word_length,
        margin=1e-9)
    if overflow:
        raise BallTooLarge(f"candidate buffer overflowed by {overflow}")

    order = sorted(range(len(cand_letters)),
                   key=lambda i: (int((cand_letters[i] >= 0).sum()),
                                  tuple(int(x) for x in cand_letters[i][cand_letters[i] >= 0])))
    witnesses = []
    unmatched = []
    amalgam_hits = 0
    wv = wall.vector
    for i in order:
        row = cand_letters[i]
        seq = tuple(int(x) for x in row[row >= 0])
        M = ls.word_matrix(seq)
        if amalgam_ball.contains_matrix(M):
            amalgam_hits += 1
            continue
        img = M @ wv
        stab_res = min(float(np.abs(img - wv).max()), float(np.abs(img + wv).max()))
        entry = {"word": ls.word_string(seq),
                 "pairing": _round(float(cand_pair[i])),
                 "wall_residual": _round(stab_res)}
        if stab_res < tol.stabilizer:
            unmatched.append(entry)
        else:
            witnesses.append(entry)

    if witnesses:
        verdict = "fail"
    elif unmatched:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return InvarianceReport(
        check=check_name, verdict=verdict, word_length=word_length,
        words_checked=int(total), amalgam_hits=amalgam_hits,
        min_clearance=float(min_clear) if np.isfinite(min_clear) else float("inf"),
        witnesses=witnesses[:16], unmatched_stabilizers=unmatched[:16],
        residuals={"amalgam_wall_residual": stab_residual},
        parameters={"margin": 1e-9, "alphabet": ls.labels})


# ---------------------------------------------------------------------------
# Combination
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CombinationScene:
    """Two generator sets to be combined along a wall with a common subgroup."""

    group_a: GeneratorSet
    group_b: GeneratorSet
    wall: GenSphere
    amalgam: GeneratorSet
    word_length: int = 4


def combine(scene: CombinationScene, tol: Optional[Tolerances] = None) -> GeneratorSet:
    """Merge two generator sets after verifying the wall is strongly
    invariant under the amalgam on both sides.

    Labels are preserved; amalgam generators are listed once; generators of
    the second side keep their own labels so conjugate pairs remain
    recoverable.
    """
    tol = tol or DEFAULT_TOL
    reports = []
    for name, side in (("side-a", scene.group_a), ("side-b", scene.group_b)):
        rep = strong_invariance_check(side, scene.amalgam, scene.wall,
                                      scene.word_length, tol=tol,
                                      check_name=f"combination/{name}")
        reports.append(rep)
        if rep.verdict == "fail":
            raise PreconditionFailed(
                f"wall is not strongly invariant on {name}", report=rep.to_dict())

    amalgam_labels = {lbl for lbl, _ in scene.amalgam.generators}
    merged: List[Tuple[str, MobiusTransform]] = []
    seen = MatrixIndex()
    for lbl, g in list(scene.group_a.generators) + list(scene.group_b.generators):
        if seen.find(g.matrix) is not None:
            continue
        seen.insert(g.matrix)
        merged.append((lbl, g))
    out = GeneratorSet(merged)
    out.amalgam_labels = sorted(amalgam_labels)   # type: ignore[attr-defined]
    out.invariance_reports = [r.to_dict() for r in reports]  # type: ignore[attr-defined]
    return out


# ---------------------------------------------------------------------------
# Edge cycles
# ---------------------------------------------------------------------------

@dataclass
class EdgeCycleReport:
    """Cycle-by-cycle angle sums for a face-paired configuration."""

    cycles: List[dict]
    verdict: str
    word_length_caveat: str = ""

    def to_dict(self) -> dict:
        return {"check": "edge-cycles", "verdict": self.verdict,
                "cycles": self.cycles}


def _match_face(spheres: List[GenSphere], v: np.ndarray, tol: float) -> Optional[int]:
    best, best_res = None, np.inf
    for i, s in enumerate(spheres):
        r = min(float(np.abs(s.vector - v).max()), float(np.abs(s.vector + v).max()))
        if r < best_res:
            best, best_res = i, r
    return best if best_res < tol else None


def poincare_edge_cycle_check(faces: List[Tuple[GenSphere, MobiusTransform]],
                              tol: Optional[Tolerances] = None,
                              cycle_cap: int = 64) -> EdgeCycleReport:
    """Trace edge cycles of a face pairing and sum their dihedral angles.

    Crossing faces contribute edges whose cycles must sum to 2 pi (complete
    cycles) or 2 pi / m (elliptic cycles, m reported); tangent face pairs
    are degenerate edges whose cycle transformations must be parabolic and
    are reported with the tangency point.
    """
    tol = tol or DEFAULT_TOL
    spheres = [s for s, _ in faces]
    pairings = [g for _, g in faces]
    n = len(faces)

    partner = []
    for i, (s, g) in enumerate(faces):
        img = g.matrix @ s.vector
        j = _match_face(spheres, img, 1e-8 * max(1.0, float(np.abs(img).max())))
        if j is None:
            raise PairingMismatch(f"face {i} is not carried onto a listed face")
        partner.append(j)
    for i in range(n):
        back = pairings[partner[i]].matrix @ pairings[i].matrix
        if np.abs(back - np.eye(back.shape[0])).max() > 1e-8 * max(1.0, np.abs(back).max()):
            raise PairingMismatch(
                f"pairing of face {partner[i]} is not inverse to pairing of face {i}")

    # classify face pair contacts
    crossing = []
    tangent = []
    for i in range(n):
        for j in range(i + 1, n):
            p = inversive_product(spheres[i], spheres[j])
            if abs(abs(p) - 1.0) < tol.tangency:
                tangent.append((i, j))
            elif abs(p) < 1.0:
                crossing.append((i, j))

    cycles = []
    verdict = "pass"
    visited = set()
    frame = faces[0][1].frame
    dim = frame.dim

    def dihedral(i: int, j: int) -> float:
        return float(np.arccos(np.clip(-inversive_product(spheres[i], spheres[j]), -1, 1)))

    # crossing edges: walk the cycle until the composed transformation is
    # the identity; the total dihedral angle must then be 2 pi.  The number
    # of edge returns is the elliptic order of the single-loop composition.
    for (i0, j0) in crossing:
        for start in ((i0, j0), (j0, i0)):
            if start in visited:
                continue
            total_angle = 0.0
            h = identity_transform(frame)
            cur = start
            loops = 0
            steps = 0
            closed = False
            while steps < cycle_cap:
                visited.add(cur)
                through, other = cur
                total_angle += dihedral(through, other)
                g = pairings[through]
                h = compose(g, h)
                img_other = g.matrix @ spheres[other].vector
                nxt_other = _match_face(spheres, img_other,
                                        1e-7 * max(1.0, float(np.abs(img_other).max())))
                if nxt_other is None:
                    raise OpenCycle(
                        f"edge image of pair ({through},{other}) left the face list")
                cur = (nxt_other, partner[through])
                steps += 1
                if cur == start:
                    loops += 1
                    if np.abs(h.matrix - np.eye(dim)).max() < \
                            1e-7 * max(1.0, float(np.abs(h.matrix).max())):
                        closed = True
                        break
            if not closed:
                raise OpenCycle(f"cycle from faces {start} did not close to the "
                                f"identity within {cycle_cap} steps")
            entry = {"type": "complete", "start": list(start),
                     "angle_sum": _round(total_angle),
                     "copies": steps,
                     "order": loops,
                     "target": _round(2 * np.pi),
                     "deviation": _round(abs(total_angle - 2 * np.pi))}
            if abs(total_angle - 2 * np.pi) > 1e-7:
                verdict = "fail"
            cycles.append(entry)

    # tangency contacts: point-based walk; the cycle transformation must be
    # parabolic with fixed point at the tangency
    tangent_states = set()
    for (i0, j0) in tangent:
        for start in ((i0, j0), (j0, i0)):
            if start in tangent_states:
                continue
            cur = start
            h = identity_transform(frame)
            pt = tangency_point(spheres[cur[0]], spheres[cur[1]])
            steps = 0
            closed = False
            while steps < cycle_cap:
                tangent_states.add(cur)
                through, other = cur
                g = pairings[through]
                h = compose(g, h)
                img_pt = apply(g, tangency_point(spheres[through], spheres[other]))
                arrived = partner[through]
                nxt = None
                for (a, b) in tangent:
                    for cand in ((a, b), (b, a)):
                        if cand[1] != arrived:
                            continue
                        tp = tangency_point(spheres[cand[0]], spheres[cand[1]])
                        if float(np.linalg.norm(tp.lift[1:] - img_pt.lift[1:])) < 1e-6:
                            nxt = cand
                            break
                    if nxt:
                        break
                if nxt is None:
                    raise OpenCycle(f"tangency image of pair ({through},{other}) "
                                    f"matches no listed contact")
                cur = nxt
                steps += 1
                if cur == start:
                    closed = True
                    break
            if not closed:
                raise OpenCycle(f"tangency cycle from {start} did not close")
            try:
                cls = classify(h, tol)
                kind = cls.kind
                fp = cls.fixed_points[0] if cls.fixed_points else None
            except Inconclusive:
                kind = "inconclusive"
                fp = None
            entry = {"type": "parabolic-degenerate", "start": list(start),
                     "angle_sum": 0.0, "copies": steps,
                     "cycle_kind": kind}
            coords = pt.coords()
            entry["tangency_point"] = ("inf" if isinstance(coords, str)
                                       else [float(x) for x in coords])
            if fp is not None and not isinstance(fp.coords(), str):
                entry["cycle_fixed_point"] = [float(x) for x in fp.coords()]
                entry["fixed_point_vs_tangency"] = _round(
                    float(np.linalg.norm(fp.lift[1:] - pt.lift[1:])))
            if kind != "parabolic":
                verdict = "fail" if kind != "inconclusive" else "inconclusive"
            cycles.append(entry)

    return EdgeCycleReport(cycles=cycles, verdict=verdict)


def _elliptic_order(h: MobiusTransform, cap: int = 400) -> Optional[int]:
    m = h.matrix.shape[0]
    P = h.matrix.copy()
    for k in range(1, cap + 1):
        if np.abs(P - np.eye(m)).max() < 1e-7 * max(1.0, float(np.abs(P).max())):
            return k
        P = P @ h.matrix
    return None


# ---------------------------------------------------------------------------
# Axis translation power search
# ---------------------------------------------------------------------------

@dataclass
class ChiSearchResult:
    n: int
    conjugated: MobiusTransform
    chi: MobiusTransform
    translated_sphere: GenSphere
    axis_residual: float
    isometric_residual: float
    boundary_map_residual: float
    classification: Classification

    def to_dict(self) -> dict:
        return {"n": self.n,
                "axis_residual": _round(self.axis_residual),
                "isometric_residual": _round(self.isometric_residual),
                "boundary_map_residual": _round(self.boundary_map_residual),
                "chi_kind": self.classification.kind,
                "chi_length": _round(self.classification.translation_length)}


def chi_power_search(w1: GeodesicPlane, w2: GeodesicPlane, g1: MobiusTransform,
                     horosphere: GenSphere, n_max: int = 12,
                     tol: Optional[Tolerances] = None) -> ChiSearchResult:
    """Find the smallest power of the axis translation carrying the
    isometric sphere of g1 into a horosphere at the axis endpoint.

    chi is the composition of the two plane reflections: loxodromic with
    axis the common perpendicular.  Powers are tried in the order
    0, 1, -1, 2, -2, ... and the first n with the translated sphere meeting
    the horosphere (|inversive product| < 1) is returned together with the
    conjugated element, whose isometric sphere the translated sphere must
    reproduce.
    """
    tol = tol or DEFAULT_TOL
    chi = compose(w1.reflection("w1"), w2.reflection("w2"))
    cls = classify(chi, tol)
    if cls.kind != "loxodromic":
        raise SearchFailed(f"axis translation classified {cls.kind}, not loxodromic")
    perp = common_perpendicular(w1, w2, tol)
    axis_residual = _axis_match_residual(cls, perp)
    if axis_residual > tol.fixed_point_merge:
        raise SearchFailed(f"translation axis does not match the common perpendicular "
                           f"(residual {axis_residual:.3g})")

    i_g1, _ = isometric_sphere(g1, tol)
    chi_inv = inverse(chi)

    best = None
    for n in _alternating_range(n_max):
        power = _integer_power(chi if n >= 0 else chi_inv, abs(n))
        moved = apply_sphere(power, i_g1)
        if abs(inversive_product(moved, horosphere)) < 1.0:
            best = (n, power, moved)
            break
    if best is None:
        raise SearchFailed(f"no power within |n| <= {n_max} reaches the horosphere")
    n, power, moved = best
    conj = compose(compose(power, g1), inverse(power))
    conj = MobiusTransform(conj.frame, relorentz(conj.matrix, conj.frame), conj.label)
    i_conj, _ = isometric_sphere(conj, tol)
    iso_res = min(float(np.abs(i_conj.vector - moved.vector).max()),
                  float(np.abs(i_conj.vector + moved.vector).max()))
    bmap_res = _boundary_circle_residual(conj, horosphere, i_conj)
    return ChiSearchResult(n=n, conjugated=conj, chi=chi, translated_sphere=moved,
                           axis_residual=axis_residual, isometric_residual=iso_res,
                           boundary_map_residual=bmap_res, classification=cls)


def _alternating_range(n_max: int) -> Iterable[int]:
    yield 0
    for k in range(1, n_max + 1):
        yield k
        yield -k


def _integer_power(g: MobiusTransform, k: int) -> MobiusTransform:
    out = identity_transform(g.frame)
    for _ in range(k):
        out = compose(out, g)
    return MobiusTransform(g.frame, relorentz(out.matrix, g.frame), out.label)


def _axis_match_residual(cls: Classification, perp: GeodesicLine) -> float:
    if len(cls.fixed_points) != 2:
        return float("inf")
    a, b = cls.fixed_points
    e0, e1 = perp.endpoints
    d1 = max(float(np.linalg.norm(a.lift[1:] - e0.lift[1:])),
             float(np.linalg.norm(b.lift[1:] - e1.lift[1:])))
    d2 = max(float(np.linalg.norm(a.lift[1:] - e1.lift[1:])),
             float(np.linalg.norm(b.lift[1:] - e0.lift[1:])))
    return min(d1, d2)


def _boundary_circle_residual(g: MobiusTransform, cutter: GenSphere,
                              i_g: GenSphere, count: int = 24) -> float:
    """Residual of the mapped intersection circle law: points of
    I_g ∩ cutter must land on I_{g^-1} ∩ cutter when the cutter is
    preserved by the Euclidean part of g."""
    from .scene import circle_from_spheres
    from .errors import NoCircle
    try:
        pencil = circle_from_spheres(i_g, cutter)
    except NoCircle:
        return float("nan")
    _, i_ginv = isometric_sphere(g)
    worst = 0.0
    for x in pencil.circle_points(count):
        img = apply(g, x)
        worst = max(worst, abs(i_ginv.side_of(img)), abs(cutter.side_of(img)))
    return worst
