"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

The backend is chosen at import time: set KLEINBEND_NO_NUMBA=1 to force
the numpy path.  Both implementations traverse words in the same reduced
order and return identical arrays, which the test suite asserts.

Word convention: letters index a generator list; inv_of[i] is the index of
the inverse letter (i itself for involutions).  A word is reduced when no
letter is followed by its inverse.  Reduced words of length <= L are a
superset of the group ball, which is what the verification sweeps need.
"""

from __future__ import annotations

import numpy as np

from .config import numba_enabled

__all__ = [
    "BACKEND",
    "expand_products",
    "wall_sweep",
    "orbit_apply",
    "paint_min_rank",
]


def _expand_products_np(mats: np.ndarray, last: np.ndarray, gens: np.ndarray,
                        inv_of: np.ndarray):
    """All one-letter extensions of the given words with free reduction.

    Returns (products, parents, letters): products[k] = mats[parents[k]] @
    gens[letters[k]] for every reduced extension, ordered by (parent, letter).
    """
    n, m, _ = mats.shape
    g = gens.shape[0]
    prod = np.einsum("nij,gjk->ngik", mats, gens)
    letters = np.tile(np.arange(g, dtype=np.int64), n)
    parents = np.repeat(np.arange(n, dtype=np.int64), g)
    plast = last[parents]
    valid = (plast < 0) | (letters != inv_of[np.maximum(plast, 0)])
    return (prod.reshape(n * g, m, m)[valid],
            parents[valid], letters[valid])


def _wall_sweep_np(gens: np.ndarray, inv_of: np.ndarray, signs: np.ndarray,
                   wall: np.ndarray, depth: int, margin: float,
                   cand_cap: int, track_lorentz: bool):
    """Sweep all reduced words of length 1..depth against a wall vector.

    For each word w the sweep computes p = <M_w wall, wall> and records the
    word as a candidate when |p| <= 1 + margin (possible stabilizer or
    violation).  Returns (total words, candidate letter matrix, candidate
    pairings, min |p| among non-candidates, max Lorentz residual, overflow).
    Level-synchronous with chunked leaf processing; leaf level not retained.
    """
    g, m, _ = gens.shape
    J = np.diag(signs)
    jwall = signs * wall
    cand_letters = np.full((cand_cap, depth), -1, dtype=np.int64)
    cand_pair = np.zeros(cand_cap, dtype=np.float64)
    ncand = 0
    overflow = 0
    total = 0
    min_clear = np.inf
    max_lorentz = 0.0

    level_mats = np.eye(m)[None, :, :]
    level_last = np.full(1, -1, dtype=np.int64)
    level_letters = np.zeros((1, 0), dtype=np.int64)

    for k in range(1, depth + 1):
        nxt_mats = []
        nxt_last = []
        nxt_letters = []
        chunk = max(1, 200_000 // g)
        for lo in range(0, level_mats.shape[0], chunk):
            mats = level_mats[lo:lo + chunk]
            last = level_last[lo:lo + chunk]
            lett = level_letters[lo:lo + chunk]
            prod, parents, letters = _expand_products_np(mats, last, gens, inv_of)
            total += prod.shape[0]
            images = prod @ wall
            pair = images @ jwall
            words = np.concatenate([lett[parents], letters[:, None]], axis=1)
            if track_lorentz:
                res = np.einsum("nji,jk,nkl->nil", prod, J, prod) - J
                max_lorentz = max(max_lorentz, float(np.abs(res).max()))
            hit = np.abs(pair) <= 1.0 + margin
            nhit = int(hit.sum())
            if nhit:
                take = min(nhit, cand_cap - ncand)
                if take < nhit:
                    overflow += nhit - take
                idx = np.nonzero(hit)[0][:take]
                cand_letters[ncand:ncand + take, :k] = words[idx]
                cand_pair[ncand:ncand + take] = pair[idx]
                ncand += take
            if nhit < pair.shape[0]:
                min_clear = min(min_clear, float(np.abs(pair[~hit]).min()))
            if k < depth:
                nxt_mats.append(prod)
                nxt_last.append(letters)
                nxt_letters.append(words)
        if k < depth:
            level_mats = np.concatenate(nxt_mats, axis=0)
            level_last = np.concatenate(nxt_last, axis=0)
            level_letters = np.concatenate(nxt_letters, axis=0)

    return (total, cand_letters[:ncand], cand_pair[:ncand],
            min_clear, max_lorentz, overflow)


def _orbit_apply_np(mats: np.ndarray, seed: np.ndarray) -> np.ndarray:
    return mats @ seed


def _paint_min_rank_np(pix: np.ndarray, rank: np.ndarray, npix: int) -> np.ndarray:
    """Winner (minimal rank, ties by index) for each linear pixel index."""
    winner = np.full(npix, -1, dtype=np.int64)
    if pix.size == 0:
        return winner
    order = np.lexsort((np.arange(pix.size), rank, pix))
    spix = pix[order]
    first = np.ones(spix.size, dtype=bool)
    first[1:] = spix[1:] != spix[:-1]
    winner[spix[first]] = order[first]
    return winner


if numba_enabled():
    from numba import njit

    @njit(cache=True)
    def _wall_sweep_nb(gens, inv_of, signs, wall, depth, margin,
                       cand_cap, track_lorentz):
        g, m, _ = gens.shape
        stack = np.empty((depth + 1, m, m))
        stack[0] = np.eye(m)
        letters = np.full(depth, -1, dtype=np.int64)
        pos = np.zeros(depth, dtype=np.int64)
        cand_letters = np.full((cand_cap, depth), -1, dtype=np.int64)
        cand_pair = np.zeros(cand_cap)
        ncand = 0
        overflow = 0
        total = 0
        min_clear = np.inf
        max_lorentz = 0.0
        jwall = signs * wall

        d = 0
        while True:
            if pos[d] >= g:
                if d == 0:
                    break
                pos[d] = 0
                letters[d] = -1
                d -= 1
                pos[d] += 1
                continue
            letter = pos[d]
            if d > 0 and letter == inv_of[letters[d - 1]]:
                pos[d] += 1
                continue
            letters[d] = letter
            # stack[d+1] = stack[d] @ gens[letter]
            for i in range(m):
                for j in range(m):
                    acc = 0.0
                    for t in range(m):
                        acc += stack[d, i, t] * gens[letter, t, j]
                    stack[d + 1, i, j] = acc
            total += 1
            # pairing <M wall, wall>_J
            p = 0.0
            for i in range(m):
                acc = 0.0
                for t in range(m):
                    acc += stack[d + 1, i, t] * wall[t]
                p += acc * jwall[i]
            if track_lorentz:
                for i in range(m):
                    for j in range(m):
                        acc = 0.0
                        for t in range(m):
                            acc += stack[d + 1, t, i] * signs[t] * stack[d + 1, t, j]
                        target = signs[i] if i == j else 0.0
                        r = abs(acc - target)
                        if r > max_lorentz:
                            max_lorentz = r
            ap = abs(p)
            if ap <= 1.0 + margin:
                if ncand < cand_cap:
                    for t in range(d + 1):
                        cand_letters[ncand, t] = letters[t]
                    cand_pair[ncand] = p
                    ncand += 1
                else:
                    overflow += 1
            elif ap < min_clear:
                min_clear = ap
            if d + 1 < depth:
                d += 1
                pos[d] = 0
            else:
                pos[d] += 1

        return (total, cand_letters[:ncand], cand_pair[:ncand],
                min_clear, max_lorentz, overflow)

    @njit(cache=True)
    def _orbit_apply_nb(mats, seed):
        n, m, _ = mats.shape
        out = np.empty((n, m))
        for k in range(n):
            for i in range(m):
                acc = 0.0
                for t in range(m):
                    acc += mats[k, i, t] * seed[t]
                out[k, i] = acc
        return out

    @njit(cache=True)
    def _paint_min_rank_nb(pix, rank, npix):
        winner = np.full(npix, -1, dtype=np.int64)
        best = np.full(npix, np.iinfo(np.int64).max, dtype=np.int64)
        for k in range(pix.shape[0]):
            p = pix[k]
            r = rank[k]
            if r < best[p]:
                best[p] = r
                winner[p] = k
        return winner

    BACKEND = "numba"

    def wall_sweep(gens, inv_of, signs, wall, depth, margin=1e-9,
                   cand_cap=500_000, track_lorentz=False):
        return _wall_sweep_nb(np.ascontiguousarray(gens, dtype=np.float64),
                              np.ascontiguousarray(inv_of, dtype=np.int64),
                              np.ascontiguousarray(signs, dtype=np.float64),
                              np.ascontiguousarray(wall, dtype=np.float64),
                              depth, margin, cand_cap, track_lorentz)

    def orbit_apply(mats, seed):
        return _orbit_apply_nb(np.ascontiguousarray(mats, dtype=np.float64),
                               np.ascontiguousarray(seed, dtype=np.float64))

    def paint_min_rank(pix, rank, npix):
        return _paint_min_rank_nb(np.ascontiguousarray(pix, dtype=np.int64),
                                  np.ascontiguousarray(rank, dtype=np.int64),
                                  npix)
else:
    BACKEND = "numpy"

    def wall_sweep(gens, inv_of, signs, wall, depth, margin=1e-9,
                   cand_cap=500_000, track_lorentz=False):
        return _wall_sweep_np(np.asarray(gens, dtype=np.float64),
                              np.asarray(inv_of, dtype=np.int64),
                              np.asarray(signs, dtype=np.float64),
                              np.asarray(wall, dtype=np.float64),
                              depth, margin, cand_cap, track_lorentz)

    def orbit_apply(mats, seed):
        return _orbit_apply_np(np.asarray(mats, dtype=np.float64),
                               np.asarray(seed, dtype=np.float64))

    def paint_min_rank(pix, rank, npix):
        return _paint_min_rank_np(np.asarray(pix, dtype=np.int64),
                                  np.asarray(rank, dtype=np.int64), npix)


def expand_products(mats, last, gens, inv_of):
    """One-letter reduced extensions (shared by both backends; the numpy
    einsum is already the fast path for the ball builder's batch sizes)."""
    return _expand_products_np(np.asarray(mats, dtype=np.float64),
                               np.asarray(last, dtype=np.int64),
                               np.asarray(gens, dtype=np.float64),
                               np.asarray(inv_of, dtype=np.int64))
