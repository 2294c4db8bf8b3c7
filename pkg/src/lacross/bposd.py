"""Belief propagation with ordered-statistics fallback for DEM decoding.

The decoder consumes a :class:`~lacross.dem.DetectorErrorModel`: checks are
detectors, variables are error channels.  Belief propagation runs the
normalized min-sum rule under a flooding schedule with early exit once the
hard decision reproduces the syndrome.  Unconverged syndromes fall through to
ordered-statistics decoding: channels are ranked most-probable-error first by
the BP posteriors, GF(2) elimination picks a pivot basis among the top-ranked
columns, and the order-1 combination sweep evaluates every single flip of a
non-pivot channel, scoring candidates by the summed prior log-likelihood
ratios of their support.  Every correction returned by the sweep satisfies
the syndrome exactly.

All hot loops run over bit-packed uint64 words under numba; ``decode_batch``
additionally memoizes by syndrome, which is exact because decoding is a
deterministic function of the syndrome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .dem import DetectorErrorModel, MalformedDemError

__all__ = [
    "TannerGraph",
    "DecodeConfig",
    "DecodeResult",
    "bp_minsum",
    "osd_postprocess",
    "decode",
    "decode_batch",
]

# Stand-in for "min over no other edges" on degree-1 checks; large enough to
# dominate any prior, small enough to stay exact in float64 sums.
_LLR_CAP = 1e12

# Syndromes memoized per decode_batch call; 84-byte keys at the largest
# gating size keep even the cap comfortably under a gigabyte.
_CACHE_CAP = 4_000_000

_DEBRUIJN = np.uint64(0x03F79D71B4CA8B09)
_CTZ_TABLE = np.zeros(64, dtype=np.uint8)
for _b in range(64):
    _CTZ_TABLE[((1 << _b) * int(_DEBRUIJN) % (1 << 64)) >> 58] = _b
del _b


@njit(cache=True, inline="always")
def _ctz(word):
    low = word & (~word + np.uint64(1))
    return _CTZ_TABLE[(low * _DEBRUIJN) >> np.uint64(58)]


@dataclass(frozen=True)
class DecodeConfig:
    """Knobs for BP (iteration cap, min-sum scale) and OSD (sweep order)."""

    max_iterations: int = 4
    min_sum_scale: float = 0.3
    osd_order: int = 1

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.min_sum_scale <= 1.0:
            raise ValueError("min_sum_scale must lie in (0, 1]")
        if self.osd_order not in (0, 1):
            raise ValueError("osd_order must be 0 or 1")


@dataclass
class DecodeResult:
    correction: np.ndarray
    predicted: np.ndarray
    converged: bool
    soft: np.ndarray


class TannerGraph:
    """Sparse detector/channel adjacency plus packed columns for OSD.

    Edges are stored twice: check-major (for the min-sum check pass) and
    variable-major (for posterior sums and syndrome checks), with
    ``vc_edge`` mapping each variable-major slot to its check-major index so
    both passes share one message array.
    """

    def __init__(self, dem: DetectorErrorModel) -> None:
        if dem.num_errors == 0:
            raise MalformedDemError("cannot decode an empty error model")
        self.num_checks = dem.num_detectors
        self.num_vars = dem.num_errors
        self.num_observables = dem.num_observables
        if self.num_observables > 64:
            raise MalformedDemError("observable bitmasks are limited to 64")

        chk = np.array(
            [d for dets in dem.dets for d in dets], dtype=np.int32
        )
        var = np.array(
            [v for v, dets in enumerate(dem.dets) for _ in dets],
            dtype=np.int32,
        )
        by_check = np.lexsort((var, chk))
        by_var = np.lexsort((chk, var))
        self.chk_var = var[by_check]
        self.var_chk = chk[by_var]
        self.chk_ptr = np.zeros(self.num_checks + 1, dtype=np.int32)
        np.add.at(self.chk_ptr, chk + 1, 1)
        np.cumsum(self.chk_ptr, out=self.chk_ptr)
        self.var_ptr = np.zeros(self.num_vars + 1, dtype=np.int32)
        np.add.at(self.var_ptr, var + 1, 1)
        np.cumsum(self.var_ptr, out=self.var_ptr)
        pos_in_check = np.empty(chk.size, dtype=np.int32)
        pos_in_check[by_check] = np.arange(chk.size, dtype=np.int32)
        self.vc_edge = pos_in_check[by_var]

        self.priors = np.asarray(dem.probs, dtype=np.float64)
        if np.any(self.priors <= 0.0) or np.any(self.priors > 0.5):
            raise MalformedDemError("channel priors must lie in (0, 0.5]")
        self.prior_llr = np.log((1.0 - self.priors) / self.priors)

        self.obs_words = np.zeros(self.num_vars, dtype=np.uint64)
        for v, obs in enumerate(dem.obs):
            for o in obs:
                self.obs_words[v] |= np.uint64(1) << np.uint64(o)

        self.det_words = max((self.num_checks + 63) // 64, 1)
        self.col_words = np.zeros((self.num_vars, self.det_words), dtype=np.uint64)
        for v, dets in enumerate(dem.dets):
            for d in dets:
                self.col_words[v, d >> 6] |= np.uint64(1) << np.uint64(d & 63)

    def predicted_observables(self, correction: np.ndarray) -> np.ndarray:
        """Fold a correction through the observable bitmasks."""
        mask = 0
        for v in np.flatnonzero(correction):
            mask ^= int(self.obs_words[v])
        return self._mask_to_bits(mask)

    def _mask_to_bits(self, mask: int) -> np.ndarray:
        out = np.zeros(self.num_observables, dtype=np.uint8)
        for o in range(self.num_observables):
            out[o] = (mask >> o) & 1
        return out


@njit(cache=True)
def _bp_kernel(
    chk_ptr,
    chk_var,
    var_ptr,
    var_chk,
    vc_edge,
    prior_llr,
    obs_words,
    syndrome,
    max_iterations,
    scale,
    msg_r,
    msg_q,
    soft,
    hard,
    acc,
):
    """Normalized min-sum; returns (converged flag, observable mask)."""
    num_vars = prior_llr.shape[0]
    num_checks = chk_ptr.shape[0] - 1
    for v in range(num_vars):
        llr = prior_llr[v]
        soft[v] = llr
        for k in range(var_ptr[v], var_ptr[v + 1]):
            msg_q[vc_edge[k]] = llr
    converged = 0
    obs_mask = np.uint64(0)
    for _ in range(max_iterations):
        for c in range(num_checks):
            lo = chk_ptr[c]
            hi = chk_ptr[c + 1]
            min1 = 1e300
            min2 = 1e300
            arg = -1
            neg = 0
            for e in range(lo, hi):
                q = msg_q[e]
                if q < 0.0:
                    neg ^= 1
                    q = -q
                if q < min1:
                    min2 = min1
                    min1 = q
                    arg = e
                elif q < min2:
                    min2 = q
            sgn = -scale if syndrome[c] else scale
            if neg:
                sgn = -sgn
            for e in range(lo, hi):
                mag = min2 if e == arg else min1
                if mag > _LLR_CAP:
                    mag = _LLR_CAP
                msg_r[e] = -sgn * mag if msg_q[e] < 0.0 else sgn * mag
        # Fused pass: posterior, hard decision, achieved syndrome, and the
        # variable-to-check messages for the next iteration.
        for c in range(num_checks):
            acc[c] = 0
        obs_mask = np.uint64(0)
        for v in range(num_vars):
            total = prior_llr[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                total += msg_r[vc_edge[k]]
            soft[v] = total
            if total < 0.0:
                hard[v] = 1
                obs_mask ^= obs_words[v]
                for k in range(var_ptr[v], var_ptr[v + 1]):
                    acc[var_chk[k]] ^= 1
            else:
                hard[v] = 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = vc_edge[k]
                msg_q[e] = total - msg_r[e]
        ok = True
        for c in range(num_checks):
            if acc[c] != syndrome[c]:
                ok = False
                break
        if ok:
            converged = 1
            break
    return converged, obs_mask


@njit(cache=True)
def _osd_kernel(
    col_words,
    var_ptr,
    var_chk,
    prior_llr,
    obs_words,
    syn_supp,
    order,
    osd_order,
    rank_cap,
    correction,
):
    """Pivot discovery, transform build, OSD-0 solve, order-1 sweep.

    Returns (status, observable mask): status 0 on success, -1 when the
    syndrome lies outside the column space, -2 on an internal rank fault.
    """
    num_vars, words = col_words.shape
    # Padding detectors up to the word boundary only adds identity rows that
    # end up as trivially satisfied annihilators.
    num_checks = words * 64
    one = np.uint64(1)
    zero = np.uint64(0)

    # Phase A: scan columns most-probable-error first, keeping the first
    # linearly independent set as pivots.  Once the rank reaches the true
    # detector count every remaining column is dependent, so stop scanning.
    echelon = np.zeros((num_checks, words), dtype=np.uint64)
    lead_slot = np.full(num_checks, -1, dtype=np.int32)
    pivot_col = np.empty(num_checks, dtype=np.int32)
    is_pivot = np.zeros(num_vars, dtype=np.uint8)
    work = np.empty(words, dtype=np.uint64)
    rank = 0
    for oi in range(num_vars):
        if rank >= rank_cap:
            break
        col = order[oi]
        for t in range(words):
            work[t] = col_words[col, t]
        start = 0
        while True:
            lead = -1
            for t in range(start, words):
                if work[t] != zero:
                    lead = (t << 6) + _ctz(work[t])
                    start = t
                    break
            if lead < 0:
                break
            slot = lead_slot[lead]
            if slot < 0:
                for t in range(words):
                    echelon[rank, t] = work[t]
                lead_slot[lead] = rank
                pivot_col[rank] = col
                is_pivot[col] = 1
                rank += 1
                break
            for t in range(start, words):
                work[t] ^= echelon[slot, t]

    # Phase B: row-reduce [A_P | I] to harvest a left inverse of the pivot
    # block plus the annihilator rows that certify solvability.
    wa = max((rank + 63) >> 6, 1)
    mat = np.zeros((num_checks, wa + words), dtype=np.uint64)
    for j in range(rank):
        col = pivot_col[j]
        wj = j >> 6
        bj = one << np.uint64(j & 63)
        for t in range(words):
            word = col_words[col, t]
            base = t << 6
            while word != zero:
                mat[base + _ctz(word), wj] |= bj
                word &= word - one
    for i in range(num_checks):
        mat[i, wa + (i >> 6)] |= one << np.uint64(i & 63)

    row_of = np.full(rank if rank > 0 else 1, -1, dtype=np.int32)
    used = np.zeros(num_checks, dtype=np.uint8)
    for j in range(rank):
        wj = j >> 6
        bj = np.uint64(j & 63)
        pivot_row = -1
        for i in range(num_checks):
            if used[i] == 0 and (mat[i, wj] >> bj) & one:
                pivot_row = i
                break
        if pivot_row < 0:
            return -2, zero
        used[pivot_row] = 1
        row_of[j] = pivot_row
        for i in range(num_checks):
            if i != pivot_row and (mat[i, wj] >> bj) & one:
                for t in range(wj, wa + words):
                    src = mat[pivot_row, t]
                    if src != zero:
                        mat[i, t] ^= src

    syn_words = np.zeros(words, dtype=np.uint64)
    for si in range(syn_supp.shape[0]):
        d = syn_supp[si]
        syn_words[d >> 6] |= one << np.uint64(d & 63)
    for i in range(num_checks):
        if used[i]:
            continue
        par = zero
        for t in range(words):
            par ^= mat[i, wa + t] & syn_words[t]
        par ^= par >> np.uint64(32)
        par ^= par >> np.uint64(16)
        par ^= par >> np.uint64(8)
        par ^= par >> np.uint64(4)
        par ^= par >> np.uint64(2)
        par ^= par >> np.uint64(1)
        if par & one:
            return -1, zero

    # Column-packed transform: t_cols[d] holds T e_d, so T v for sparse v is
    # a handful of word XORs.
    wr = max((rank + 63) >> 6, 1)
    t_cols = np.zeros((num_checks, wr), dtype=np.uint64)
    for j in range(rank):
        src = row_of[j]
        wj = j >> 6
        bj = one << np.uint64(j & 63)
        for t in range(words):
            word = mat[src, wa + t]
            base = t << 6
            while word != zero:
                t_cols[base + _ctz(word), wj] |= bj
                word &= word - one

    x0 = np.zeros(wr, dtype=np.uint64)
    for si in range(syn_supp.shape[0]):
        d = syn_supp[si]
        for t in range(wr):
            x0[t] ^= t_cols[d, t]

    base_score = 0.0
    for t in range(wr):
        word = x0[t]
        base = t << 6
        while word != zero:
            base_score += prior_llr[pivot_col[base + _ctz(word)]]
            word &= word - one

    best_score = base_score
    best_cand = -1
    cand = np.empty(wr, dtype=np.uint64)
    if osd_order >= 1:
        for oi in range(num_vars):
            col = order[oi]
            if is_pivot[col]:
                continue
            score = prior_llr[col]
            if score >= best_score:
                continue
            for t in range(wr):
                cand[t] = x0[t]
            for k in range(var_ptr[col], var_ptr[col + 1]):
                d = var_chk[k]
                for t in range(wr):
                    cand[t] ^= t_cols[d, t]
            worse = False
            for t in range(wr):
                word = cand[t]
                base = t << 6
                while word != zero:
                    score += prior_llr[pivot_col[base + _ctz(word)]]
                    if score >= best_score:
                        worse = True
                        break
                    word &= word - one
                if worse:
                    break
            if not worse and score < best_score:
                best_score = score
                best_cand = col

    for v in range(num_vars):
        correction[v] = 0
    obs_mask = zero
    if best_cand >= 0:
        correction[best_cand] = 1
        obs_mask ^= obs_words[best_cand]
        for t in range(wr):
            cand[t] = x0[t]
        for k in range(var_ptr[best_cand], var_ptr[best_cand + 1]):
            d = var_chk[k]
            for t in range(wr):
                cand[t] ^= t_cols[d, t]
        chosen = cand
    else:
        chosen = x0
    for t in range(wr):
        word = chosen[t]
        base = t << 6
        while word != zero:
            col = pivot_col[base + _ctz(word)]
            correction[col] = 1
            obs_mask ^= obs_words[col]
            word &= word - one
    return 0, obs_mask


class _Workspace:
    """Reusable per-graph buffers for the BP kernel and batch decoding."""

    def __init__(self, graph: TannerGraph) -> None:
        edges = graph.chk_var.shape[0]
        self.msg_r = np.empty(edges, dtype=np.float64)
        self.msg_q = np.empty(edges, dtype=np.float64)
        self.soft = np.empty(graph.num_vars, dtype=np.float64)
        self.hard = np.empty(graph.num_vars, dtype=np.uint8)
        self.acc = np.empty(graph.num_checks, dtype=np.uint8)
        self.correction = np.empty(graph.num_vars, dtype=np.uint8)


def _as_syndrome(graph: TannerGraph, syndrome: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(syndrome, dtype=np.uint8)
    if arr.shape != (graph.num_checks,):
        raise ValueError(
            f"syndrome must have length {graph.num_checks}, got {arr.shape}"
        )
    return arr


def _run_bp(graph, syndrome, config, ws):
    return _bp_kernel(
        graph.chk_ptr,
        graph.chk_var,
        graph.var_ptr,
        graph.var_chk,
        graph.vc_edge,
        graph.prior_llr,
        graph.obs_words,
        syndrome,
        config.max_iterations,
        config.min_sum_scale,
        ws.msg_r,
        ws.msg_q,
        ws.soft,
        ws.hard,
        ws.acc,
    )


def _run_osd(graph, soft, syndrome, config, correction):
    supp = np.flatnonzero(syndrome).astype(np.int32)
    if supp.size == 0:
        correction[:] = 0
        return 0
    order = np.argsort(soft, kind="stable").astype(np.int32)
    status, mask = _osd_kernel(
        graph.col_words,
        graph.var_ptr,
        graph.var_chk,
        graph.prior_llr,
        graph.obs_words,
        supp,
        order,
        config.osd_order,
        graph.num_checks,
        correction,
    )
    if status == -1:
        raise MalformedDemError(
            "syndrome lies outside the error-model column space"
        )
    if status != 0:
        raise AssertionError("pivot block lost rank during elimination")
    return int(mask)


def bp_minsum(
    graph: TannerGraph,
    syndrome: np.ndarray,
    config: DecodeConfig = DecodeConfig(),
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Run normalized min-sum BP; returns (soft posteriors, hard, converged)."""
    arr = _as_syndrome(graph, syndrome)
    ws = _Workspace(graph)
    converged, _ = _run_bp(graph, arr, config, ws)
    return ws.soft.copy(), ws.hard.copy(), bool(converged)


def osd_postprocess(
    graph: TannerGraph,
    soft: np.ndarray,
    syndrome: np.ndarray,
    config: DecodeConfig = DecodeConfig(),
) -> np.ndarray:
    """Ordered-statistics solve; always syndrome-consistent when it returns.

    Channels are ranked by ascending signed posterior (most probable error
    first, ties by ascending channel index); the order-1 sweep evaluates each
    single non-pivot flip, scoring by summed prior LLRs, first-found winner
    on ties.
    """
    arr = _as_syndrome(graph, syndrome)
    correction = np.zeros(graph.num_vars, dtype=np.uint8)
    _run_osd(graph, soft, arr, config, correction)
    return correction


def decode(
    graph: TannerGraph,
    syndrome: np.ndarray,
    config: DecodeConfig = DecodeConfig(),
) -> DecodeResult:
    """BP first, OSD on non-convergence; predictions fold the observables."""
    arr = _as_syndrome(graph, syndrome)
    ws = _Workspace(graph)
    converged, _ = _run_bp(graph, arr, config, ws)
    if converged:
        correction = ws.hard.copy()
    else:
        correction = np.zeros(graph.num_vars, dtype=np.uint8)
        _run_osd(graph, ws.soft, arr, config, correction)
    predicted = graph.predicted_observables(correction)
    return DecodeResult(correction, predicted, bool(converged), ws.soft.copy())


def decode_batch(
    graph: TannerGraph,
    det_shots: np.ndarray,
    config: DecodeConfig = DecodeConfig(),
    cache: dict[bytes, tuple[int, bool]] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Decode many shots; returns (predicted observables, converged flags).

    All-zero syndromes short-circuit to the zero correction, which is what
    the full pipeline returns for them as well.  Repeated syndromes are
    memoized; pass ``cache`` to carry the memo across calls, which is only
    sound while graph and config stay the same.
    """
    shots = np.ascontiguousarray(det_shots, dtype=np.uint8)
    if shots.ndim != 2 or shots.shape[1] != graph.num_checks:
        raise ValueError("det_shots must be (shots, num_detectors)")
    ws = _Workspace(graph)
    predicted = np.zeros((shots.shape[0], graph.num_observables), dtype=np.uint8)
    converged = np.ones(shots.shape[0], dtype=bool)
    if cache is None:
        cache = {}
    for s in np.flatnonzero(shots.any(axis=1)):
        row = shots[s]
        key = row.tobytes()
        hit = cache.get(key)
        if hit is None:
            conv, mask64 = _run_bp(graph, row, config, ws)
            if conv:
                mask = int(mask64)
            else:
                mask = _run_osd(graph, ws.soft, row, config, ws.correction)
            hit = (mask, bool(conv))
            if len(cache) < _CACHE_CAP:
                cache[key] = hit
        mask, conv_flag = hit
        converged[s] = conv_flag
        for o in range(graph.num_observables):
            predicted[s, o] = (mask >> o) & 1
    return predicted, converged
