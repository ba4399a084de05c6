"""Heuristic decoders: syndrome bitvector in, syndrome-consistent Pauli out.

All decoders operate on the single error-free syndrome of the residual
data-qubit error (code-capacity decoding), in binary-symplectic form.  An
elementary error is a (qubit, letter) pair with its full check-flip
column, which handles non-CSS codes natively; the matching decoder uses
only the X and Z columns and treats Y as their product.

Every decoder is deterministic and caches corrections by syndrome, so
repeated syndromes across Monte Carlo shots cost one dictionary lookup.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import gf2
from .pauli import PauliString

_LETTERS = ("X", "Y", "Z")


class DecodingError(RuntimeError):
    """The decoder cannot be built for, or applied to, this code."""


@dataclass
class DecodingModel:
    """Shared decoding data: check matrix, logical rows, and error priors."""

    n: int
    r: int
    k: int
    stab_x: np.ndarray       # (r, n) x bits of stabilizers
    stab_z: np.ndarray       # (r, n) z bits
    H: np.ndarray            # (r, 2n) symplectic rows [x | z]
    logical_rows: np.ndarray  # (2k, 2n) logical X ops then logical Z ops
    flip_columns: np.ndarray  # (3n, r): row 3q+i flips of letter XYZ[i] on qubit q
    priors: np.ndarray        # (3n,) probability of each elementary error

    def elementary(self, index: int) -> tuple[int, str]:
        return index // 3, _LETTERS[index % 3]

    def syndrome_of_bits(self, ex: np.ndarray, ez: np.ndarray) -> np.ndarray:
        return ((ex.astype(np.int32) @ self.stab_z.T)
                + (ez.astype(np.int32) @ self.stab_x.T)) % 2


def build_decoding_model(code, noise=None) -> DecodingModel:
    """Derive the check matrix and per-(qubit, Pauli) priors from a code.

    Priors split each qubit's total fault rate (p_2q + p_idle, with any
    per-qubit multipliers) uniformly over X, Y, Z; without a noise model
    they are uniform, which makes all decoders weight-free.
    """
    n, r = code.n, code.r
    stab_x = np.array([s.x for s in code.stabilizers], dtype=np.uint8).reshape(r, n)
    stab_z = np.array([s.z for s in code.stabilizers], dtype=np.uint8).reshape(r, n)
    flips = np.zeros((3 * n, r), dtype=np.uint8)
    for q in range(n):
        flips[3 * q + 0] = stab_z[:, q]                      # X error
        flips[3 * q + 1] = stab_x[:, q] ^ stab_z[:, q]       # Y error
        flips[3 * q + 2] = stab_x[:, q]                      # Z error
    priors = np.empty(3 * n)
    for q in range(n):
        if noise is None:
            rate = 0.01
        else:
            m2, mi = noise.per_qubit_overrides.get(q, (1.0, 1.0))
            rate = noise.p_2q * m2 + noise.p_idle * mi
        rate = min(max(rate, 1e-12), 0.75)
        priors[3 * q: 3 * q + 3] = rate / 3.0
    ops = list(code.logical_xs) + list(code.logical_zs)
    logical_rows = np.array(
        [np.concatenate([p.x, p.z]) for p in ops], dtype=np.uint8
    ).reshape(2 * code.k, 2 * n)
    H = np.hstack([stab_x, stab_z])
    return DecodingModel(n=n, r=r, k=code.k, stab_x=stab_x, stab_z=stab_z, H=H,
                         logical_rows=logical_rows, flip_columns=flips, priors=priors)


def _bits_of(letter: str):
    return (1, 0) if letter == "X" else (1, 1) if letter == "Y" else (0, 1)


class Decoder:
    """Base class: subclasses implement _decode_impl(syndrome) -> (x, z) bits."""

    name = "abstract"

    def __init__(self, model: DecodingModel):
        self.model = model
        self._cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}

    def _decode_impl(self, syndrome: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def decode_bits(self, syndrome: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        syndrome = np.asarray(syndrome, dtype=np.uint8) & 1
        if syndrome.shape != (self.model.r,):
            raise DecodingError(
                f"syndrome length {syndrome.shape} != r={self.model.r}"
            )
        key = syndrome.tobytes()
        hit = self._cache.get(key)
        if hit is None:
            hit = self._decode_impl(syndrome)
            self._cache[key] = hit
        return hit

    def decode(self, syndrome) -> PauliString:
        x, z = self.decode_bits(syndrome)
        return PauliString(x, z)

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        syndromes = np.asarray(syndromes, dtype=np.uint8)
        m = syndromes.shape[0]
        uniq, inverse = np.unique(syndromes, axis=0, return_inverse=True)
        ux = np.empty((uniq.shape[0], self.model.n), dtype=np.uint8)
        uz = np.empty_like(ux)
        for i in range(uniq.shape[0]):
            x, z = self.decode_bits(uniq[i])
            ux[i], uz[i] = x, z
        return ux[inverse].reshape(m, self.model.n), uz[inverse].reshape(m, self.model.n)


# ---------------------------------------------------------------------------
# Maximum-likelihood lookup (minimum-weight coset leaders)
# ---------------------------------------------------------------------------

class MLLookupDecoder(Decoder):
    """Exact minimum-weight decoding via a full syndrome table.

    Breadth-first search over the syndrome graph whose edges are
    single-qubit Paulis: the first path reaching a syndrome has minimum
    weight, and the fixed (qubit, letter) expansion order makes the chosen
    leader deterministic.
    """

    name = "ml"
    MAX_R = 24

    def __init__(self, model: DecodingModel):
        super().__init__(model)
        if model.r > self.MAX_R:
            raise DecodingError(
                f"lookup table needs 2^{model.r} entries; cap is 2^{self.MAX_R}"
            )
        size = 1 << model.r
        n = model.n
        weights = np.asarray(1 << np.arange(model.r), dtype=np.int64)
        col_ints = [int(model.flip_columns[j] @ weights) for j in range(3 * n)]
        self._table_x = np.zeros((size, n), dtype=np.uint8)
        self._table_z = np.zeros((size, n), dtype=np.uint8)
        seen = np.zeros(size, dtype=bool)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for s in frontier:
                for j, col in enumerate(col_ints):
                    s2 = s ^ col
                    if not seen[s2]:
                        seen[s2] = True
                        q, letter = self.model.elementary(j)
                        xb, zb = _bits_of(letter)
                        self._table_x[s2] = self._table_x[s]
                        self._table_z[s2] = self._table_z[s]
                        self._table_x[s2, q] ^= xb
                        self._table_z[s2, q] ^= zb
                        nxt.append(s2)
            frontier = nxt
        if not seen.all():
            raise DecodingError("syndrome space not fully reachable; rank defect")
        self._weights = weights

    def _decode_impl(self, syndrome):
        idx = int(syndrome.astype(np.int64) @ self._weights)
        return self._table_x[idx].copy(), self._table_z[idx].copy()

    def decode_batch(self, syndromes):
        idx = syndromes.astype(np.int64) @ self._weights
        return self._table_x[idx], self._table_z[idx]

    def leader_weight(self, syndrome) -> int:
        x, z = self.decode_bits(syndrome)
        return int(np.count_nonzero(x | z))


# ---------------------------------------------------------------------------
# Union-find (cluster growth on the check-error hypergraph)
# ---------------------------------------------------------------------------

class UnionFindDecoder(Decoder):
    """Cluster growth over the check-error incidence graph.

    Clusters seed at violated checks and grow by uniform half-edge steps,
    smallest cluster first.  A cluster is valid once some error supported
    entirely inside it (all of its flipped checks interior) reproduces the
    cluster's syndrome restriction; the fixed GF(2) interior solution is
    emitted.  Growth is bounded by the full graph, where rank(H) = r
    guarantees a solution, so the decoder always terminates.
    """

    name = "uf"

    def __init__(self, model: DecodingModel):
        super().__init__(model)
        n, r = model.n, model.r
        self._var_checks = [np.flatnonzero(model.flip_columns[j]).tolist()
                            for j in range(3 * n)]
        # Node ids: checks are 0..r-1, variable j is r + j.
        edges = []
        adjacency: list[list[int]] = [[] for _ in range(r + 3 * n)]
        for j, checks in enumerate(self._var_checks):
            for c in checks:
                eid = len(edges)
                edges.append((c, r + j))
                adjacency[c].append(eid)
                adjacency[r + j].append(eid)
        self._edges = edges
        self._adjacency = adjacency

    def _decode_impl(self, syndrome):
        model = self.model
        n, r = model.n, model.r
        defects = np.flatnonzero(syndrome).tolist()
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        if not defects:
            return x, z

        parent = list(range(r + 3 * n))

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        members: dict[int, set[int]] = {d: {d} for d in defects}
        growth = [0] * len(self._edges)
        solutions: dict[int, np.ndarray | None] = {}

        def try_solve(root) -> np.ndarray | None:
            nodes = members[root]
            checks = sorted(u for u in nodes if u < r)
            variables = sorted(
                u - r for u in nodes
                if u >= r and all(c in nodes for c in self._var_checks[u - r])
            )
            if not checks:
                return None
            sub = model.flip_columns[variables][:, checks].T if variables else \
                np.zeros((len(checks), 0), dtype=np.uint8)
            rhs = syndrome[checks]
            sol = gf2.solve(sub, rhs)
            if sol is None:
                return None
            chosen = np.zeros(3 * n, dtype=np.uint8)
            chosen[variables] = sol
            return chosen

        for d in defects:
            solutions[d] = try_solve(d)

        while any(sol is None for sol in solutions.values()):
            root = min((root for root, sol in solutions.items() if sol is None),
                       key=lambda rt: (len(members[rt]), min(members[rt])))
            boundary = sorted({
                eid
                for u in members[root]
                for eid in self._adjacency[u]
                if (find(self._edges[eid][0]) == root) != (find(self._edges[eid][1]) == root)
                or growth[eid] < 2
            })
            # Grow only half-edges that still leave the cluster.
            grew = False
            for eid in boundary:
                u, v = self._edges[eid]
                inside_u = find(u) == root
                inside_v = find(v) == root
                if inside_u and inside_v:
                    continue
                grew = True
                growth[eid] += 1
                if growth[eid] < 2:
                    continue
                outside = v if inside_u else u
                other_root = find(outside)
                if other_root == root:
                    continue
                if other_root in members:
                    merged = members.pop(other_root)
                    solutions.pop(other_root, None)
                    members[root] |= merged
                else:
                    members[root].add(outside)
                parent[other_root] = root
            if grew:
                solutions[root] = try_solve(root)

        chosen = np.zeros(3 * n, dtype=np.uint8)
        for sol in solutions.values():
            chosen ^= sol
        for j in np.flatnonzero(chosen):
            q, letter = model.elementary(int(j))
            xb, zb = _bits_of(letter)
            x[q] ^= xb
            z[q] ^= zb
        return x, z


# ---------------------------------------------------------------------------
# Minimum-weight perfect matching on the decoding graph
# ---------------------------------------------------------------------------

class MatchingDecoder(Decoder):
    """Defect matching for codes whose X/Z elementary errors flip at most
    two checks.

    Edges carry -log(prior) weights; defects pair up along all-pairs
    shortest paths, with a virtual boundary absorbing odd defects where a
    weight-1 column exists.  Matching is exact (subset dynamic program) up
    to 14 defects per connected component, greedy above.
    """

    name = "mwpm"
    EXACT_LIMIT = 14

    def __init__(self, model: DecodingModel):
        super().__init__(model)
        n, r = model.n, model.r
        self._boundary = r  # virtual node id
        uniform = np.allclose(model.priors, model.priors[0])
        adjacency: dict[int, list[tuple[int, float, int]]] = {u: [] for u in range(r + 1)}
        self._edge_paulis: list[tuple[int, str]] = []
        for q in range(n):
            for letter in ("X", "Z"):
                j = 3 * q + (0 if letter == "X" else 2)
                checks = np.flatnonzero(model.flip_columns[j])
                if checks.size > 2:
                    raise DecodingError(
                        f"{letter} on qubit {q} flips {checks.size} checks; "
                        "matching needs a decoding graph with <= 2 flips per error"
                    )
                if checks.size == 0:
                    continue
                weight = 1.0 if uniform else -math.log(model.priors[j])
                pid = len(self._edge_paulis)
                self._edge_paulis.append((q, letter))
                if checks.size == 2:
                    u, v = int(checks[0]), int(checks[1])
                else:
                    u, v = int(checks[0]), self._boundary
                adjacency[u].append((v, weight, pid))
                adjacency[v].append((u, weight, pid))
        self._adjacency = adjacency
        self._dist, self._via = self._all_pairs()

    def _all_pairs(self):
        nodes = range(self.model.r + 1)
        dist = {}
        via = {}
        for src in nodes:
            d = {u: math.inf for u in nodes}
            prev: dict[int, tuple[int, int]] = {}
            d[src] = 0.0
            heap = [(0.0, src)]
            while heap:
                du, u = heapq.heappop(heap)
                if du > d[u]:
                    continue
                for v, w, pid in sorted(self._adjacency[u]):
                    alt = du + w
                    if alt < d[v] - 1e-12:
                        d[v] = alt
                        prev[v] = (u, pid)
                        heapq.heappush(heap, (alt, v))
            dist[src] = d
            via[src] = prev
        return dist, via

    def _path_paulis(self, src, dst):
        out = []
        u = dst
        while u != src:
            u, pid = self._via[src][u]
            out.append(pid)
        return out

    def _decode_impl(self, syndrome):
        model = self.model
        defects = np.flatnonzero(syndrome).tolist()
        x = np.zeros(model.n, dtype=np.uint8)
        z = np.zeros(model.n, dtype=np.uint8)
        if not defects:
            return x, z

        # Split defects into connected components of the decoding graph.
        comp_of = {}
        for d in defects:
            if d in comp_of:
                continue
            stack, seen = [d], {d}
            while stack:
                u = stack.pop()
                comp_of[u] = d
                for v, _, _ in self._adjacency[u]:
                    if v != self._boundary and v not in seen:
                        seen.add(v)
                        stack.append(v)
        groups: dict[int, list[int]] = {}
        for d in defects:
            groups.setdefault(comp_of[d], []).append(d)

        pairs: list[tuple[int, int]] = []
        for group in groups.values():
            group.sort()
            has_boundary = all(
                self._dist[d][self._boundary] < math.inf for d in group
            )
            if len(group) % 2 and not has_boundary:
                raise DecodingError(
                    f"odd defect set {group} with no boundary in its component"
                )
            if len(group) <= self.EXACT_LIMIT:
                pairs.extend(self._match_exact(group, has_boundary))
            else:
                pairs.extend(self._match_greedy(group, has_boundary))

        for u, v in pairs:
            for pid in self._path_paulis(u, v):
                q, letter = self._edge_paulis[pid]
                xb, zb = _bits_of(letter)
                x[q] ^= xb
                z[q] ^= zb
        return x, z

    def _match_exact(self, group, has_boundary):
        B = self._boundary
        m = len(group)
        memo: dict[int, tuple[float, tuple]] = {0: (0.0, ())}

        def best(mask) -> tuple[float, tuple]:
            hit = memo.get(mask)
            if hit is not None:
                return hit
            i = (mask & -mask).bit_length() - 1
            rest = mask & ~(1 << i)
            options = []
            if has_boundary:
                cost, pairing = best(rest)
                options.append((cost + self._dist[group[i]][B],
                                pairing + ((group[i], B),)))
            sub = rest
            while sub:
                j = (sub & -sub).bit_length() - 1
                sub &= sub - 1
                d = self._dist[group[i]][group[j]]
                if d < math.inf:
                    cost, pairing = best(rest & ~(1 << j))
                    options.append((cost + d, pairing + ((group[i], group[j]),)))
            if not options:
                raise DecodingError(f"defects {group} cannot be matched")
            result = min(options, key=lambda o: (o[0], o[1]))
            memo[mask] = result
            return result

        _, pairing = best((1 << m) - 1)
        return list(pairing)

    def _match_greedy(self, group, has_boundary):
        B = self._boundary
        remaining = list(group)
        pairs = []
        while remaining:
            options = []
            for ii in range(len(remaining)):
                if has_boundary:
                    options.append((self._dist[remaining[ii]][B], remaining[ii], B))
                for jj in range(ii + 1, len(remaining)):
                    d = self._dist[remaining[ii]][remaining[jj]]
                    if d < math.inf:
                        options.append((d, remaining[ii], remaining[jj]))
            cost, u, v = min(options)
            pairs.append((u, v))
            remaining.remove(u)
            if v != B:
                remaining.remove(v)
        return pairs


# ---------------------------------------------------------------------------
# Min-sum belief propagation with order-0 ordered statistics fallback
# ---------------------------------------------------------------------------

class BpOsdDecoder(Decoder):
    """Min-sum BP on the binary symplectic Tanner graph, then OSD-0.

    Variables are the 2n bits [x | z] of the correction; the parity matrix
    is [Sz | Sx] so that H_eff @ e = syndrome.  The X and Z components are
    treated as independent binary variables (the standard decomposition;
    Y correlations only enter through the priors).  If BP's hard decision
    is inconsistent, columns are ranked by posterior reliability and a
    GF(2) elimination over the most-likely-error columns yields a
    consistent solution, so decoding never fails.
    """

    name = "bposd"

    def __init__(self, model: DecodingModel, iters: int = 30):
        super().__init__(model)
        self.iters = iters
        n = model.n
        self._H = np.hstack([model.stab_z, model.stab_x]).astype(np.uint8)
        p_x = model.priors[0::3] + model.priors[1::3]
        p_z = model.priors[2::3] + model.priors[1::3]
        p = np.concatenate([p_x, p_z])
        p = np.clip(p, 1e-12, 0.4999)
        self._llr0 = np.log((1.0 - p) / p)
        self._mask = self._H.astype(bool)

    def _decode_impl(self, syndrome):
        H, mask = self._H, self._mask
        r, m = H.shape
        llr0 = self._llr0
        sign_s = 1.0 - 2.0 * syndrome.astype(np.float64)  # +1 / -1 per check

        msg_cv = np.zeros((r, m))
        hard = np.zeros(m, dtype=np.uint8)
        posterior = llr0.copy()
        for _ in range(self.iters):
            total = llr0 + msg_cv.sum(axis=0)
            v2c = np.where(mask, total[None, :] - msg_cv, 0.0)
            mag = np.where(mask, np.abs(v2c), np.inf)
            order = np.argsort(mag, axis=1)
            min1 = mag[np.arange(r), order[:, 0]]
            min2 = mag[np.arange(r), order[:, 1]] if m > 1 else min1
            signs = np.where(mask, np.sign(v2c), 1.0)
            signs[signs == 0.0] = 1.0
            sign_prod = signs.prod(axis=1) * sign_s
            use = np.where(
                np.arange(m)[None, :] == order[:, 0][:, None], min2[:, None], min1[:, None]
            )
            msg_cv = np.where(mask, sign_prod[:, None] / signs * use, 0.0)
            posterior = llr0 + msg_cv.sum(axis=0)
            hard = (posterior < 0).astype(np.uint8)
            if np.array_equal((H @ hard.astype(np.int64)) % 2, syndrome.astype(np.int64)):
                return hard[: self.model.n].copy(), hard[self.model.n:].copy()
        # OSD-0 on the most-likely-error ordering.
        order = np.argsort(posterior, kind="stable")
        sol_perm = gf2.solve(H[:, order], syndrome)
        if sol_perm is None:
            raise DecodingError("check matrix rank defect; OSD cannot solve")
        e = np.zeros(m, dtype=np.uint8)
        e[order] = sol_perm
        return e[: self.model.n].copy(), e[self.model.n:].copy()


DECODER_REGISTRY = {
    "ml": MLLookupDecoder,
    "uf": UnionFindDecoder,
    "mwpm": MatchingDecoder,
    "bposd": BpOsdDecoder,
}


def make_decoder(name: str, model: DecodingModel) -> Decoder:
    try:
        cls = DECODER_REGISTRY[name]
    except KeyError:
        raise DecodingError(
            f"unknown decoder {name!r}; available: {', '.join(sorted(DECODER_REGISTRY))}"
        ) from None
    return cls(model)


def ml_lookup_decoder(model: DecodingModel) -> MLLookupDecoder:
    return MLLookupDecoder(model)


def union_find_decoder(model: DecodingModel) -> UnionFindDecoder:
    return UnionFindDecoder(model)


def matching_decoder(model: DecodingModel) -> MatchingDecoder:
    return MatchingDecoder(model)


def bp_osd0_decoder(model: DecodingModel, iters: int = 30) -> BpOsdDecoder:
    return BpOsdDecoder(model, iters=iters)
