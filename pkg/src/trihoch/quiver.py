"""Quivers, level structures, path algebras, incidence algebras of
simplicial complexes, and a simplicial-cochain oracle.

An acyclic quiver gets a level assignment by longest path; grouping the
vertices by level and the paths by (source level, target level) presents its
path algebra as a triangular algebra.  A simplicial complex gives one too,
via comparable pairs of faces graded by dimension, and its simplicial
cohomology is computed independently as a cross-check.
"""

from __future__ import annotations

import itertools

from .algebra import Bimodule, BimoduleMap, FiniteDimAlgebra, TriangularAlgebra
from .errors import InputError
from .exactla import Matrix, matrix_rank


class Quiver:
    __slots__ = ("vertices", "arrows", "_vpos", "_out")

    def __init__(self, vertices, arrows):
        self.vertices = list(vertices)
        self.arrows = list(arrows)
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex labels")
        labels = [a[0] for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise InputError("duplicate arrow labels")
        self._vpos = {v: k for k, v in enumerate(self.vertices)}
        for (lab, s, t) in self.arrows:
            if s not in self._vpos or t not in self._vpos:
                raise InputError(f"arrow {lab}: endpoint not a vertex")
        self._out = {v: [] for v in self.vertices}
        for a in self.arrows:
            self._out[a[1]].append(a)

    def out_arrows(self, v):
        return self._out[v]

    def __repr__(self):
        return f"Quiver({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


class LevelAssignment:
    __slots__ = ("level", "n")

    def __init__(self, level, n):
        self.level = dict(level)
        self.n = n

    def __repr__(self):
        return f"LevelAssignment(n={self.n})"


def check_acyclic(q):
    """True iff the quiver has no directed cycle (self-loops included)."""
    state = {v: 0 for v in q.vertices}  # 0 new, 1 on stack, 2 done
    for start in q.vertices:
        if state[start]:
            continue
        stack = [(start, iter(q.out_arrows(start)))]
        state[start] = 1
        while stack:
            v, it = stack[-1]
            adv = next(it, None)
            if adv is None:
                state[v] = 2
                stack.pop()
                continue
            w = adv[2]
            if state[w] == 1:
                return False
            if state[w] == 0:
                state[w] = 1
                stack.append((w, iter(q.out_arrows(w))))
    return True


def compute_levels(q):
    """Level of each vertex = 1 + length of the longest path ending there."""
    if not check_acyclic(q):
        raise InputError("quiver has a directed cycle; no level structure exists")
    indeg = {v: 0 for v in q.vertices}
    for (_, s, t) in q.arrows:
        indeg[t] += 1
    order = [v for v in q.vertices if indeg[v] == 0]
    longest = {v: 0 for v in q.vertices}
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for (_, _, w) in q.out_arrows(v):
            if longest[w] < longest[v] + 1:
                longest[w] = longest[v] + 1
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
    level = {v: longest[v] + 1 for v in q.vertices}
    n = max(level.values()) if level else 1
    return LevelAssignment(level, n)


def enumerate_paths(q):
    """All directed paths, grouped into a dict keyed by
    (source level, target level); length-0 paths at vertices included.

    A path is (source vertex, tuple of arrow labels in traversal order).
    Finite because the quiver must be acyclic.
    """
    levels = compute_levels(q)
    groups = {}

    def record(src, labs, tgt):
        key = (levels.level[src], levels.level[tgt])
        groups.setdefault(key, []).append((src, tuple(labs)))

    for v in q.vertices:
        record(v, (), v)
        # depth-first extension, arrows in declaration order
        stack = [(v, [])]
        while stack:
            cur, labs = stack.pop()
            for (lab, _, w) in reversed(q.out_arrows(cur)):
                record(v, labs + [lab], w)
                stack.append((w, labs + [lab]))
    # deterministic order inside each group: by length, then label sequence
    pos = {a[0]: k for k, a in enumerate(q.arrows)}
    vpos = q._vpos
    for key in groups:
        groups[key].sort(key=lambda p: (len(p[1]), vpos[p[0]],
                                        [pos[l] for l in p[1]]))
    return groups


def path_algebra(q, levels, field=None):
    """The path algebra of an acyclic level quiver, in triangular form.

    Level-r vertices span the r-th diagonal algebra (a product of copies of
    k, one idempotent per vertex); paths from level r to level s span the
    (s, r) block; composition maps concatenate paths and vanish when the
    endpoints do not match.  The field defaults to the rationals.
    """
    from .exactla import QQ
    field = field or QQ
    if not check_acyclic(q):
        raise InputError("path algebra of a cyclic quiver is infinite-dimensional")
    for (lab, s, t) in q.arrows:
        if levels.level[s] >= levels.level[t]:
            raise InputError(
                f"invalid levels: arrow {lab} does not increase the level")
    n = levels.n
    f = field
    groups = enumerate_paths(q)
    by_level = {r: [v for v in q.vertices if levels.level[v] == r]
                for r in range(1, n + 1)}
    diag = []
    for r in range(1, n + 1):
        a = FiniteDimAlgebra.product_of_fields(f, len(by_level[r]),
                                               label=f"A{r}")
        diag.append(a)
    vslot = {}
    for r in range(1, n + 1):
        for k, v in enumerate(by_level[r]):
            vslot[v] = k

    arrow_by_label = {a[0]: a for a in q.arrows}

    def tgt_of(path):
        src, labs = path
        cur = src
        for lab in labs:
            cur = arrow_by_label[lab][2]
        return cur

    mods = {}
    path_index = {}
    for (r, s), paths in groups.items():
        if s <= r:
            continue
        j, i = s, r
        idx = {p: k for k, p in enumerate(paths)}
        path_index[(j, i)] = idx
        lact = {}
        ract = {}
        for p, k in idx.items():
            tv = tgt_of(p)
            lact[(vslot[tv], k)] = {k: f.one}
            ract[(k, vslot[p[0]])] = {k: f.one}
        mods[(j, i)] = Bimodule(f, len(paths), diag[j - 1], diag[i - 1],
                                lact, ract, label=f"M[{j},{i}]")
    mus = {}
    for l in range(3, n + 1):
        for j in range(2, l):
            for i in range(1, j):
                outer = mods.get((l, j))
                inner = mods.get((j, i))
                target = mods.get((l, i))
                if not (outer and inner and target):
                    continue
                idx_o = {k: p for p, k in path_index[(l, j)].items()}
                idx_i = {k: p for p, k in path_index[(j, i)].items()}
                idx_t = path_index[(l, i)]
                pair = {}
                for y in range(outer.dim):
                    py = idx_o[y]
                    for x in range(inner.dim):
                        px = idx_i[x]
                        if tgt_of(px) != py[0]:
                            continue
                        comp = (px[0], px[1] + py[1])
                        pair[(y, x)] = {idx_t[comp]: f.one}
                mus[(l, j, i)] = BimoduleMap(outer, inner, target, pair)
    return TriangularAlgebra(f, n, diag, mods, mus)


class SimplicialComplex:
    """Finite abstract simplicial complex, generated from its facets.

    Faces are stored as sorted tuples of vertex labels; all nonempty
    subsets of the facets are faces.
    """

    __slots__ = ("facets", "faces_by_dim", "dimension", "vertices")

    def __init__(self, facets):
        norm = []
        for fac in facets:
            fs = tuple(sorted(set(fac)))
            if not fs:
                raise InputError("empty facet")
            norm.append(fs)
        if not norm:
            raise InputError("empty complex")
        self.facets = norm
        faces = set()
        for fac in norm:
            for r in range(1, len(fac) + 1):
                faces.update(itertools.combinations(fac, r))
        self.dimension = max(len(fc) for fc in faces) - 1
        self.faces_by_dim = {
            d: sorted(fc for fc in faces if len(fc) == d + 1)
            for d in range(self.dimension + 1)}
        self.vertices = [fc[0] for fc in self.faces_by_dim[0]]

    def faces(self, d):
        return self.faces_by_dim.get(d, [])

    def __repr__(self):
        counts = [len(self.faces(d)) for d in range(self.dimension + 1)]
        return f"SimplicialComplex(face counts {counts})"


def incidence_algebra(s, field=None):
    """Incidence algebra of the face poset, graded by simplex dimension.

    Level r holds the (r-1)-simplices; the (s, r) block has one basis
    vector per comparable pair (big face, small face); composition glues
    comparable pairs and is zero otherwise.
    """
    from .exactla import QQ
    f = field or QQ
    n = s.dimension + 1
    diag = [FiniteDimAlgebra.product_of_fields(f, len(s.faces(r - 1)),
                                               label=f"A{r}")
            for r in range(1, n + 1)]
    face_slot = {}
    for d in range(n):
        for k, fc in enumerate(s.faces(d)):
            face_slot[fc] = k

    mods = {}
    pair_index = {}
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            pairs = []
            for big in s.faces(j - 1):
                bigset = set(big)
                for small in itertools.combinations(big, i):
                    pairs.append((big, small))
            pairs.sort()
            idx = {p: k for k, p in enumerate(pairs)}
            pair_index[(j, i)] = idx
            lact = {}
            ract = {}
            for (big, small), k in idx.items():
                lact[(face_slot[big], k)] = {k: f.one}
                ract[(k, face_slot[small])] = {k: f.one}
            mods[(j, i)] = Bimodule(f, len(pairs), diag[j - 1], diag[i - 1],
                                    lact, ract, label=f"M[{j},{i}]")
    mus = {}
    for l in range(3, n + 1):
        for j in range(2, l):
            for i in range(1, j):
                outer = mods[(l, j)]
                inner = mods[(j, i)]
                target = mods[(l, i)]
                idx_o = {k: p for p, k in pair_index[(l, j)].items()}
                idx_i = {k: p for p, k in pair_index[(j, i)].items()}
                idx_t = pair_index[(l, i)]
                pair = {}
                for y in range(outer.dim):
                    big, mid = idx_o[y]
                    for x in range(inner.dim):
                        mid2, small = idx_i[x]
                        if mid2 != mid:
                            continue
                        pair[(y, x)] = {idx_t[(big, small)]: f.one}
                mus[(l, j, i)] = BimoduleMap(outer, inner, target, pair)
    return TriangularAlgebra(f, n, diag, mods, mus)


def simplicial_cohomology(s, max_degree):
    """Dimensions of the simplicial cohomology of the complex in degrees
    0..max_degree, from the ordered-simplex cochain complex over the
    rationals (the same dimensions hold over any field of characteristic
    not dividing the torsion; the comparisons here involve none)."""
    from .exactla import QQ
    f = QQ
    ranks = []
    dims = [len(s.faces(d)) for d in range(max_degree + 2)]
    for d in range(max_degree + 1):
        lower = s.faces(d)
        upper = s.faces(d + 1)
        if not lower or not upper:
            ranks.append(0)
            continue
        col = {fc: k for k, fc in enumerate(lower)}
        entries = []
        for r, big in enumerate(upper):
            for drop in range(len(big)):
                small = big[:drop] + big[drop + 1:]
                sign = f.one if drop % 2 == 0 else f.neg(f.one)
                entries.append((r, col[small], sign))
        m = Matrix.from_entries(f, len(upper), len(lower), entries)
        ranks.append(matrix_rank(m))
    out = []
    for d in range(max_degree + 1):
        below = ranks[d - 1] if d >= 1 else 0
        out.append(dims[d] - ranks[d] - below)
    return out
