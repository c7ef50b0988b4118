"""Cochain-complex builders: the trajectory-indexed relative complex, the
full bar-complex oracle, the reduced two-sided complex computing Ext over a
pair of algebras, and the chain complex computing Tor over a middle algebra.

All builders produce explicit sparse matrices over an exact field; the
relative complex also records the jump-count filtration tag of every basis
vector, which downstream spectral machinery consumes.
"""

from __future__ import annotations

import itertools

from .algebra import TBimodule
from .errors import BudgetExceeded, InputError, InternalInvariantError
from .exactla import Matrix, graded_rank, matrix_rank
from .trajectory import (Jump, Stay, Trajectory, TrajectoryBasis,
                         enumerate_trajectories)

DEFAULT_ORACLE_BUDGET = 10 ** 7


class Cell:
    """One direct summand of a cochain degree: a word shape with a
    coefficient block.  dim = (domain tensor dim) * (coefficient dim)."""

    __slots__ = ("key", "offset", "mdim", "xdim", "dim", "tag")

    def __init__(self, key, offset, mdim, xdim, tag):
        self.key = key
        self.offset = offset
        self.mdim = mdim
        self.xdim = xdim
        self.dim = mdim * xdim
        self.tag = tag

    def __repr__(self):
        return f"Cell({self.key!r}, offset {self.offset}, dim {self.dim}, tag {self.tag})"


class CochainWindow:
    """Degrees 0..L+1 with differentials delta_l for l <= L.

    cells[l] lists the summands of degree l in basis order; tags[l] gives
    the filtration tag of each basis vector (None when unfiltered);
    kappa[l] optionally grades the basis for split rank computations.
    """

    __slots__ = ("field", "L", "cells", "dims", "diffs", "tags", "kappa")

    def __init__(self, field, L, cells, dims, diffs, tags=None, kappa=None):
        self.field = field
        self.L = L
        self.cells = cells
        self.dims = dims
        self.diffs = diffs
        self.tags = tags
        self.kappa = kappa

    def dim(self, l):
        return self.dims[l] if 0 <= l < len(self.dims) else 0

    def delta(self, l):
        if l < 0 or l > self.L:
            raise InputError(f"differential {l} is outside the built window")
        return self.diffs[l]

    def tag_vector(self, l):
        return self.tags[l] if self.tags is not None else None

    def rank_of_delta(self, l):
        if l < 0:
            return 0
        m = self.diffs[l]
        if self.kappa is not None and self.kappa[l + 1] is not None:
            return graded_rank(m, self.kappa[l + 1])
        return matrix_rank(m)

    def __repr__(self):
        return f"CochainWindow(L={self.L}, dims {self.dims})"


def cohomology_dims(w):
    """Cohomology dimensions in degrees 0..L, the window's reliable range
    (each degree needs both neighboring differentials, and degree L is the
    last with its outgoing differential built).

    dim H^l = dim C^l - rank delta_l - rank delta_{l-1}.
    """
    out = []
    ranks = [w.rank_of_delta(l) for l in range(w.L + 1)]
    for l in range(w.L + 1):
        below = ranks[l - 1] if l >= 1 else 0
        out.append(w.dims[l] - ranks[l] - below)
    return out


# ---------------------------------------------------------------------------
# relative complex over the diagonal subalgebra


def _merge_move(t, later, earlier):
    """Contraction data for the adjacent component pair (later, earlier):
    the merged move and a pair-product function (b_later, b_earlier) ->
    sparse vector over the merged block's basis."""
    if not later.is_jump and not earlier.is_jump:
        alg = t.diag[later.vertex - 1]
        return Stay(later.vertex), alg.basis_product
    if not later.is_jump:
        m = t.module(earlier.target, earlier.source)
        fn = m.left_basis_act if m else (lambda a, b: {})
        return Jump(earlier.source, earlier.target), fn
    if not earlier.is_jump:
        m = t.module(later.target, later.source)
        fn = m.right_basis_act if m else (lambda a, b: {})
        return Jump(later.source, later.target), fn
    mu = t.mu(later.target, later.source, earlier.source)
    fn = mu.pair_apply if mu else (lambda a, b: {})
    return Jump(earlier.source, later.target), fn


def build_relative_complex(t, x=None, L=4):
    """The cochain complex of the triangular algebra relative to its
    diagonal, through degree L+1, with coefficients in a block-adapted
    bimodule (default: the algebra itself).

    Degree 0 is the sum of the diagonal coefficient blocks; degree l >= 1
    splits over degree-l trajectories tau into Hom(M_tau, X-block from
    source to target).  Every basis vector is tagged by the jump count of
    its trajectory, and the differential can only keep or raise the tag.
    """
    if x is None:
        x = TBimodule.regular(t)
    f = t.field
    n = t.n

    cells = []
    dims = []
    tags = []
    cell_pairs = []    # per degree: ordered list of (Cell, TrajectoryBasis)
    cell_lookup = []   # per degree: trajectory -> (Cell, TrajectoryBasis)
    for l in range(L + 2):
        degree_cells = []
        lookup = {}
        offset = 0
        for tau in enumerate_trajectories(n, l):
            basis = TrajectoryBasis.over(t, tau)
            xdim = x.block_dim(tau.target, tau.source)
            cell = Cell((tau, (tau.target, tau.source)), offset,
                        basis.dim, xdim, tau.length)
            if cell.dim == 0:
                continue
            degree_cells.append((cell, basis))
            lookup[tau] = (cell, basis)
            offset += cell.dim
        cells.append([c for (c, _) in degree_cells])
        cell_pairs.append(degree_cells)
        cell_lookup.append(lookup)
        dims.append(offset)
        tagv = []
        for c in cells[-1]:
            tagv.extend([c.tag] * c.dim)
        tags.append(tagv)

    diffs = []
    for l in range(L + 1):
        entries = []
        for cell, basis in cell_pairs[l + 1]:
            _relative_rows(t, x, l, cell, basis, cell_lookup[l], entries)
        diffs.append(Matrix.from_entries(f, dims[l + 1], dims[l], entries))
    return CochainWindow(f, L, cells, dims, diffs, tags=tags)


def _relative_rows(t, x, l, cell, basis, col_lookup, entries):
    """All matrix entries whose row lies in the given degree-(l+1) cell."""
    f = t.field
    tau, (J, I) = cell.key
    comps = tau.components
    xdim_row = cell.xdim

    # term 0: left action by the slot-0 letter on the dropped-first column
    rest = Trajectory(comps[1:], tau.source)
    rc = col_lookup.get(rest)
    if rc is not None:
        col_cell, col_basis = rc
        mid = comps[0].source
        act = x.left_block_action(J, mid, I)
        for b in basis.tuples():
            row_base = cell.offset + basis.flat_index(b) * xdim_row
            col_base = col_cell.offset + col_basis.flat_index(b[1:]) * col_cell.xdim
            for xi in range(col_cell.xdim):
                vec = act.get((b[0], xi))
                if not vec:
                    continue
                for xip, c in vec.items():
                    entries.append((row_base + xip, col_base + xi, c))

    # terms i = 1..l: contract adjacent slots i-1, i with sign (-1)^i
    for i in range(1, l + 1):
        s = i - 1
        merged, pairfn = _merge_move(t, comps[s], comps[s + 1])
        contracted = Trajectory(comps[:s] + (merged,) + comps[s + 2:],
                                tau.source)
        rc = col_lookup.get(contracted)
        if rc is None:
            continue
        col_cell, col_basis = rc
        sign = f.one if i % 2 == 0 else f.neg(f.one)
        for b in basis.tuples():
            prod = pairfn(b[s], b[s + 1])
            if not prod:
                continue
            row_base = cell.offset + basis.flat_index(b) * xdim_row
            pre = b[:s]
            post = b[s + 2:]
            for m_new, c in prod.items():
                col_flat = col_basis.flat_index(pre + (m_new,) + post)
                col_base = col_cell.offset + col_flat * col_cell.xdim
                cc = f.mul(sign, c)
                for xi in range(col_cell.xdim):
                    entries.append((row_base + xi, col_base + xi, cc))

    # term l+1: right action by the last letter, sign (-1)^(l+1)
    last = Trajectory(comps[:-1], comps[-1].target)
    rc = col_lookup.get(last)
    if rc is not None:
        col_cell, col_basis = rc
        mid = comps[-1].target
        act = x.right_block_action(J, mid, I)
        sign = f.one if (l + 1) % 2 == 0 else f.neg(f.one)
        for b in basis.tuples():
            row_base = cell.offset + basis.flat_index(b) * xdim_row
            col_base = (col_cell.offset
                        + col_basis.flat_index(b[:-1]) * col_cell.xdim)
            for xi in range(col_cell.xdim):
                vec = act.get((xi, b[-1]))
                if not vec:
                    continue
                for xip, c in vec.items():
                    entries.append((row_base + xip, col_base + xi,
                                    f.mul(sign, c)))


# ---------------------------------------------------------------------------
# bar-complex oracle


def bar_budget_estimate(total_dim, xdim, L):
    """A-priori size estimate for a bar-complex build: one unit per cobord
    term over all basis vectors of degrees 1..L+1 (each term writes about
    one batch of matrix entries)."""
    return sum((l + 2) * xdim * total_dim ** (l + 1) for l in range(L + 1))


def build_bar_complex(t_total, x, L, budget=DEFAULT_ORACLE_BUDGET,
                      grading=None):
    """The classical cochain complex Hom(T^{(x) l}, X) through degree L+1,
    as an unfiltered window; the independent oracle the relative complex is
    validated against.

    ``grading`` optionally gives (per-T-basis, per-X-basis) integer weights
    that every product and action preserves; when present, each basis
    vector gets the key  sum of word weights - coefficient weight, entries
    are checked to respect it, and ranks later split along it.

    Refuses builds whose estimated entry count exceeds the budget.
    """
    f = t_total.field
    d = t_total.dim
    dx = x.dim
    required = bar_budget_estimate(d, dx, L)
    if required > budget:
        raise BudgetExceeded(required, budget)

    tweight = xweight = None
    if grading is not None:
        tweight, xweight = grading

    dims = [dx * d ** l for l in range(L + 2)]
    kappa = None
    if grading is not None:
        kappa = []
        for l in range(L + 2):
            keys = []
            for word in itertools.product(range(d), repeat=l):
                wsum = sum(tweight[u] for u in word)
                for xi in range(dx):
                    keys.append(wsum - xweight[xi])
            kappa.append(keys)

    lact = x.lact
    ract = x.ract
    mul = t_total.mul
    diffs = []
    for l in range(L + 1):
        entries = []
        for word in itertools.product(range(d), repeat=l + 1):
            wflat = 0
            for u in word:
                wflat = wflat * d + u
            row_base = wflat * dx

            # left action
            sub = word[1:]
            cflat = 0
            for u in sub:
                cflat = cflat * d + u
            col_base = cflat * dx
            for xi in range(dx):
                vec = lact.get((word[0], xi))
                if vec:
                    for xip, c in vec.items():
                        entries.append((row_base + xip, col_base + xi, c))

            # contractions
            for i in range(1, l + 1):
                s = i - 1
                prod = mul.get((word[s], word[s + 1]))
                if not prod:
                    continue
                sign = f.one if i % 2 == 0 else f.neg(f.one)
                pre = word[:s]
                post = word[s + 2:]
                for m_new, c in prod.items():
                    cflat = 0
                    for u in pre + (m_new,) + post:
                        cflat = cflat * d + u
                    col_base = cflat * dx
                    cc = f.mul(sign, c)
                    for xi in range(dx):
                        entries.append((row_base + xi, col_base + xi, cc))

            # right action
            sub = word[:-1]
            cflat = 0
            for u in sub:
                cflat = cflat * d + u
            col_base = cflat * dx
            sign = f.one if (l + 1) % 2 == 0 else f.neg(f.one)
            for xi in range(dx):
                vec = ract.get((xi, word[-1]))
                if vec:
                    for xip, c in vec.items():
                        entries.append((row_base + xip, col_base + xi,
                                        f.mul(sign, c)))
        m = Matrix.from_entries(f, dims[l + 1], dims[l], entries)
        if kappa is not None:
            _check_grading(m, kappa[l + 1], kappa[l])
        diffs.append(m)
    cells = [[Cell(("bar", l), 0, d ** l, dx, None)] for l in range(L + 2)]
    return CochainWindow(f, L, cells, dims, diffs, tags=None, kappa=kappa)


def _check_grading(m, row_keys, col_keys):
    for r, row in enumerate(m.rows):
        kr = row_keys[r]
        for c in row:
            if col_keys[c] != kr:
                raise InternalInvariantError(
                    "graded differential has an entry crossing grades")


def bar_oracle(t, x=None, L=3, budget=DEFAULT_ORACLE_BUDGET):
    """Bar complex of the assembled total algebra with the block
    displacement grading supplied automatically."""
    if x is None:
        x = TBimodule.regular(t)
    tweight = [j - i for (j, i) in t.block_of]
    xweight = [j - i for (j, i) in x.block_of]
    return build_bar_complex(t.total, x, L, budget=budget,
                             grading=(tweight, xweight))


# ---------------------------------------------------------------------------
# reduced complex computing Ext over a pair of algebras


def build_ext_complex(n_mod, x_block, L):
    """Cochain window whose cohomology is Ext over the two algebras acting
    on n_mod (left algebra B, right algebra A), with coefficients in the
    bimodule x_block over the same pair.

    Degree l splits into cells (q, p), q + p = l, of maps
    B^{(x) q} (x) N (x) A^{(x) p} -> X; the differential combines the left
    action, all adjacent contractions with alternating signs, and the
    right action with sign (-1)^l.
    """
    B = n_mod.left_alg
    A = n_mod.right_alg
    if x_block.left_alg is not B or x_block.right_alg is not A:
        raise InputError("coefficient block must be a bimodule over the same pair")
    f = n_mod.field
    db, da, dn, dx = B.dim, A.dim, n_mod.dim, x_block.dim

    cells = []
    dims = []
    lookup = []
    for l in range(L + 2):
        degree_cells = []
        lk = {}
        offset = 0
        for q in range(l, -1, -1):
            p = l - q
            mdim = (db ** q) * dn * (da ** p)
            cell = Cell((q, p), offset, mdim, dx, None)
            if cell.dim:
                degree_cells.append(cell)
                lk[(q, p)] = cell
                offset += cell.dim
        cells.append(degree_cells)
        lookup.append(lk)
        dims.append(offset)

    def word_flat(bs, xn, as_):
        k = 0
        for u in bs:
            k = k * db + u
        k = k * dn + xn
        for u in as_:
            k = k * da + u
        return k

    diffs = []
    for l in range(L + 1):
        entries = []
        for (qp, pp), cell in lookup[l + 1].items():
            sign_q = f.one if qp % 2 == 0 else f.neg(f.one)
            left_cell = lookup[l].get((qp - 1, pp))
            right_cell = lookup[l].get((qp, pp - 1))
            for bs in itertools.product(range(db), repeat=qp):
                for xn in range(dn):
                    for as_ in itertools.product(range(da), repeat=pp):
                        row_base = (cell.offset
                                    + word_flat(bs, xn, as_) * dx)
                        # left action, sign +1
                        if qp >= 1 and left_cell is not None:
                            col_base = (left_cell.offset
                                        + word_flat(bs[1:], xn, as_) * dx)
                            for xi in range(dx):
                                vec = x_block.left_basis_act(bs[0], xi)
                                for xip, c in vec.items():
                                    entries.append((row_base + xip,
                                                    col_base + xi, c))
                        # B-run contractions, pair i sign (-1)^i
                        if left_cell is not None:
                            for i in range(1, qp):
                                prod = B.basis_product(bs[i - 1], bs[i])
                                if not prod:
                                    continue
                                sg = f.one if i % 2 == 0 else f.neg(f.one)
                                for m_new, c in prod.items():
                                    nb = bs[:i - 1] + (m_new,) + bs[i + 1:]
                                    col_base = (left_cell.offset
                                                + word_flat(nb, xn, as_) * dx)
                                    cc = f.mul(sg, c)
                                    for xi in range(dx):
                                        entries.append((row_base + xi,
                                                        col_base + xi, cc))
                            # absorb the last B letter into N, sign (-1)^q'
                            if qp >= 1:
                                prod = n_mod.left_basis_act(bs[-1], xn)
                                for m_new, c in prod.items():
                                    col_base = (left_cell.offset
                                                + word_flat(bs[:-1], m_new,
                                                            as_) * dx)
                                    cc = f.mul(sign_q, c)
                                    for xi in range(dx):
                                        entries.append((row_base + xi,
                                                        col_base + xi, cc))
                        if right_cell is not None and pp >= 1:
                            # absorb the first A letter, sign (-1)^(q'+1)
                            sg = f.neg(sign_q)
                            prod = n_mod.right_basis_act(xn, as_[0])
                            for m_new, c in prod.items():
                                col_base = (right_cell.offset
                                            + word_flat(bs, m_new,
                                                        as_[1:]) * dx)
                                cc = f.mul(sg, c)
                                for xi in range(dx):
                                    entries.append((row_base + xi,
                                                    col_base + xi, cc))
                            # A-run contractions, pair i sign (-1)^(q'+1+i)
                            for i in range(1, pp):
                                prod = A.basis_product(as_[i - 1], as_[i])
                                if not prod:
                                    continue
                                par = (qp + 1 + i) % 2
                                sg = f.one if par == 0 else f.neg(f.one)
                                for m_new, c in prod.items():
                                    na = as_[:i - 1] + (m_new,) + as_[i + 1:]
                                    col_base = (right_cell.offset
                                                + word_flat(bs, xn, na) * dx)
                                    cc = f.mul(sg, c)
                                    for xi in range(dx):
                                        entries.append((row_base + xi,
                                                        col_base + xi, cc))
                            # right action, sign (-1)^l
                            sg = f.one if l % 2 == 0 else f.neg(f.one)
                            col_base = (right_cell.offset
                                        + word_flat(bs, xn, as_[:-1]) * dx)
                            for xi in range(dx):
                                vec = x_block.right_basis_act(xi, as_[-1])
                                for xip, c in vec.items():
                                    entries.append((row_base + xip,
                                                    col_base + xi,
                                                    f.mul(sg, c)))
        diffs.append(Matrix.from_entries(f, dims[l + 1], dims[l], entries))
    return CochainWindow(f, L, cells, dims, diffs)


# ---------------------------------------------------------------------------
# chain complex computing Tor over a middle algebra


class ChainWindow:
    """Chain complex C_0 .. C_{L+1} with boundaries d_q: C_q -> C_{q-1}
    built for q = 1..L+1; homology is reliable through degree L."""

    __slots__ = ("field", "L", "dims", "bounds")

    def __init__(self, field, L, dims, bounds):
        self.field = field
        self.L = L
        self.dims = dims
        self.bounds = bounds   # bounds[q] = d_q for q = 1..L+1; bounds[0] unused

    def homology_dims(self):
        ranks = [0] + [matrix_rank(self.bounds[q]) for q in range(1, self.L + 2)]
        return [self.dims[q] - ranks[q] - ranks[q + 1]
                for q in range(self.L + 1)]

    def __repr__(self):
        return f"ChainWindow(L={self.L}, dims {self.dims})"


def build_tor_complex(m2, m1, mid, L):
    """Chain complex  m2 (x) mid^{(x) q} (x) m1  whose homology is Tor over
    the middle algebra; boundaries alternate the right action on m2, the
    internal contractions, and the left action on m1, the j-th pair
    carrying sign (-1)^j."""
    if m2.right_alg is not mid or m1.left_alg is not mid:
        raise InputError("tensor factors do not act through the middle algebra")
    f = mid.field
    d2, dm, d1 = m2.dim, mid.dim, m1.dim
    dims = [d2 * (dm ** q) * d1 for q in range(L + 2)]
    bounds = [None]
    for q in range(1, L + 2):
        entries = []
        for y in range(d2):
            for word in itertools.product(range(dm), repeat=q):
                for xn in range(d1):
                    col = (y * (dm ** q) + _flat(word, dm)) * d1 + xn
                    for j in range(1, q + 2):
                        sign = f.one if j % 2 == 0 else f.neg(f.one)
                        if j == 1:
                            prod = m2.right_basis_act(y, word[0])
                            for yy, c in prod.items():
                                row = ((yy * (dm ** (q - 1))
                                        + _flat(word[1:], dm)) * d1 + xn)
                                entries.append((row, col, f.mul(sign, c)))
                        elif j <= q:
                            prod = mid.basis_product(word[j - 2], word[j - 1])
                            for bb, c in prod.items():
                                row = ((y * (dm ** (q - 1))
                                        + _flat(word[:j - 2] + (bb,)
                                                + word[j:], dm)) * d1 + xn)
                                entries.append((row, col, f.mul(sign, c)))
                        else:
                            prod = m1.left_basis_act(word[-1], xn)
                            for xx, c in prod.items():
                                row = ((y * (dm ** (q - 1))
                                        + _flat(word[:-1], dm)) * d1 + xx)
                                entries.append((row, col, f.mul(sign, c)))
        bounds.append(Matrix.from_entries(f, dims[q - 1], dims[q], entries))
    return ChainWindow(f, L, dims, bounds)


def _flat(word, radix):
    k = 0
    for u in word:
        k = k * radix + u
    return k
