"""The spectral sequence of the jump-count filtration: page dimensions,
page differentials, the cup-product form of the first differential, and
degeneration checks for tensorial three-level algebras.

Everything is computed from the filtered cochain window by the standard
cycle/boundary subspace formulas; representatives are chosen by pivot
extension over canonical bases, so all matrices are deterministic.
"""

from __future__ import annotations

from itertools import combinations

from .algebra import Bimodule, TBimodule, is_separable, tensor_over
from .errors import InputError, InternalInvariantError
from .exactla import (EchelonSolver, Matrix, Subspace, kernel, matrix_rank,
                      subspace_sum)
from .hochcomplex import (build_bar_complex, build_ext_complex,
                          build_relative_complex, cohomology_dims)
from .trajectory import Jump, Stay, Trajectory, TrajectoryBasis


class FilteredComplex:
    """A cochain window whose basis vectors carry filtration tags in
    0..n-1; F^t C^l is the span of the vectors with tag >= t.

    Cycle subspaces Z_r^{p,q} = F^p C^l with boundary inside F^(p+r)
    (indices below 0 clamped to the full space, at or above n to zero)
    are computed as kernels of tag-restricted submatrices and cached.
    """

    __slots__ = ("window", "n", "_zcache", "_bcache")

    def __init__(self, window, n):
        if window.tags is None:
            raise InputError("spectral machinery needs a tagged window")
        self.window = window
        self.n = n
        self._zcache = {}
        self._bcache = {}

    def members(self, l, lo):
        """Basis indices of C^l with tag >= lo, ascending."""
        tags = self.window.tags[l]
        return [k for k, t in enumerate(tags) if t >= lo]

    def z_space(self, p, r, l):
        """Z_r^{p, l-p} as a canonical subspace of C^l."""
        w = self.window
        if l < 0 or l > w.L:
            raise InputError(f"degree {l} outside the differential window")
        lo = max(p, 0)
        bound = min(max(p + r, 0), self.n)
        key = (lo, bound, l)
        cached = self._zcache.get(key)
        if cached is not None:
            return cached
        f = w.field
        dim_l = w.dims[l]
        if lo >= self.n:
            out = Subspace.zero(f, dim_l)
            self._zcache[key] = out
            return out
        cols = self.members(l, lo)
        kill_rows = [k for k, t in enumerate(w.tags[l + 1]) if t < bound]
        if not kill_rows:
            out = Subspace.from_vectors(
                f, dim_l, [{c: f.one} for c in cols])
        else:
            sub = w.diffs[l].row_select(kill_rows).col_select(cols)
            ker = kernel(sub)
            rows = [{cols[c]: v for c, v in row.items()} for row in ker.rows]
            pivots = [cols[c] for c in ker.pivots]
            out = Subspace(f, dim_l, rows, pivots)
        self._zcache[key] = out
        return out

    def boundary_space(self, p, r, l):
        """delta(Z_{r-1}^{p-r+1, *}) inside C^l, the boundary part of the
        page-r denominator at column p."""
        w = self.window
        if l == 0:
            return Subspace.zero(w.field, w.dims[0])
        key = (p, r, l)
        cached = self._bcache.get(key)
        if cached is not None:
            return cached
        z = self.z_space(p - r + 1, r - 1, l - 1)
        delta = w.diffs[l - 1]
        vecs = [delta.apply(row) for row in z.rows]
        out = Subspace.from_vectors(w.field, w.dims[l], vecs)
        self._bcache[key] = out
        return out

    def denominator(self, p, r, l):
        """The full denominator of E_r at column p, total degree l."""
        return subspace_sum(self.z_space(p + 1, r - 1, l),
                            self.boundary_space(p, r, l))


def build_filtered(t, x=None, L=4):
    """Relative complex of t wrapped with its jump-count filtration."""
    return FilteredComplex(build_relative_complex(t, x, L), t.n)


class SpectralPage:
    """One page: dims and differentials over the reliable cells.

    dims[(p, q)] is defined for p+q <= L; d[(p, q)] (the matrix of d_r
    into cell (p+r, q-r+1), acting on chosen class representatives) for
    p+q <= L-1.  reps[(p, q)] lists the representative cocycles behind
    the matrix columns.
    """

    __slots__ = ("r", "n", "L", "dims", "d", "reps", "reliable",
                 "reliable_d", "_solvers")

    def __init__(self, r, n, L):
        self.r = r
        self.n = n
        self.L = L
        self.dims = {}
        self.d = {}
        self.reps = {}
        self.reliable = set()
        self.reliable_d = set()
        self._solvers = {}

    def dim(self, p, q):
        return self.dims.get((p, q))

    def class_coords(self, p, q, vec):
        """Coordinates of a cycle's class over the cell's representatives;
        raises if the vector is not a cycle of this cell."""
        solver, ntags = self._solvers[(p, q)]
        combo = solver.express(vec)
        if combo is None:
            raise InputError("vector is not a cycle at this cell")
        out = [0] * ntags
        for tag, c in combo.items():
            if isinstance(tag, tuple) and tag[0] == "r":
                out[tag[1]] = c
        return out

    def __repr__(self):
        return f"SpectralPage(r={self.r}, cells {len(self.dims)})"


def compute_page(fc, r):
    """Page r of the spectral sequence of a filtered window: dimensions
    for every cell with p+q <= L, differentials for p+q <= L-1.

    E_r = Z_r / (Z_{r-1} one column up + boundaries from r-1 columns
    down); d_r lifts a class representative, applies the differential,
    and re-expresses the result in the target cell's classes.
    """
    if r < 0:
        raise InputError("page index must be nonnegative")
    w = fc.window
    n = fc.n
    page = SpectralPage(r, n, w.L)
    f = w.field

    cells = [(p, q) for l in range(w.L + 1)
             for p in range(0, n) for q in (l - p,) if q >= 0]

    # dims and representatives
    for (p, q) in cells:
        l = p + q
        num = fc.z_space(p, r, l)
        den = fc.denominator(p, r, l)
        solver = EchelonSolver(f)
        for k, row in enumerate(den.rows):
            if not solver.add(dict(row), ("d", k)):
                raise InternalInvariantError(
                    "denominator basis unexpectedly dependent")
        reps = []
        for row in num.rows:
            if solver.add(dict(row), ("r", len(reps))):
                reps.append(dict(row))
        if len(reps) != num.dim - den.dim:
            raise InternalInvariantError(
                "page denominator not contained in its numerator")
        page.dims[(p, q)] = len(reps)
        page.reps[(p, q)] = reps
        page._solvers[(p, q)] = (solver, len(reps))
        page.reliable.add((p, q))

    # differentials
    for (p, q) in cells:
        l = p + q
        if l > w.L - 1:
            continue
        src_reps = page.reps[(p, q)]
        tp, tq = p + r, q - r + 1
        tdim = page.dims.get((tp, tq), 0)
        m = Matrix(f, tdim, len(src_reps))
        for cidx, v in enumerate(src_reps):
            image = w.diffs[l].apply(v)
            if not image:
                continue
            if (tp, tq) not in page._solvers:
                raise InternalInvariantError(
                    "differential leaves the reliable plane")
            combo = page._solvers[(tp, tq)][0].express(image)
            if combo is None:
                raise InternalInvariantError(
                    "page differential image is not a cycle at its target")
            for tag, c in combo.items():
                if tag[0] == "r" and c != f.zero:
                    m.rows[tag[1]][cidx] = c
        page.d[(p, q)] = m
        page.reliable_d.add((p, q))
    return page


# ---------------------------------------------------------------------------
# labeled E1 structure


def x_block_bimodule(t, x, j, i):
    """The (j, i) coefficient block as a bimodule over (A_j, A_i)."""
    f = t.field
    d = x.block_dim(j, i)
    lact = dict(x.left_block_action(j, j, i))
    ract = dict(x.right_block_action(j, i, i))
    return Bimodule(f, d, t.diag[j - 1], t.diag[i - 1], lact, ract,
                    label=f"X[{j},{i}]")


def chain_module(t, chain):
    """The iterated balanced tensor product of the blocks along an
    ascending chain of levels, folded from the left."""
    k = list(chain)
    cur = t.module(k[1], k[0])
    if cur is None:
        cur = Bimodule.zero(t.field, t.diag[k[1] - 1], t.diag[k[0] - 1])
    for s in range(1, len(k) - 1):
        nxt = t.module(k[s + 1], k[s])
        if nxt is None:
            nxt = Bimodule.zero(t.field, t.diag[k[s + 1] - 1],
                                t.diag[k[s] - 1])
        cur, _ = tensor_over(t.diag[k[s] - 1], nxt, cur)
    return cur


def e1_structure_report(t, x=None, L=4):
    """Compute every labeled summand of the first page independently
    (bar complexes of the diagonal algebras for column 0, reduced Ext
    complexes of chain tensor products for the higher columns), compare
    with the machinery page, and report cell-by-cell agreement.

    Also reports whether the projectivity hypothesis behind the labeled
    description was detected (all strictly intermediate diagonal algebras
    separable)."""
    if x is None:
        x = TBimodule.regular(t)
    n = t.n
    fc = build_filtered(t, x, L)
    page = compute_page(fc, 1)

    hypothesis = all(is_separable(t.diag[i - 1]) for i in range(2, n))

    labeled = {}   # (p, q) -> list of (label, dim)
    for p in range(0, n):
        ext_window = L - p
        if ext_window < 0:
            continue
        if p == 0:
            summands = []
            for i in range(1, n + 1):
                blk = x_block_bimodule(t, x, i, i)
                bw = build_bar_complex(t.diag[i - 1], blk, ext_window)
                dims = cohomology_dims(bw)
                summands.append((f"H(A{i})", dims))
        else:
            summands = []
            for chain in combinations(range(1, n + 1), p + 1):
                mod = chain_module(t, chain)
                blk = x_block_bimodule(t, x, chain[-1], chain[0])
                ew = build_ext_complex(mod, blk, ext_window)
                dims = cohomology_dims(ew)
                label = "Ext(" + "(x)".join(
                    f"M[{chain[s + 1]},{chain[s]}]"
                    for s in range(len(chain) - 2, -1, -1)) + ")"
                summands.append((label, dims))
        for q in range(0, ext_window + 1):
            labeled[(p, q)] = [(lab, dims[q]) for (lab, dims) in summands]

    cells = {}
    all_agree = True
    for (p, q), summands in sorted(labeled.items()):
        total = sum(d for (_, d) in summands)
        got = page.dims.get((p, q))
        agree = (got == total)
        if not agree:
            all_agree = False
        cells[(p, q)] = {
            "summands": summands,
            "labeled_total": total,
            "page_dim": got,
            "agree": agree,
        }
    return {
        "projective_hypothesis": hypothesis,
        "cells": cells,
        "all_agree": all_agree,
        "page": page,
    }


# ---------------------------------------------------------------------------
# cup-product form of the first differential


def _cell_map(t, window, l):
    out = {}
    for cell in window.cells[l]:
        tau = cell.key[0]
        out[tau] = (cell, TrajectoryBasis.over(t, tau))
    return out


def _stays(v, count):
    return tuple(Stay(v) for _ in range(count))


def cup_d1_general(t, tau, f, window, x=None):
    """The displayed first-differential sum for a cochain supported on a
    single cell: left cups with every identity above the trajectory's
    top level, right cups (with sign (-1)^(degree+1)) with every identity
    below its bottom level, and all middle insertions of composition maps
    with their position signs.

    ``f`` is a sparse vector over the window's degree-l coordinates
    supported on the cell of ``tau``; the result is a sparse vector over
    degree l+1, supported on jump-count tau.length + 1.
    """
    if x is None:
        x = TBimodule.regular(t)
    fld = t.field
    l = tau.degree
    n = t.n
    src_map = _cell_map(t, window, l)
    if tau not in src_map:
        raise InputError("trajectory cell is not present in the window")
    cell, basis = src_map[tau]
    lo, hi = cell.offset, cell.offset + cell.dim
    for k in f:
        if not (lo <= k < hi):
            raise InputError("cochain is not supported on the named cell")
    tgt_map = _cell_map(t, window, l + 1)
    K = tau.visited()
    top = K[-1]
    botm = K[0]
    xdim = cell.xdim
    out = {}

    def f_entry(mflat, xi):
        return f.get(lo + mflat * xdim + xi, fld.zero)

    # left cups: prepend a jump above the top level, evaluate by the
    # left action on the coefficient
    for w_lev in range(top + 1, n + 1):
        jtau = Trajectory((Jump(top, w_lev),) + tau.components, tau.source)
        rc = tgt_map.get(jtau)
        if rc is None:
            continue
        tcell = rc[0]
        act = x.left_block_action(w_lev, top, botm)
        jdim = t.block_dim(w_lev, top)
        for mflat in range(basis.dim):
            for xi in range(xdim):
                c = f_entry(mflat, xi)
                if c == fld.zero:
                    continue
                for m in range(jdim):
                    vec = act.get((m, xi))
                    if not vec:
                        continue
                    tflat = m * basis.dim + mflat
                    base = tcell.offset + tflat * tcell.xdim
                    for xip, a in vec.items():
                        k = base + xip
                        nv = fld.add(out.get(k, fld.zero), fld.mul(c, a))
                        if nv == fld.zero:
                            out.pop(k, None)
                        else:
                            out[k] = nv

    # right cups: append a jump below the bottom level, sign (-1)^(l+1)
    sign = fld.one if (l + 1) % 2 == 0 else fld.neg(fld.one)
    for k0 in range(1, botm):
        jtau = Trajectory(tau.components + (Jump(k0, botm),), k0)
        rc = tgt_map.get(jtau)
        if rc is None:
            continue
        tcell = rc[0]
        act = x.right_block_action(top, botm, k0)
        jdim = t.block_dim(botm, k0)
        for mflat in range(basis.dim):
            for xi in range(xdim):
                c = f_entry(mflat, xi)
                if c == fld.zero:
                    continue
                for m in range(jdim):
                    vec = act.get((xi, m))
                    if not vec:
                        continue
                    tflat = mflat * jdim + m
                    base = tcell.offset + tflat * tcell.xdim
                    cc = fld.mul(sign, c)
                    for xip, a in vec.items():
                        k = base + xip
                        nv = fld.add(out.get(k, fld.zero), fld.mul(cc, a))
                        if nv == fld.zero:
                            out.pop(k, None)
                        else:
                            out[k] = nv

    # middle insertions: split each jump through every strictly
    # intermediate level; the sign is the slot position of the new pair
    comps = tau.components
    for s, move in enumerate(comps):
        if not move.is_jump:
            continue
        ki, kip = move.source, move.target
        for alpha in range(ki + 1, kip):
            mu = t.mu(kip, alpha, ki)
            if mu is None:
                continue
            new_comps = (comps[:s] + (Jump(alpha, kip), Jump(ki, alpha))
                         + comps[s + 1:])
            jtau = Trajectory(new_comps, tau.source)
            rc = tgt_map.get(jtau)
            if rc is None:
                continue
            tcell, tbasis = rc
            sg = fld.one if (s + 1) % 2 == 0 else fld.neg(fld.one)
            d_up = t.block_dim(kip, alpha)
            d_dn = t.block_dim(alpha, ki)
            for tup in tbasis.tuples():
                y, z = tup[s], tup[s + 1]
                prod = mu.pair_apply(y, z)
                if not prod:
                    continue
                tflat = tbasis.flat_index(tup)
                base = tcell.offset + tflat * tcell.xdim
                src_pre = tup[:s]
                src_post = tup[s + 2:]
                for m_merge, a in prod.items():
                    mflat = basis.flat_index(src_pre + (m_merge,) + src_post)
                    for xi in range(xdim):
                        c = f_entry(mflat, xi)
                        if c == fld.zero:
                            continue
                        k = base + xi
                        nv = fld.add(out.get(k, fld.zero),
                                     fld.mul(fld.mul(sg, a), c))
                        if nv == fld.zero:
                            out.pop(k, None)
                        else:
                            out[k] = nv
    return out


def cup_d1_n3(t, f, g, h, l, window, x=None):
    """The three-level cup-product display for the first differential on
    the column-0 summands: identities of the three gap blocks cupped on
    the left of (f, g, h) and on the right with sign (-1)^(l+1).

    f, g, h are degree-l cocycles of the bar complexes of the three
    diagonal algebras with coefficients in their diagonal blocks, given
    as sparse vectors over those bar windows' degree-l coordinates;
    non-cocycles are rejected.  Returns the column-1 cochain as a sparse
    vector over the window's degree-(l+1) coordinates.
    """
    if t.n != 3:
        raise InputError("this display is specific to three levels")
    if x is None:
        x = TBimodule.regular(t)
    fld = t.field

    for i, fi in ((1, f), (2, g), (3, h)):
        blk = x_block_bimodule(t, x, i, i)
        bw = build_bar_complex(t.diag[i - 1], blk, l)
        img = bw.diffs[l].apply(fi)
        if img:
            raise InputError(
                f"input cochain at level {i} is not a cocycle; its class "
                "map is ill-defined")

    # embed each cocycle as a pure stay-power cochain and cup per display
    out = {}
    src_map = _cell_map(t, window, l)
    for i, fi in ((1, f), (2, g), (3, h)):
        tau = Trajectory(_stays(i, l), i)
        rc = src_map.get(tau)
        if rc is None:
            if fi:
                raise InputError(
                    f"window is missing the degree-{l} stay cell at level {i}")
            continue
        cell, basis = rc
        emb = {cell.offset + k: c for k, c in fi.items()}
        part = cup_d1_general(t, tau, emb, window, x)
        for k, c in part.items():
            nv = fld.add(out.get(k, fld.zero), c)
            if nv == fld.zero:
                out.pop(k, None)
            else:
                out[k] = nv
    return out


# ---------------------------------------------------------------------------
# degeneration checks


def _is_tensorial_3(t):
    if t.tensorial_adjacent is not None:
        return True
    m32, m21, m31 = t.module(3, 2), t.module(2, 1), t.module(3, 1)
    d32 = m32.dim if m32 else 0
    d21 = m21.dim if m21 else 0
    d31 = m31.dim if m31 else 0
    if d31 == 0:
        quotient_dim = 0 if (d32 == 0 or d21 == 0) else \
            tensor_over(t.diag[1], m32, m21)[0].dim
        return quotient_dim == 0
    mu = t.mu(3, 2, 1)
    if mu is None or d32 == 0 or d21 == 0:
        return False
    quotient, _ = tensor_over(t.diag[1], m32, m21)
    return (matrix_rank(mu.matrix) == d31 and quotient.dim == d31)


def check_degeneration_A2k(t, x=None, L=4):
    """Degeneration checks for a tensorial three-level algebra.

    When the middle algebra is one-dimensional, asserts that the second
    differential vanishes on every reliable cell (the sequence
    degenerates at page 2).  In all tensorial cases, additionally checks
    on explicit representatives that second-differential classes coming
    from the outer diagonal summands vanish.  Refuses non-tensorial or
    non-three-level input, naming the violated hypothesis.
    """
    if t.n != 3:
        raise InputError(
            "degeneration check requires exactly three levels, got "
            f"{t.n}")
    if not _is_tensorial_3(t):
        raise InputError(
            "degeneration check requires a tensorial algebra: the wide "
            "block must be the balanced tensor product of the adjacent ones")
    if x is None:
        x = TBimodule.regular(t)
    fld = t.field
    fc = build_filtered(t, x, L)
    w = fc.window
    a2_is_field = (t.diag[1].dim == 1)

    report = {
        "tensorial": True,
        "a2_one_dimensional": a2_is_field,
        "d2_zero": None,
        "outer_classes_checked": 0,
        "outer_classes_vanish": True,
        "nonsurviving_skipped": 0,
    }

    if a2_is_field:
        page2 = compute_page(fc, 2)
        zero = all(m.nnz() == 0 for m in page2.d.values())
        report["d2_zero"] = zero

    # explicit second-differential vanishing for the outer summands
    for lvl in (1, 3):
        alg = t.diag[lvl - 1]
        blk = x_block_bimodule(t, x, lvl, lvl)
        for l in range(1, L):
            bw = build_bar_complex(alg, blk, l)
            cocycles = kernel(bw.diffs[l])
            if cocycles.dim == 0:
                continue
            src_map = _cell_map(t, w, l)
            tau = Trajectory(_stays(lvl, l), lvl)
            rc = src_map.get(tau)
            if rc is None:
                continue
            cell, _ = rc
            for row in cocycles.rows:
                emb = {cell.offset + k: c for k, c in row.items()}
                outcome = _d2_class_vanishes(fc, emb, l)
                if outcome is None:
                    report["nonsurviving_skipped"] += 1
                    continue
                report["outer_classes_checked"] += 1
                if not outcome:
                    report["outer_classes_vanish"] = False
    return report


def _d2_class_vanishes(fc, vec, l):
    """For a column-0 cocycle embedding with vanishing column-0 boundary:
    None if its first-page class does not survive to page 2; otherwise
    whether its second-differential class vanishes.

    Solves for a column->=1 correction making the boundary land two
    columns up, then tests membership in the page-2 boundary denominator.
    """
    w = fc.window
    fld = w.field
    delta = w.diffs[l]
    image = delta.apply(vec)
    # d1 class must vanish: image = delta(correction) + (tag >= 2 rest)
    solver = EchelonSolver(fld)
    for c in fc.members(l, 1):
        col = delta.apply({c: fld.one})
        solver.add(col, ("w", c))
    for k in fc.members(l + 1, 2):
        solver.add({k: fld.one}, ("f2", k))
    combo = solver.express(image)
    if combo is None:
        return None
    corr = {}
    for tag, c in combo.items():
        if tag[0] == "w":
            corr[tag[1]] = c
    # g = delta(vec - corr) lands in F^2; its page-2 class must vanish
    diff = dict(vec)
    for k, c in corr.items():
        nv = fld.sub(diff.get(k, fld.zero), c)
        if nv == fld.zero:
            diff.pop(k, None)
        else:
            diff[k] = nv
    g = delta.apply(diff)
    for k in g:
        if w.tags[l + 1][k] < 2:
            raise InternalInvariantError("corrected boundary is not two columns up")
    den = fc.boundary_space(2, 2, l + 1)
    return den.contains_vector(g)
