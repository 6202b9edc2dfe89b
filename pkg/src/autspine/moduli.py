"""Moduli of admissible graphs and their forest-flag Delta-complexes.

`enumerate_graphs` lists all admissible connected (bi)pointed graphs of
a given rank up to isomorphism, by filling degree-constrained adjacency
matrices and deduplicating canonical codes.  `build_complex` assembles
the quotient complex whose r-cells are isomorphism classes of pairs
(graph, strictly nested chain of nonempty forests); the same assembler
also serves the fixed-point quotients of the equivariant layer, where
cells carry a symmetry group and flags must be group-invariant.
"""

from __future__ import annotations

import json
import os
from functools import lru_cache

from . import graphs as G
from .graphs import BudgetError


MAX_POINTED_RANK = 4

# generous default budgets; the CLI can lower them
MAX_VERTICES = 16
MAX_CANDIDATES = 5_000_000


def _degree_vectors(V, E, circle_distinct):
    """Degree tuples: d[0] basepoint >= 2, d[1] circle >= 2 when distinct,
    remaining vertices >= 3 in non-increasing order, sum = 2E."""
    total = 2 * E
    special = 2 if circle_distinct else 1
    mins = [2] * special + [3] * (V - special)
    if sum(mins) > total:
        return

    def rec(i, left, prev):
        if i == V:
            if left == 0:
                yield ()
            return
        lo = mins[i]
        hi = left - sum(mins[i + 1:])
        if i >= special:
            hi = min(hi, prev)
        for d in range(lo, hi + 1):
            for rest in rec(i + 1, left - d, d if i >= special else total):
                yield (d,) + rest

    yield from rec(0, total, total)


def _fill_multigraphs(V, E, degs):
    """All multigraphs (as edge pair lists) with the given degrees."""
    cells = [(i, j) for i in range(V) for j in range(i, V)]
    out = []
    pairs = []
    rem = list(degs)

    def rec(ci, e_left):
        if ci == len(cells):
            if e_left == 0:
                out.append(list(pairs))
            return
        i, j = cells[ci]
        if i == j:
            top = min(rem[i] // 2, e_left)
        else:
            top = min(rem[i], rem[j], e_left)
        # feasibility: degrees of closed-off vertices must be exact
        for m in range(top + 1):
            cost = 2 * m if i == j else m
            rem[i] -= cost if i == j else m
            if i != j:
                rem[j] -= m
            pairs.extend([(i, j)] * m)
            last_of_row = (j == V - 1)
            if not last_of_row or rem[i] == 0:
                # prune: remaining degree must fit into remaining edges
                need = sum(rem[k] for k in range(i, V))
                if need <= 2 * (e_left - m):
                    rec(ci + 1, e_left - m)
            del pairs[len(pairs) - m:]
            if i == j:
                rem[i] += 2 * m
            else:
                rem[i] += m
                rem[j] += m

    rec(0, E)
    return out


def _enumerate_raw(rank, flavor):
    if rank < 0:
        raise ValueError("rank must be >= 0")
    if flavor not in ("pointed", "bipointed"):
        raise ValueError("flavor must be 'pointed' or 'bipointed'")
    if flavor == "pointed" and rank > MAX_POINTED_RANK:
        raise BudgetError("pointed enumeration supported up to rank %d" % MAX_POINTED_RANK)
    if rank == 0:
        g = G.point_graph()
        if flavor == "bipointed":
            g = G.with_circle(g, 0)
        return [g]

    found = {}

    def consider(g):
        if not G.is_connected(g):
            return
        if not G.is_admissible(g, bipointed=(flavor == "bipointed")):
            return
        code = G.canonical_code(g)
        if code not in found:
            found[code] = G.canonical(g)[2]

    vmax = 2 * rank - 1 if flavor == "pointed" else 2 * rank
    vmax = min(vmax, MAX_VERTICES)
    for V in range(1, vmax + 1):
        E = rank + V - 1
        circle_options = [False] if flavor == "pointed" else ([False] if V == 1 else [False, True])
        for circ in circle_options:
            if flavor == "bipointed" and not circ and V > 2 * rank - 1 and V > 1:
                continue
            for degs in _degree_vectors(V, E, circ):
                for pairs in _fill_multigraphs(V, E, degs):
                    vo = []
                    for u, v in pairs:
                        vo += [u, v]
                    circle = 1 if circ else (0 if flavor == "bipointed" else None)
                    consider(G.Graph(V, vo, 0, circle))
    return [found[c] for c in sorted(found)]


_cache_dir = None

def set_cache_dir(path):
    global _cache_dir
    _cache_dir = path


def _cache_path(rank, flavor):
    if not _cache_dir:
        return None
    return os.path.join(_cache_dir, "graphs_r%d_%s_v%d.txt" % (rank, flavor, G.CODE_VERSION))


@lru_cache(maxsize=None)
def enumerate_graphs(rank, flavor="pointed"):
    """All admissible graphs of the rank up to iso, sorted by canonical code."""
    path = _cache_path(rank, flavor)
    if path and os.path.exists(path):
        out = []
        with open(path) as fh:
            header = fh.readline().split()
            if header[:3] == ["autspine-graphs", str(rank), flavor]:
                for line in fh:
                    code = bytes.fromhex(line.split()[0])
                    out.append(G.decode_code(code))
                return out
    out = _enumerate_raw(rank, flavor)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write("autspine-graphs %d %s %d\n" % (rank, flavor, G.CODE_VERSION))
            for g in out:
                fh.write("%s %d %d\n" % (G.canonical_code(g).hex(), g.n_edges, g.nv))
    return out


# -- Delta-complexes -------------------------------------------------

class Cell:
    """Isomorphism class of (graph, symmetry gens, nested forest flag)."""

    __slots__ = ("graph", "gens", "flag", "stab", "key")

    def __init__(self, graph, gens, flag, stab, key):
        self.graph = graph
        self.gens = gens
        self.flag = flag      # tuple of frozensets of edge ids, strictly nested
        self.stab = stab      # tuple of half-edge perms (flag-preserving, normalizing)
        self.key = key

    def __repr__(self):
        return "Cell(%d vertices, flag sizes %s)" % (
            self.graph.nv, [len(F) for F in self.flag])


class DeltaComplex:
    """Cells per dimension plus ordered face lists with transport data."""

    def __init__(self, cells, faces, transports):
        self.cells = cells            # cells[d] = list[Cell]
        self.faces = faces            # faces[d][ci] = list of d+1 cell ids in dim d-1
        self.transports = transports  # parallel to faces: ('keep'|'collapse', sigma, forest)

    @property
    def dim(self):
        return len(self.cells) - 1

    def n_cells(self, d):
        if 0 <= d < len(self.cells):
            return len(self.cells[d])
        return 0

    def cell_counts(self):
        return [len(c) for c in self.cells]

    def euler_characteristic(self):
        return sum((-1) ** d * len(c) for d, c in enumerate(self.cells))

    def to_json(self):
        data = {"cells": [], "faces": []}
        for d, layer in enumerate(self.cells):
            data["cells"].append([
                {"code": G.canonical_code(c.graph).hex(),
                 "flag": [sorted(F) for F in c.flag]} for c in layer])
            data["faces"].append(self.faces[d])
        return json.dumps(data, indent=1)

    def to_dot(self):
        lines = ["graph skeleton {"]
        for i in range(self.n_cells(0)):
            lines.append('  c%d [label="%d"];' % (i, i))
        if len(self.faces) > 1:
            for ci, fl in enumerate(self.faces[1]):
                lines.append("  c%d -- c%d ;" % (fl[1], fl[0]))
        lines.append("}")
        return "\n".join(lines)


def invariant_forests(graph, gens, maximal_only=False):
    """Forests preserved setwise by every generator."""
    if not gens:
        return G.forests(graph, maximal_only=maximal_only)
    ems = [G.perm_edge_map(s) for s in gens]
    all_f = [F for F in G.forests(graph)
             if all(frozenset(em[e] for e in F) == F for em in ems)]
    if maximal_only:
        all_f = [F for F in all_f
                 if not any(F < F2 for F2 in all_f)]
    return all_f


def inessential_edges(graph, gens):
    """Edges lying in every maximal invariant forest."""
    maxf = invariant_forests(graph, gens, maximal_only=True)
    if not maxf:
        return frozenset()
    out = maxf[0]
    for F in maxf[1:]:
        out = out & F
    return out


def is_essential(graph, gens):
    return not inessential_edges(graph, gens)


def _vertex_stab(graph, gens):
    auts = G.automorphisms(graph)
    if not gens:
        return auts
    gset = G.subgroup_elements(graph.n_half_edges, gens)
    return tuple(a for a in auts
                 if frozenset(G.perm_conj(a, x) for x in gset) == gset)


def _flag_stab(cell_graph, stab, flag):
    keep = []
    for a in stab:
        em = G.perm_edge_map(a)
        if all(frozenset(em[e] for e in F) == F for F in flag):
            keep.append(a)
    return tuple(keep)


def assemble_complex(vertex_items, essential=False, max_dim=None,
                     max_cells=200_000):
    """Build the quotient Delta-complex from (graph, gens) vertex items.

    vertex_items need not be canonical or distinct.  When `essential` is
    set, a cell is kept only if its graph and every flag quotient have
    no inessential edges.
    """
    # dimension 0
    verts = {}
    for graph, gens in vertex_items:
        if essential and not is_essential(graph, gens):
            continue
        key, sigma = G.cell_key(graph, gens, ())
        if key in verts:
            continue
        cg = G.canonical(graph)[2]
        cgens = tuple(G.perm_conj(sigma, x) for x in gens)
        stab = _vertex_stab(cg, cgens)
        verts[key] = Cell(cg, cgens, (), stab, key)
    layer0 = [verts[k] for k in sorted(verts)]
    cells = [layer0]

    d = 1
    while True:
        if max_dim is not None and d > max_dim:
            break
        layer = {}
        for cell in cells[0]:
            inv = invariant_forests(cell.graph, cell.gens)
            inv = [F for F in inv if F]
            chains = _chains(inv, d)
            for flag in chains:
                if essential and not _flag_essential(cell.graph, cell.gens, flag):
                    continue
                key, sigma = G.cell_key(cell.graph, cell.gens, flag)
                if key in layer:
                    continue
                em = G.perm_edge_map(sigma)
                cflag = tuple(frozenset(em[e] for e in F) for F in flag)
                cgens = tuple(G.perm_conj(sigma, x) for x in cell.gens)
                cg = cell.graph  # canonical graph is unchanged by flags
                stab = _flag_stab(cg, _vertex_stab(cg, cgens), cflag)
                layer[key] = Cell(cg, cgens, cflag, stab, key)
                if sum(len(c) for c in cells) + len(layer) > max_cells:
                    raise BudgetError("cell budget exceeded")
        if not layer:
            break
        cells.append([layer[k] for k in sorted(layer)])
        d += 1

    index = [{c.key: i for i, c in enumerate(layer)} for layer in cells]
    faces = [[None] * len(layer) for layer in cells]
    transports = [[None] * len(layer) for layer in cells]
    for d in range(1, len(cells)):
        for ci, cell in enumerate(cells[d]):
            fl = []
            tr = []
            for i in range(d + 1):
                fcell_data = _face(cell, i)
                key, sigma = G.cell_key(fcell_data[0], fcell_data[1], fcell_data[2])
                fid = index[d - 1][key]
                fl.append(fid)
                tr.append((fcell_data[3], sigma, fcell_data[4]))
            faces[d][ci] = fl
            transports[d][ci] = tr
    return DeltaComplex(cells, faces, transports)


def _chains(forest_list, length):
    """Strictly increasing chains of the given length."""
    forest_list = sorted(forest_list, key=lambda F: (len(F), sorted(F)))
    chains = [[F] for F in forest_list]
    for _ in range(length - 1):
        chains = [ch + [F2] for ch in chains for F2 in forest_list
                  if ch[-1] < F2]
    return [tuple(ch) for ch in chains]


def _flag_essential(graph, gens, flag):
    for F in flag:
        q, em, _ = G.collapse(graph, F)
        qgens = tuple(G.descend_perm(graph, x, F, em) for x in gens)
        if not is_essential(q, qgens):
            return False
    return True


def _face(cell, i):
    """Face i of a flag cell: returns (graph, gens, flag, kind, forest)."""
    if i == 0:
        F1 = cell.flag[0]
        q, em, _ = G.collapse(cell.graph, F1)
        qgens = tuple(G.descend_perm(cell.graph, x, F1, em) for x in cell.gens)
        qflag = tuple(frozenset(em[e] for e in F if e not in F1)
                      for F in cell.flag[1:])
        return (q, qgens, qflag, "collapse", F1)
    flag = cell.flag[:i - 1] + cell.flag[i:]
    return (cell.graph, cell.gens, flag, "keep", None)


def build_complex(rank, flavor="pointed", max_dim=None):
    """Quotient complex of the rank-r moduli of (bi)pointed graphs."""
    gs = enumerate_graphs(rank, flavor)
    return assemble_complex([(g, ()) for g in gs], max_dim=max_dim)


def kunneth_betti(a, b, p, r):
    """Betti number of a product complex over F_p via the Kunneth formula."""
    from .cohomology import betti
    total = 0
    for i in range(r + 1):
        j = r - i
        if i <= a.dim and j <= b.dim:
            total += betti(a, p, i) * betti(b, p, j)
    return total
