"""Basepointed half-edge multigraphs: presets, canonical forms, collapses.

A graph is stored as a list ``vertex_of`` over half-edges, where
half-edges ``2*i`` and ``2*i + 1`` always pair up into edge ``i``; the
pairing involution is therefore ``h ^ 1`` and is never stored.  Every
graph carries a basepoint vertex and, for the bipointed variant, an
optional second marked vertex ``circle``.  Isomorphisms and
automorphisms are bijections of half-edges compatible with the pairing
and the incidences, so loops, parallel edges and orientation flips are
all first-class.

Canonical forms are computed by a backtracking search over vertex
orderings refined by degree-type invariants; this is exhaustive but
cheap at the sizes that occur here (at most ~7 vertices, ~12 edges).
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

CODE_VERSION = 1

# circle encoding inside canonical codes
_CIRC_NONE = 255
_CIRC_AT_BP = 254

_ORDERING_LIMIT = 2_000_000


class BudgetError(Exception):
    """Raised when an enumeration or search exceeds its resource budget."""


class Graph:
    """Connected multigraph with basepoint and optional second marked vertex."""

    __slots__ = ("nv", "vertex_of", "basepoint", "circle")

    def __init__(self, nv, vertex_of, basepoint=0, circle=None):
        self.nv = nv
        self.vertex_of = tuple(vertex_of)
        self.basepoint = basepoint
        self.circle = circle
        if len(self.vertex_of) % 2:
            raise ValueError("odd number of half-edges")
        if any(not 0 <= v < nv for v in self.vertex_of):
            raise ValueError("half-edge attached to missing vertex")
        if not 0 <= basepoint < nv:
            raise ValueError("basepoint out of range")
        if circle is not None and not 0 <= circle < nv:
            raise ValueError("circle out of range")

    # -- basic data -------------------------------------------------

    @property
    def n_half_edges(self):
        return len(self.vertex_of)

    @property
    def n_edges(self):
        return len(self.vertex_of) // 2

    def key(self):
        return (self.nv, self.vertex_of, self.basepoint, self.circle)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Graph(nv=%d, edges=%r, bp=%d, circle=%r)" % (
            self.nv, self.edges(), self.basepoint, self.circle)

    def edges(self):
        """Edge list as (vertex, vertex) pairs, edge i = halves (2i, 2i+1)."""
        vo = self.vertex_of
        return [(vo[2 * i], vo[2 * i + 1]) for i in range(self.n_edges)]

    def valences(self):
        val = [0] * self.nv
        for v in self.vertex_of:
            val[v] += 1
        return val

    def loops_at(self):
        lo = [0] * self.nv
        for u, v in self.edges():
            if u == v:
                lo[u] += 1
        return lo

    def is_loop(self, e):
        return self.vertex_of[2 * e] == self.vertex_of[2 * e + 1]

    def adjacency(self):
        """adj[v] = sorted list of (neighbour, multiplicity), loops excluded."""
        counts = [dict() for _ in range(self.nv)]
        for u, v in self.edges():
            if u != v:
                counts[u][v] = counts[u].get(v, 0) + 1
                counts[v][u] = counts[v].get(u, 0) + 1
        return [sorted(c.items()) for c in counts]


def is_connected(g):
    if g.nv == 1:
        return True
    seen = {g.basepoint}
    stack = [g.basepoint]
    adj = [[] for _ in range(g.nv)]
    for u, v in g.edges():
        adj[u].append(v)
        adj[v].append(u)
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.nv


def graph_rank(g):
    """First Betti number #edges - #vertices + 1 of a connected graph."""
    if not is_connected(g):
        raise ValueError("rank of a disconnected graph")
    return g.n_edges - g.nv + 1


def is_admissible(g, bipointed=False):
    """No free edges, non-marked vertices of valence >= 3.

    The basepoint needs valence >= 2 (a valence-1 basepoint would hang
    off a free edge), except for the degenerate single-vertex rank-0
    graph.  The second marked point may have valence 2.
    """
    if not is_connected(g):
        return False
    if g.circle is not None and not bipointed:
        return False
    val = g.valences()
    if g.nv == 1 and g.n_edges == 0:
        return True
    for v in range(g.nv):
        low = 2 if (v == g.basepoint or v == g.circle) else 3
        if val[v] < low:
            return False
    return True


# -- permutation helpers (half-edge permutations as tuples) ---------

def perm_identity(n):
    return tuple(range(n))

def perm_compose(a, b):
    """(a o b)[h] = a[b[h]]."""
    return tuple(a[x] for x in b)

def perm_inverse(a):
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return tuple(inv)

def perm_conj(s, x):
    """s o x o s^-1."""
    return perm_compose(perm_compose(s, x), perm_inverse(s))

def perm_edge_map(sigma):
    """Induced map on edges of a pairing-compatible half-edge map."""
    return tuple(sigma[2 * e] // 2 for e in range(len(sigma) // 2))

def is_automorphism(g, sigma, fix_marked=True):
    n = g.n_half_edges
    if sorted(sigma) != list(range(n)):
        return False
    vo = g.vertex_of
    vmap = {}
    for h in range(n):
        if sigma[h ^ 1] != sigma[h] ^ 1:
            return False
        u, w = vo[h], vo[sigma[h]]
        if vmap.setdefault(u, w) != w:
            return False
    if len(set(vmap.values())) != len(vmap):
        return False
    if fix_marked:
        if g.nv > 1 or g.n_edges:
            if vmap.get(g.basepoint, g.basepoint) != g.basepoint:
                return False
            if g.circle is not None and vmap.get(g.circle, g.circle) != g.circle:
                return False
    return True


# -- canonical form -------------------------------------------------

def _refined_classes(g):
    """Partition vertices into ordered classes by iterated degree refinement."""
    val = g.valences()
    lo = g.loops_at()
    adj = g.adjacency()
    key = {}
    for v in range(g.nv):
        key[v] = (0 if v == g.basepoint else 1,
                  0 if v == g.circle else 1,
                  val[v], lo[v])
    while True:
        newkey = {}
        for v in range(g.nv):
            nbr = tuple(sorted((key[u], m) for u, m in adj[v]))
            newkey[v] = (key[v], nbr)
        ranks = {k: i for i, k in enumerate(sorted(set(newkey.values())))}
        nxt = {v: (ranks[newkey[v]],) + key[v][:2] for v in range(g.nv)}
        # keep marked-vertex flags up front so classes stay marked-separated
        if len(set(nxt.values())) == len(set(key.values())):
            break
        key = {v: (key[v][0], key[v][1], ranks[newkey[v]]) for v in range(g.nv)}
    classes = {}
    for v in range(g.nv):
        classes.setdefault(key[v], []).append(v)
    return [classes[k] for k in sorted(classes)]


def _orderings(g):
    """All vertex orderings compatible with the refined partition."""
    classes = _refined_classes(g)
    total = 1
    for c in classes:
        for i in range(2, len(c) + 1):
            total *= i
        if total > _ORDERING_LIMIT:
            raise BudgetError("too many candidate vertex orderings")
    for combo in itertools.product(*[itertools.permutations(c) for c in classes]):
        order = [v for block in combo for v in block]
        pos = [0] * g.nv
        for i, v in enumerate(order):
            pos[v] = i
        yield pos


def _code_for_ordering(g, pos):
    pairs = sorted(
        (min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in g.edges())
    if g.circle is None:
        circ = _CIRC_NONE
    elif g.circle == g.basepoint:
        circ = _CIRC_AT_BP
    else:
        circ = pos[g.circle]
    head = bytes((CODE_VERSION, g.nv, g.n_edges, circ))
    return head + bytes(x for p in pairs for x in p)


def decode_code(code):
    """Inverse of the canonical code serialisation."""
    if code[0] != CODE_VERSION:
        raise ValueError("unknown code version")
    nv, ne, circ = code[1], code[2], code[3]
    body = code[4:]
    vertex_of = []
    for i in range(ne):
        vertex_of += [body[2 * i], body[2 * i + 1]]
    if circ == _CIRC_NONE:
        circle = None
    elif circ == _CIRC_AT_BP:
        circle = 0
    else:
        circle = circ
    return Graph(nv, vertex_of, 0, circle)


def _sigma_for_ordering(g, pos):
    """Half-edge map from g onto the graph rebuilt from its ordered code."""
    order = sorted(range(g.n_edges),
                   key=lambda e: (min(pos[g.vertex_of[2 * e]], pos[g.vertex_of[2 * e + 1]]),
                                  max(pos[g.vertex_of[2 * e]], pos[g.vertex_of[2 * e + 1]]),
                                  e))
    sigma = [0] * g.n_half_edges
    for slot, e in enumerate(order):
        u, v = g.vertex_of[2 * e], g.vertex_of[2 * e + 1]
        if pos[u] <= pos[v]:
            sigma[2 * e], sigma[2 * e + 1] = 2 * slot, 2 * slot + 1
        else:
            sigma[2 * e], sigma[2 * e + 1] = 2 * slot + 1, 2 * slot
    return tuple(sigma)


_canon_cache = {}

def canonical(g):
    """Return (code, sigma, canonical_graph); sigma maps g onto the latter."""
    k = g.key()
    hit = _canon_cache.get(k)
    if hit is not None:
        return hit
    best = None
    best_pos = None
    for pos in _orderings(g):
        code = _code_for_ordering(g, pos)
        if best is None or code < best:
            best, best_pos = code, pos
    cg = decode_code(best)
    sigma = _sigma_for_ordering(g, best_pos)
    out = (best, sigma, cg)
    _canon_cache[k] = out
    return out


def canonical_code(g):
    return canonical(g)[0]


_aut_cache = {}

def automorphisms(g):
    """All automorphisms of g as half-edge permutations.

    Marked vertices (basepoint, circle) are fixed.  Loop inversions and
    permutations of parallel edges are included, so e.g. a rose with n
    petals has 2^n * n! automorphisms.
    """
    k = g.key()
    hit = _aut_cache.get(k)
    if hit is not None:
        return hit

    codes = {}
    for pos in _orderings(g):
        codes.setdefault(_code_for_ordering(g, pos), []).append(tuple(pos))
    argmin = codes[min(codes)]
    pos0 = argmin[0]
    inv0 = [0] * g.nv
    for v in range(g.nv):
        inv0[pos0[v]] = v
    vertex_auts = set()
    for pos in argmin:
        vertex_auts.add(tuple(inv0[pos[v]] for v in range(g.nv)))

    # group edges by (unordered endpoints); loops kept separate per vertex
    par = {}
    for e in range(g.n_edges):
        u, v = g.vertex_of[2 * e], g.vertex_of[2 * e + 1]
        par.setdefault((min(u, v), max(u, v)), []).append(e)
    keys = sorted(par)

    auts = []
    nh = g.n_half_edges
    for tau in sorted(vertex_auts):
        choice_lists = []
        for kk in keys:
            u, v = kk
            src = par[kk]
            tgt = par.get((min(tau[u], tau[v]), max(tau[u], tau[v])))
            if tgt is None or len(tgt) != len(src):
                break
            if u == v:
                opts = [list(zip(src, pm, fl))
                        for pm in itertools.permutations(tgt)
                        for fl in itertools.product((0, 1), repeat=len(src))]
            else:
                opts = [[(e, f, None) for e, f in zip(src, pm)]
                        for pm in itertools.permutations(tgt)]
            choice_lists.append(opts)
        else:
            for combo in itertools.product(*choice_lists):
                sigma = [0] * nh
                ok = True
                for block in combo:
                    for e, f, flip in block:
                        if flip is None:
                            u = g.vertex_of[2 * e]
                            if g.vertex_of[2 * f] == tau[u]:
                                sigma[2 * e], sigma[2 * e + 1] = 2 * f, 2 * f + 1
                            else:
                                sigma[2 * e], sigma[2 * e + 1] = 2 * f + 1, 2 * f
                        else:
                            sigma[2 * e] = 2 * f + flip
                            sigma[2 * e + 1] = 2 * f + (1 - flip)
                if ok:
                    auts.append(tuple(sigma))
    auts = tuple(sorted(set(auts)))
    _aut_cache[k] = auts
    return auts


# -- forests and collapses ------------------------------------------

class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.p[rb] = ra
        return True


def is_forest(g, edges):
    uf = _UF(g.nv)
    for e in edges:
        u, v = g.vertex_of[2 * e], g.vertex_of[2 * e + 1]
        if u == v or not uf.union(u, v):
            return False
    return True


def forests(g, maximal_only=False):
    """All acyclic edge subsets, as sorted frozensets in deterministic order.

    The empty forest is included unless maximal_only is set (a graph all
    of whose edges are loops has only the empty forest, which is then
    its unique maximal one).
    """
    nonloop = [e for e in range(g.n_edges) if not g.is_loop(e)]
    out = []

    def rec(i, chosen):
        out.append(frozenset(chosen))
        for j in range(i, len(nonloop)):
            e = nonloop[j]
            if is_forest(g, chosen + [e]):
                rec(j + 1, chosen + [e])

    rec(0, [])
    if maximal_only:
        def addable(F):
            return any(e not in F and is_forest(g, list(F) + [e]) for e in nonloop)
        out = [F for F in out if not addable(F)]
    else:
        out = [F for F in out]
    return sorted(out, key=lambda F: (len(F), sorted(F)))


def collapse(g, forest):
    """Collapse a forest; returns (quotient, edge_map, vertex_map).

    edge_map sends surviving old edge ids to new ids; vertex_map sends
    old vertices to new ones.  Rank is preserved.
    """
    forest = frozenset(forest)
    for e in forest:
        if g.is_loop(e):
            raise ValueError("forest contains a loop")
    if not is_forest(g, sorted(forest)):
        raise ValueError("edge set is not a forest")
    uf = _UF(g.nv)
    for e in forest:
        uf.union(g.vertex_of[2 * e], g.vertex_of[2 * e + 1])
    roots = sorted({uf.find(v) for v in range(g.nv)})
    newid = {r: i for i, r in enumerate(roots)}
    vmap = [newid[uf.find(v)] for v in range(g.nv)]
    survivors = [e for e in range(g.n_edges) if e not in forest]
    edge_map = {e: i for i, e in enumerate(survivors)}
    vertex_of = []
    for e in survivors:
        vertex_of += [vmap[g.vertex_of[2 * e]], vmap[g.vertex_of[2 * e + 1]]]
    circle = None if g.circle is None else vmap[g.circle]
    q = Graph(len(roots), vertex_of, vmap[g.basepoint], circle)
    return q, edge_map, vmap


def descend_perm(g, sigma, forest, edge_map):
    """Push an automorphism preserving `forest` down the collapse."""
    em = perm_edge_map(sigma)
    if {em[e] for e in forest} != set(forest):
        raise ValueError("automorphism does not preserve the forest")
    nh = 2 * len(edge_map)
    out = [0] * nh
    for e, ne in edge_map.items():
        fe = em[e]
        o = sigma[2 * e] & 1
        out[2 * ne] = 2 * edge_map[fe] + o
        out[2 * ne + 1] = 2 * edge_map[fe] + (1 - o)
    return tuple(out)


# -- relabelings (for invariance tests) -----------------------------

def relabeled(g, rng=None):
    """Random structure-preserving relabeling of vertices/edges/orientations."""
    rng = rng or random
    vperm = list(range(g.nv))
    rng.shuffle(vperm)
    eperm = list(range(g.n_edges))
    rng.shuffle(eperm)
    vertex_of = [0] * g.n_half_edges
    for e in range(g.n_edges):
        flip = rng.randrange(2)
        ne = eperm[e]
        vertex_of[2 * ne + flip] = vperm[g.vertex_of[2 * e]]
        vertex_of[2 * ne + 1 - flip] = vperm[g.vertex_of[2 * e + 1]]
    circle = None if g.circle is None else vperm[g.circle]
    return Graph(g.nv, vertex_of, vperm[g.basepoint], circle)


# -- presets --------------------------------------------------------

def _from_edges(nv, pairs, bp=0, circle=None):
    vertex_of = []
    for u, v in pairs:
        vertex_of += [u, v]
    return Graph(nv, vertex_of, bp, circle)


def rose(n):
    if n < 0:
        raise ValueError("rose needs n >= 0 petals")
    return _from_edges(1, [(0, 0)] * n)


def theta(p):
    """Two vertices joined by p parallel edges; basepoint on the left."""
    if p < 2:
        raise ValueError("theta graph needs p >= 2 edges")
    return _from_edges(2, [(0, 1)] * p)


def rose_theta_rose(k, p, m):
    """R_k wedge theta wedge R_m: k loops at the basepoint, m at the far end."""
    if p < 2 or k < 0 or m < 0:
        raise ValueError("invalid rose/theta wedge parameters")
    return _from_edges(2, [(0, 1)] * p + [(0, 0)] * k + [(1, 1)] * m)


def phi_graph(p):
    """3p edges a_i: x->v_i, b_i: y->v_i, c_i: z->v_i; basepoint x."""
    if p < 3:
        raise ValueError("phi needs an odd prime p >= 3")
    x, y, z = 0, 1, 2
    pairs = [(x, 3 + i) for i in range(p)]
    pairs += [(y, 3 + i) for i in range(p)]
    pairs += [(z, 3 + i) for i in range(p)]
    return _from_edges(p + 3, pairs)


def psi_graph(p):
    """Two theta graphs wedged at the basepoint (phi with the a-edges collapsed)."""
    if p < 3:
        raise ValueError("psi needs p >= 3")
    return _from_edges(3, [(0, 1)] * p + [(0, 2)] * p)


def omega_graph(p):
    """Chain of two theta graphs with the basepoint at one end."""
    if p < 3:
        raise ValueError("omega needs p >= 3")
    return _from_edges(3, [(0, 1)] * p + [(1, 2)] * p)


def xi_graph(p):
    """1-skeleton of the cone over a p-gon, basepoint at the hub."""
    if p < 3:
        raise ValueError("xi needs p >= 3")
    pairs = [(0, 1 + i) for i in range(p)]
    pairs += [(1 + i, 1 + (i + 1) % p) for i in range(p)]
    return _from_edges(p + 1, pairs)


def point_graph():
    return Graph(1, [], 0, None)


def with_circle(g, v):
    return Graph(g.nv, g.vertex_of, g.basepoint, v)


_PRESETS = {
    "rose": (rose, ("n",)),
    "theta": (theta, ("p",)),
    "phi": (phi_graph, ("p",)),
    "psi": (psi_graph, ("p",)),
    "omega": (omega_graph, ("p",)),
    "xi": (xi_graph, ("p",)),
    "point": (point_graph, ()),
    "rose_theta_rose": (rose_theta_rose, ("k", "p", "m")),
}


def build_preset(name, **params):
    """Construct a named graph; raises ValueError on bad name/parameters."""
    if name not in _PRESETS:
        raise ValueError("unknown preset %r (have %s)" % (name, sorted(_PRESETS)))
    fn, argnames = _PRESETS[name]
    missing = [a for a in argnames if a not in params]
    extra = [a for a in params if a not in argnames]
    if missing or extra:
        raise ValueError("preset %r expects parameters %s" % (name, argnames))
    return fn(*[params[a] for a in argnames])


# -- cells: (graph, nested forests, symmetry group) canonical keys --

def subgroup_elements(degree, gens):
    """Closure of half-edge permutations under composition."""
    if not gens:
        return frozenset([perm_identity(degree)])
    els = set(gens)
    els.add(perm_identity(degree))
    frontier = list(els)
    while frontier:
        new = []
        for a in gens:
            for b in frontier:
                c = perm_compose(a, b)
                if c not in els:
                    els.add(c)
                    new.append(c)
        frontier = new
    return frozenset(els)


def cell_key(g, gens=(), flags=()):
    """Canonical key of (graph, symmetry subgroup, forest flag) up to
    marked-point-preserving isomorphism; the subgroup is compared as a
    set which makes the equivalence twist-insensitive.

    Returns (key, sigma) where sigma is a half-edge map from g to the
    canonical graph realizing the key.
    """
    code, sigma0, cg = canonical(g)
    auts = automorphisms(cg)
    elems = subgroup_elements(g.n_half_edges, gens) if gens else None
    base_elems = None
    if elems is not None:
        base_elems = [perm_conj(sigma0, x) for x in elems]
    em0 = perm_edge_map(sigma0)
    base_flags = [sorted(em0[e] for e in F) for F in flags]
    best = None
    best_sigma = None
    for a in auts:
        aem = perm_edge_map(a)
        fi = tuple(tuple(sorted(aem[e] for e in F)) for F in base_flags)
        if base_elems is not None:
            gi = tuple(sorted(perm_conj(a, x) for x in base_elems))
        else:
            gi = ()
        cand = (gi, fi)
        if best is None or cand < best:
            best = cand
            best_sigma = perm_compose(a, sigma0)
    return (code, best), best_sigma


# -- DOT export -----------------------------------------------------

def to_dot(g, name="graph"):
    """Graphviz output; basepoint filled, circle drawn as an open node."""
    lines = ["graph %s {" % name]
    for v in range(g.nv):
        style = []
        if v == g.basepoint:
            style.append('style=filled fillcolor=black fontcolor=white')
        elif v == g.circle:
            style.append('shape=circle style=bold')
        lines.append('  v%d [label="%d" %s];' % (v, v, " ".join(style)))
    for i, (u, v) in enumerate(g.edges()):
        lines.append("  v%d -- v%d [label=\"e%d\"];" % (u, v, i))
    lines.append("}")
    return "\n".join(lines)
