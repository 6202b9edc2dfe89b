"""Small permutation groups on half-edges, by full element enumeration.

Everything here assumes group orders well under 10^5 (the largest
automorphism group we meet is (S_5 x S_5) x| Z/2 of order 28800), so
closure, normalizers, centralizers and subgroup searches are done by
direct enumeration rather than stabilizer chains.
"""

from __future__ import annotations

from .graphs import (perm_compose, perm_conj, perm_identity, perm_inverse,
                     subgroup_elements)


class PermGroup:
    """A group of half-edge permutations with a full element list."""

    def __init__(self, degree, elements=None, gens=()):
        self.degree = degree
        self.gens = tuple(gens)
        if elements is None:
            elements = subgroup_elements(degree, self.gens)
        self.elements = frozenset(elements)

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, perm):
        return perm in self.elements

    def __le__(self, other):
        return self.elements <= other.elements

    def __eq__(self, other):
        return isinstance(other, PermGroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def sorted_elements(self):
        return sorted(self.elements)

    def __repr__(self):
        return "PermGroup(degree=%d, order=%d)" % (self.degree, self.order)


def from_elements(degree, elements):
    return PermGroup(degree, elements=frozenset(elements))


def element_order(x):
    n = 1
    y = x
    ident = perm_identity(len(x))
    while y != ident:
        y = perm_compose(y, x)
        n += 1
    return n


def conjugate_set(s, elems):
    return frozenset(perm_conj(s, x) for x in elems)


def normalizer(P, H):
    """N_P(H) for H given as a PermGroup contained in P."""
    if not H.elements <= P.elements:
        raise ValueError("H is not a subgroup of P")
    hs = H.elements
    keep = [g for g in P.elements if conjugate_set(g, hs) == hs]
    return from_elements(P.degree, keep)


def centralizer(P, H):
    if not H.elements <= P.elements:
        raise ValueError("H is not a subgroup of P")
    keep = [g for g in P.elements
            if all(perm_compose(g, h) == perm_compose(h, g) for h in H.elements)]
    return from_elements(P.degree, keep)


def is_elementary_abelian(H, p):
    ident = perm_identity(H.degree)
    for a in H.elements:
        if a != ident and element_order(a) != p:
            return False
        for b in H.elements:
            if perm_compose(a, b) != perm_compose(b, a):
                return False
    return True


def subgroups_of_order(P, order, p):
    """Conjugacy-class representatives (within P) of subgroups of the order.

    Only orders p and p^2 are supported; returned groups carry an
    `elementary` attribute on the side via is_elementary_abelian.
    """
    if order not in (p, p * p):
        raise ValueError("only orders p and p^2 are supported")
    ident = perm_identity(P.degree)
    p_elems = [x for x in P.elements if element_order(x) == p]
    subs = set()
    if order == p:
        for x in p_elems:
            subs.add(subgroup_elements(P.degree, (x,)))
    else:
        cyc = {}
        for x in p_elems:
            cyc.setdefault(subgroup_elements(P.degree, (x,)), x)
        cyclics = sorted(cyc.items(), key=lambda kv: sorted(kv[0]))
        for C, x in cyclics:
            for y in p_elems:
                if y in C:
                    continue
                if perm_compose(x, y) != perm_compose(y, x):
                    continue
                H = subgroup_elements(P.degree, (x, y))
                if len(H) == order:
                    subs.add(H)
        # also non-elementary subgroups generated by order-p^2 elements
        for x in P.elements:
            if element_order(x) == p * p:
                subs.add(subgroup_elements(P.degree, (x,)))
    # conjugacy classes within P
    reps = []
    seen = set()
    for H in sorted(subs, key=lambda H: sorted(H)):
        if H in seen:
            continue
        orbit = {conjugate_set(g, H) for g in P.elements}
        seen |= orbit
        reps.append(from_elements(P.degree, H))
    return reps


def sylow_p(S, p):
    """A Sylow p-subgroup of a small group S (abelian of rank <= 2 here).

    Raises if the Sylow subgroup is not abelian of order dividing p^2,
    which is all this engine ever needs.
    """
    n = S.order
    nu = 0
    while n % p == 0:
        n //= p
        nu += 1
    if nu == 0:
        return from_elements(S.degree, [perm_identity(S.degree)]), 0
    if nu > 2:
        raise ValueError("p-valuation > 2 not supported")
    p_elems = [x for x in S.elements if element_order(x) == p]
    target = p ** nu
    # abelian Sylow: try subgroups generated by commuting p-elements
    for x in sorted(p_elems):
        H = subgroup_elements(S.degree, (x,))
        if len(H) == target:
            return from_elements(S.degree, H), nu
        for y in sorted(p_elems):
            if y in H or perm_compose(x, y) != perm_compose(y, x):
                continue
            H2 = subgroup_elements(S.degree, (x, y))
            if len(H2) == target:
                return from_elements(S.degree, H2), nu
    raise ValueError("no abelian Sylow p-subgroup found (order %d, p=%d)" % (S.order, p))


def sylow_basis(P, p):
    """Independent generators (1 or 2) of an elementary abelian p-group."""
    ident = perm_identity(P.degree)
    if P.order == 1:
        return ()
    if not is_elementary_abelian(P, p):
        raise ValueError("Sylow subgroup is not elementary abelian")
    els = sorted(P.elements)
    g1 = next(x for x in els if x != ident)
    span = subgroup_elements(P.degree, (g1,))
    if P.order == p:
        return (g1,)
    g2 = next(x for x in els if x not in span)
    return (g1, g2)


def dlog(basis, p, x):
    """Exponent vector of x in the elementary abelian group spanned by basis."""
    degree = len(x)
    table = {}
    def powers(g):
        out = [perm_identity(degree)]
        for _ in range(p - 1):
            out.append(perm_compose(out[-1], g))
        return out
    if len(basis) == 1:
        for i, a in enumerate(powers(basis[0])):
            table[a] = (i,)
    else:
        pa, pb = powers(basis[0]), powers(basis[1])
        for i in range(p):
            for j in range(p):
                table[perm_compose(pa[i], pb[j])] = (i, j)
    if x not in table:
        raise ValueError("element not in span of basis")
    return table[x]


def weyl_matrices(S, sylow, basis, p):
    """Images in GL(nu, F_p) of the conjugation action of N_S(sylow).

    This is the Weyl datum consumed by the Swan-invariant machinery.
    """
    if not basis:
        return (((1,),),)  # placeholder, never used for rank 0
    N = normalizer(S, sylow)
    mats = set()
    for s in N.elements:
        cols = []
        for g in basis:
            cols.append(dlog(basis, p, perm_conj(s, g)))
        # matrix with M[i][j] = exponent of basis[i] in image of basis[j]
        nu = len(basis)
        M = tuple(tuple(cols[j][i] % p for j in range(nu)) for i in range(nu))
        mats.add(M)
    return tuple(sorted(mats))
