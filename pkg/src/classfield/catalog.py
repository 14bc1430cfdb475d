"""Constructions for small groups and the verification catalog.

The catalog holds every group of order <= 16 (one per isomorphism class)
plus S4; the named fixtures S3, A4, D4, Q8 and C2xC2xC2 are members.  All
builders produce Cayley-table groups with identity at index 0.
"""

from __future__ import annotations

from functools import lru_cache

from .groups import FiniteGroup, quotient_group


def cyclic(n: int, name: str | None = None) -> FiniteGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, name=name or f"C{n}", validate=False)


def direct_product(g: FiniteGroup, h: FiniteGroup,
                   name: str | None = None) -> FiniteGroup:
    ng, nh = g.order, h.order
    n = ng * nh
    table = [[0] * n for _ in range(n)]
    for a1 in range(ng):
        for b1 in range(nh):
            i = a1 * nh + b1
            row = table[i]
            for a2 in range(ng):
                ga = g.table[a1][a2]
                for b2 in range(nh):
                    row[a2 * nh + b2] = ga * nh + h.table[b1][b2]
    return FiniteGroup(table, name=name or f"{g.name}x{h.name}", validate=False)


def semidirect_product(n: FiniteGroup, h: FiniteGroup, action,
                       name: str = "NxH") -> FiniteGroup:
    """N x| H with ``action[b]`` the automorphism of N induced by b in H.

    Automorphisms are given as full image lists on N's elements and are
    validated together with the cocycle condition.
    """
    for b in range(h.order):
        phi = action[b]
        if sorted(phi) != list(range(n.order)):
            raise ValueError("action image is not a permutation")
        for x in range(n.order):
            for y in range(n.order):
                if phi[n.table[x][y]] != n.table[phi[x]][phi[y]]:
                    raise ValueError("action is not by automorphisms")
    for b1 in range(h.order):
        for b2 in range(h.order):
            composed = [action[b1][action[b2][x]] for x in range(n.order)]
            if composed != list(action[h.table[b1][b2]]):
                raise ValueError("action does not respect the H relations")
    size = n.order * h.order
    table = [[0] * size for _ in range(size)]
    for a1 in range(n.order):
        for b1 in range(h.order):
            i = a1 * h.order + b1
            row = table[i]
            for a2 in range(n.order):
                twisted = action[b1][a2]
                na = n.table[a1][twisted]
                for b2 in range(h.order):
                    row[a2 * h.order + b2] = na * h.order + h.table[b1][b2]
    return FiniteGroup(table, name=name, validate=False)


def dihedral(n: int, name: str | None = None) -> FiniteGroup:
    """Dihedral group of order 2n."""
    c = cyclic(n)
    flip = [(-i) % n for i in range(n)]
    ident = list(range(n))
    return semidirect_product(c, cyclic(2), [ident, flip],
                              name=name or f"D{n}")


def dicyclic(n: int, name: str | None = None) -> FiniteGroup:
    """Dicyclic group of order 4n (n=2 gives Q8, n=4 gives Q16).

    Elements a^i b^j with a of order 2n, b^2 = a^n, b a b^-1 = a^-1.
    """
    size = 4 * n

    def idx(i, j):
        return (i % (2 * n)) * 2 + (j % 2)

    table = [[0] * size for _ in range(size)]
    for i1 in range(2 * n):
        for j1 in range(2):
            for i2 in range(2 * n):
                for j2 in range(2):
                    if j1 == 0:
                        i, j = i1 + i2, j2
                    elif j2 == 0:
                        i, j = i1 - i2, 1
                    else:
                        i, j = i1 - i2 + n, 0
                    table[idx(i1, j1)][idx(i2, j2)] = idx(i, j)
    return FiniteGroup(table, name=name or f"Dic{n}", validate=False)


def symmetric(n: int, name: str | None = None) -> FiniteGroup:
    gens = []
    if n >= 2:
        gens.append([1, 0] + list(range(2, n)))
    if n >= 3:
        gens.append(list(range(1, n)) + [0])
    return FiniteGroup.from_permutations(n, gens or [list(range(n))],
                                         name=name or f"S{n}")

def alternating(n: int, name: str | None = None) -> FiniteGroup:
    gens = []
    if n >= 3:
        gens.append([1, 2, 0] + list(range(3, n)))
    if n >= 4:
        if n % 2:
            gens.append(list(range(1, n)) + [0])
        else:
            gens.append([0] + list(range(2, n)) + [1])
    return FiniteGroup.from_permutations(n, gens or [list(range(n))],
                                         name=name or f"A{n}")


def _cyclic_twist(n: int, k: int) -> list[int]:
    return [(k * i) % n for i in range(n)]


def _mod16(name: str, k: int) -> FiniteGroup:
    """C8 x| C2 with the involution acting by x -> x^k."""
    ident = list(range(8))
    return semidirect_product(cyclic(8), cyclic(2),
                              [ident, _cyclic_twist(8, k)], name=name)


def _c4_sd_c4() -> FiniteGroup:
    """C4 x| C4, generator of the acting C4 inverting the normal C4."""
    ident = list(range(4))
    invert = _cyclic_twist(4, 3)
    return semidirect_product(cyclic(4), cyclic(4),
                              [ident, invert, ident, invert], name="C4sdC4")


def _c2c2_sd_c4() -> FiniteGroup:
    """(C2xC2) x| C4 with the generator of C4 swapping the coordinates."""
    klein = direct_product(cyclic(2), cyclic(2))
    ident = list(range(4))
    swap = [0, 2, 1, 3]
    return semidirect_product(klein, cyclic(4), [ident, swap, ident, swap],
                              name="C2C2sdC4")


def _central_product_d4_c4() -> FiniteGroup:
    """Central product D4 o C4 (the order-16 Pauli group)."""
    d4 = dihedral(4)
    big = direct_product(d4, cyclic(4))
    # r^2 in D4 = (2,0) -> index 4; x^2 in C4 = 2; diagonal involution:
    z = 4 * 4 + 2
    center = big.generated_subgroup([z])
    q, _ = quotient_group(big, center, name="D4oC4")
    return q


@lru_cache(maxsize=1)
def catalog() -> dict[str, FiniteGroup]:
    """Named verification catalog: all groups of order <= 16, plus S4."""
    c2, c3, c4 = cyclic(2), cyclic(3), cyclic(4)
    groups = [
        cyclic(1), c2, c3,
        c4, direct_product(c2, c2, name="C2xC2"),
        cyclic(5),
        cyclic(6), symmetric(3),
        cyclic(7),
        cyclic(8), direct_product(c4, c2, name="C4xC2"),
        direct_product(direct_product(c2, c2), c2, name="C2xC2xC2"),
        dihedral(4, name="D4"), dicyclic(2, name="Q8"),
        cyclic(9), direct_product(c3, c3, name="C3xC3"),
        cyclic(10), dihedral(5),
        cyclic(11),
        cyclic(12), direct_product(c2, cyclic(6), name="C2xC6"),
        dihedral(6), alternating(4), dicyclic(3),
        cyclic(13),
        cyclic(14), dihedral(7),
        cyclic(15),
        cyclic(16), direct_product(c4, c4, name="C4xC4"),
        direct_product(cyclic(8), c2, name="C8xC2"),
        direct_product(direct_product(c4, c2), c2, name="C4xC2xC2"),
        direct_product(direct_product(c2, c2),
                       direct_product(c2, c2), name="C2^4"),
        dihedral(8), _mod16("SD16", 3), _mod16("M16", 5), dicyclic(4, name="Q16"),
        direct_product(dihedral(4), c2, name="D4xC2"),
        direct_product(dicyclic(2), c2, name="Q8xC2"),
        _c4_sd_c4(), _c2c2_sd_c4(), _central_product_d4_c4(),
        symmetric(4),
    ]
    return {g.name: g for g in groups}
