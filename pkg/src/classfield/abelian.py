"""Exact arithmetic for finitely generated abelian groups.

Every group is kept in Smith normal form: a free rank together with an
ascending divisibility chain of invariant factors (each >= 2).  Canonical
coordinates list the torsion generators first, then the free generators,
so a coordinate vector for ``FgAbGroup(r, (f1, ..., ft))`` has ``t + r``
entries and entry ``i < t`` is reduced modulo ``f_i``.

All the lattice machinery (kernels, preimages, intersections, integer
solving) runs over plain Python integers, so there is no overflow and no
floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as _iproduct

Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# integer matrix utilities
# ---------------------------------------------------------------------------

def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise ValueError("matrix shape mismatch")
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            aik = ai[k]
            if aik:
                bk = b[k]
                for j in range(cols):
                    oi[j] += aik * bk[j]
    return out


def mat_vec(a, v) -> list[int]:
    return [sum(ai[k] * v[k] for k in range(len(v))) for ai in a]


@dataclass
class SmithDecomposition:
    """Witnessed Smith normal form: left @ M @ right is diagonal."""

    diagonal: list[int]
    left: Matrix
    right: Matrix
    left_inv: Matrix
    right_inv: Matrix


def smith_decompose(m: Matrix) -> SmithDecomposition:
    """Diagonalize an integer matrix with unimodular transforms.

    Returns nonnegative diagonal entries forming a divisibility chain
    (zeros trailing).  ``left @ m @ right`` equals the diagonal matrix and
    the inverse transforms are tracked alongside.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(row) for row in m]
    left, left_inv = identity_matrix(rows), identity_matrix(rows)
    right, right_inv = identity_matrix(cols), identity_matrix(cols)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]
        for r in left_inv:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in right:
            r[i], r[j] = r[j], r[i]
        right_inv[i], right_inv[j] = right_inv[j], right_inv[i]

    def row_add(i, j, q):
        # row i += q * row j
        if not q:
            return
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        left[i] = [x + q * y for x, y in zip(left[i], left[j])]
        for r in left_inv:
            r[j] -= q * r[i]

    def col_add(i, j, q):
        # col i += q * col j
        if not q:
            return
        for r in a:
            r[i] += q * r[j]
        for r in right:
            r[i] += q * r[j]
        right_inv[j] = [x - q * y for x, y in zip(right_inv[j], right_inv[i])]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        left[i] = [-x for x in left[i]]
        for r in left_inv:
            r[i] = -r[i]

    n = min(rows, cols)
    t = 0
    while t < n:
        # locate a pivot of minimal absolute value in the remaining block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, pivot = v, (i, j)
        if pivot is None:
            break
        i, j = pivot
        if i != t:
            row_swap(t, i)
        if j != t:
            col_swap(t, j)
        # clear row t and column t; restart whenever a remainder survives
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                q = a[i][t] // a[t][t]
                row_add(i, t, -q)
                if a[i][t]:
                    row_swap(t, i)
                    dirty = True
            for j in range(t + 1, cols):
                q = a[t][j] // a[t][t]
                col_add(j, t, -q)
                if a[t][j]:
                    col_swap(t, j)
                    dirty = True
        if a[t][t] < 0:
            row_negate(t)
        # enforce divisibility against the untouched block
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_add(t, offender, 1)
            continue
        t += 1
    diagonal = [a[i][i] for i in range(n)]
    return SmithDecomposition(diagonal, left, right, left_inv, right_inv)


def kernel_basis(m: Matrix, cols: int | None = None) -> list[list[int]]:
    """Columns generating the integer kernel lattice of ``m``.

    ``cols`` must be passed when ``m`` has no rows (the matrix itself
    then carries no column count).
    """
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if rows else 0
    if cols == 0:
        return []
    if rows == 0:
        return [col for col in identity_matrix(cols)]
    snf = smith_decompose(m)
    basis = []
    for j in range(cols):
        d = snf.diagonal[j] if j < len(snf.diagonal) else 0
        if d == 0:
            basis.append([snf.right[i][j] for i in range(cols)])
    return basis


def solve_integer(m: Matrix, b: list[int], cols: int | None = None) -> list[int] | None:
    """One integer solution of ``m @ x = b``, or None."""
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if rows else 0
    if rows == 0:
        return [0] * cols
    if cols == 0:
        return [] if all(v == 0 for v in b) else None
    snf = smith_decompose(m)
    ub = mat_vec(snf.left, b)
    y = [0] * cols
    for i in range(rows):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % d:
                return None
            if i < cols:
                y[i] = ub[i] // d
    return mat_vec(snf.right, y)


def columns(mats: list[list[int]]) -> Matrix:
    """Assemble column vectors into a matrix (all the same length)."""
    if not mats:
        return []
    k = len(mats[0])
    return [[col[i] for col in mats] for i in range(k)]


def lattice_preimage(m: Matrix, target_cols: list[list[int]],
                     cols: int | None = None) -> list[list[int]]:
    """Columns generating ``{x : m @ x in lattice(target_cols)}``."""
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if rows else 0
    if rows == 0:
        return [col for col in identity_matrix(cols)]
    s = len(target_cols)
    stacked = [list(m[i]) + [-target_cols[j][i] for j in range(s)] for i in range(rows)]
    ker = kernel_basis(stacked, cols=cols + s)
    return [vec[:cols] for vec in ker]


# ---------------------------------------------------------------------------
# groups and homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FgAbGroup:
    """Finitely generated abelian group in Smith normal form."""

    free_rank: int
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        fs = tuple(int(f) for f in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", fs)
        prev = None
        for f in fs:
            if f < 2:
                raise ValueError("invariant factors must be >= 2")
            if prev is not None and f % prev:
                raise ValueError("invariant factors must form a divisibility chain")
            prev = f

    @property
    def rank(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate modulus, 0 meaning a free coordinate."""
        return self.invariant_factors + (0,) * self.free_rank

    def reduce(self, vector) -> tuple[int, ...]:
        mods = self.moduli
        if len(vector) != len(mods):
            raise ValueError("coordinate length mismatch")
        return tuple(v % m if m else v for v, m in zip(vector, mods))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, x, y) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(x, y)])

    def neg(self, x) -> tuple[int, ...]:
        return self.reduce([-a for a in x])

    def scale(self, n: int, x) -> tuple[int, ...]:
        return self.reduce([n * a for a in x])

    def is_trivial(self) -> bool:
        return self.rank == 0

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def elements(self):
        """Iterate all coordinate vectors (finite groups only)."""
        if not self.is_finite():
            raise ValueError("cannot enumerate an infinite group")
        return _iproduct(*(range(f) for f in self.invariant_factors))

    def element_order(self, x) -> int | float:
        x = self.reduce(x)
        if any(v and m == 0 for v, m in zip(x, self.moduli)):
            return math.inf
        n = 1
        for v, m in zip(x, self.moduli):
            if v:
                n = math.lcm(n, m // math.gcd(v, m))
        return n

    def relation_columns(self) -> list[list[int]]:
        """Columns generating the relation lattice in Z^rank."""
        k = self.rank
        cols = []
        for i, f in enumerate(self.invariant_factors):
            col = [0] * k
            col[i] = f
            cols.append(col)
        return cols

    def __str__(self):
        parts = [f"Z/{f}" for f in self.invariant_factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank,
                "invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, data: dict) -> "FgAbGroup":
        return cls(data["free_rank"], tuple(data.get("invariant_factors", ())))


def group_order(a: FgAbGroup) -> int | float:
    """Product of the invariant factors, or math.inf when free rank > 0."""
    if a.free_rank:
        return math.inf
    return math.prod(a.invariant_factors)


@dataclass(frozen=True)
class AbHom:
    """Homomorphism between groups in normal form, as an integer matrix.

    Column j holds the image of the j-th canonical domain generator;
    composition is matrix product.
    """

    domain: FgAbGroup
    codomain: FgAbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows, cols = self.codomain.rank, self.domain.rank
        m = self.matrix
        if len(m) != rows or any(len(r) != cols for r in m):
            raise ValueError(f"matrix must be {rows}x{cols}")
        cod_mods = self.codomain.moduli
        norm = tuple(
            tuple(v % cm if cm else v for v in row)
            for row, cm in zip(m, cod_mods)
        )
        object.__setattr__(self, "matrix", norm)
        # well-definedness: torsion generators must map to killed elements
        for j, f in enumerate(self.domain.invariant_factors):
            for i, cm in enumerate(cod_mods):
                v = f * norm[i][j]
                if (v % cm if cm else v) != 0:
                    raise ValueError(
                        f"column {j} does not respect torsion modulus {f}")

    def __call__(self, vector) -> tuple[int, ...]:
        vector = self.domain.reduce(vector)
        return self.codomain.reduce(mat_vec([list(r) for r in self.matrix], list(vector)))

    def compose(self, other: "AbHom") -> "AbHom":
        """self after other."""
        if other.codomain != self.domain:
            raise ValueError("composition mismatch")
        rows, inner, cols = self.codomain.rank, self.domain.rank, other.domain.rank
        m = tuple(
            tuple(sum(self.matrix[i][k] * other.matrix[k][j]
                      for k in range(inner)) for j in range(cols))
            for i in range(rows))
        return AbHom(other.domain, self.codomain, m)

    def __eq__(self, other):
        if not isinstance(other, AbHom):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.domain, self.codomain, self.matrix))

    def add(self, other: "AbHom") -> "AbHom":
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ValueError("sum of homs needs equal (co)domains")
        m = tuple(tuple(a + b for a, b in zip(ra, rb))
                  for ra, rb in zip(self.matrix, other.matrix))
        return AbHom(self.domain, self.codomain, m)

    def scaled(self, n: int) -> "AbHom":
        return AbHom(self.domain, self.codomain,
                     tuple(tuple(n * v for v in row) for row in self.matrix))

    @staticmethod
    def identity(a: FgAbGroup) -> "AbHom":
        return AbHom(a, a, tuple(tuple(r) for r in identity_matrix(a.rank)))

    @staticmethod
    def zero(domain: FgAbGroup, codomain: FgAbGroup) -> "AbHom":
        return AbHom(domain, codomain,
                     tuple((0,) * domain.rank for _ in range(codomain.rank)))

    @staticmethod
    def multiplication(a: FgAbGroup, n: int) -> "AbHom":
        return AbHom.identity(a).scaled(n)

    @staticmethod
    def from_columns(domain: FgAbGroup, codomain: FgAbGroup,
                     cols: list[list[int]]) -> "AbHom":
        if len(cols) != domain.rank:
            raise ValueError("one column per domain generator required")
        return AbHom(domain, codomain,
                     tuple(tuple(col[i] for col in cols) for i in range(codomain.rank)))

    def image_generators(self) -> list[list[int]]:
        return [[self.matrix[i][j] for i in range(self.codomain.rank)]
                for j in range(self.domain.rank)]

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(),
                "codomain": self.codomain.to_json(),
                "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, data: dict) -> "AbHom":
        return cls(FgAbGroup.from_json(data["domain"]),
                   FgAbGroup.from_json(data["codomain"]),
                   tuple(tuple(r) for r in data["matrix"]))


# ---------------------------------------------------------------------------
# subgroups, kernels, quotients
# ---------------------------------------------------------------------------

def presentation_from_lattice(k: int, rel_cols: list[list[int]]):
    """Normal form of Z^k modulo the lattice spanned by rel_cols.

    Returns (group, to_new, from_new): ``to_new`` maps old coordinates to
    normal-form coordinates and ``from_new`` holds, per new generator, an
    old-coordinate representative.
    """
    if not rel_cols:
        snf = SmithDecomposition([], identity_matrix(k), [], identity_matrix(k), [])
        diag = []
    else:
        snf = smith_decompose(columns(rel_cols))
        diag = snf.diagonal
    kept = []  # (old row index, modulus) with modulus 0 for free rows
    for i in range(k):
        d = diag[i] if i < len(diag) else 0
        if d == 1:
            continue
        kept.append((i, d))
    # torsion rows first (snf order is already divisibility-ascending)
    torsion = [(i, d) for i, d in kept if d != 0]
    free = [(i, d) for i, d in kept if d == 0]
    ordered = torsion + free
    group = FgAbGroup(len(free), tuple(d for _, d in torsion))
    u = snf.left
    u_inv = snf.left_inv

    rows = [u[i] for i, _ in ordered]

    def to_new(vector):
        return group.reduce(mat_vec(rows, list(vector)))

    from_new = [[u_inv[r][i] for r in range(k)] for i, _ in ordered]
    return group, to_new, from_new


def subgroup_from_generators(ambient: FgAbGroup, gens: list) -> tuple[FgAbGroup, AbHom]:
    """Abstract presentation of the subgroup generated by ``gens``.

    Returns the subgroup in normal form with an injective AbHom into the
    ambient group.
    """
    gens = [list(ambient.reduce(g)) for g in gens]
    if not gens:
        s = FgAbGroup(0)
        return s, AbHom(s, ambient, tuple(() for _ in range(ambient.rank)))
    w = columns(gens)
    rel = lattice_preimage(w, ambient.relation_columns(), cols=len(gens))
    s, _, from_new = presentation_from_lattice(len(gens), rel)
    embed_cols = [ambient.reduce(mat_vec(w, rep)) for rep in from_new]
    embed = AbHom.from_columns(s, ambient, [list(c) for c in embed_cols])
    return s, embed


def quotient(ambient: FgAbGroup, gens: list) -> tuple[FgAbGroup, AbHom]:
    """Quotient of ``ambient`` by the subgroup generated by ``gens``."""
    rel = ambient.relation_columns() + [list(ambient.reduce(g)) for g in gens]
    q, to_new, _ = presentation_from_lattice(ambient.rank, rel)
    cols = [list(to_new([1 if i == j else 0 for i in range(ambient.rank)]))
            for j in range(ambient.rank)]
    proj = AbHom.from_columns(ambient, q, cols)
    return q, proj


def hom_kernel(h: AbHom) -> tuple[FgAbGroup, AbHom]:
    """Kernel of a homomorphism with its embedding into the domain."""
    m = [list(r) for r in h.matrix]
    pre = lattice_preimage(m, h.codomain.relation_columns(), cols=h.domain.rank)
    return subgroup_from_generators(h.domain, pre)


def hom_image(h: AbHom) -> tuple[FgAbGroup, AbHom]:
    """Image of a homomorphism as a subgroup of the codomain."""
    return subgroup_from_generators(h.codomain, h.image_generators())


def hom_cokernel(h: AbHom) -> tuple[FgAbGroup, AbHom]:
    """Cokernel of a homomorphism, with the projection from the codomain."""
    return quotient(h.codomain, h.image_generators())


def is_surjective(h: AbHom) -> bool:
    coker, _ = hom_cokernel(h)
    return coker.is_trivial()

def is_injective(h: AbHom) -> bool:
    ker, _ = hom_kernel(h)
    return ker.is_trivial()


def is_isomorphism(h: AbHom) -> bool:
    return is_injective(h) and is_surjective(h)


def invert_isomorphism(h: AbHom) -> AbHom:
    """Inverse of an isomorphism (raises when h is not one)."""
    cols = []
    for j in range(h.codomain.rank):
        e = [1 if i == j else 0 for i in range(h.codomain.rank)]
        x = element_preimage(h, e)
        if x is None:
            raise ValueError("homomorphism is not surjective")
        cols.append(list(x))
    inv = AbHom.from_columns(h.codomain, h.domain, cols)
    if inv.compose(h) != AbHom.identity(h.domain):
        raise ValueError("homomorphism is not injective")
    return inv


def element_preimage(h: AbHom, y) -> tuple[int, ...] | None:
    """Some x with h(x) = y, or None."""
    y = list(h.codomain.reduce(y))
    m = [list(r) for r in h.matrix]
    rel = h.codomain.relation_columns()
    s = len(rel)
    stacked = [m[i] + [rel[j][i] for j in range(s)] for i in range(len(m))]
    x = solve_integer(stacked, y, cols=h.domain.rank + s)
    if x is None:
        return None
    return h.domain.reduce(x[: h.domain.rank])


def subgroup_contains(ambient: FgAbGroup, gens: list, x) -> bool:
    """Is x in the subgroup of ambient generated by gens?"""
    if not gens:
        return all(v == 0 for v in ambient.reduce(x))
    w = columns([list(ambient.reduce(g)) for g in gens])
    rel = ambient.relation_columns()
    stacked = [w[i] + [rel[j][i] for j in range(len(rel))] for i in range(len(w))]
    return solve_integer(stacked, list(ambient.reduce(x)),
                         cols=len(gens) + len(rel)) is not None


def subgroups_equal(ambient: FgAbGroup, gens_a: list, gens_b: list) -> bool:
    return (all(subgroup_contains(ambient, gens_b, g) for g in gens_a)
            and all(subgroup_contains(ambient, gens_a, g) for g in gens_b))


def subgroup_intersection(ambient: FgAbGroup, gens_a: list, gens_b: list) -> list:
    """Generators of the intersection of two subgroups of ``ambient``."""
    rel = ambient.relation_columns()
    a = [list(ambient.reduce(g)) for g in gens_a]
    b = [list(ambient.reduce(g)) for g in gens_b]
    wa = columns(a + rel)
    wb = columns(b + rel)
    if not a and not rel:
        return []
    na = len(a) + len(rel)
    k = ambient.rank
    if not wa:
        wa = [[] for _ in range(k)]
    if not wb:
        wb = [[] for _ in range(k)]
    stacked = [wa[i] + [-v for v in wb[i]] for i in range(k)]
    ker = kernel_basis(stacked, cols=na + len(b) + len(rel))
    out = []
    for vec in ker:
        y = vec[:na]
        x = ambient.reduce(mat_vec(wa, y)) if na else ambient.zero()
        out.append(list(x))
    return out


def fixed_subgroup(ambient: FgAbGroup, endos: list[AbHom]) -> tuple[FgAbGroup, AbHom]:
    """Common fixed points of a family of endomorphisms of ``ambient``."""
    k = ambient.rank
    if not endos:
        s = FgAbGroup(ambient.free_rank, ambient.invariant_factors)
        return s, AbHom.identity(ambient)
    stacked: Matrix = []
    rel_blocks: list[list[int]] = []
    rel = ambient.relation_columns()
    n = len(endos)
    for idx, e in enumerate(endos):
        if e.domain != ambient or e.codomain != ambient:
            raise ValueError("endomorphism of the wrong group")
        for i in range(k):
            row = [e.matrix[i][j] - (1 if i == j else 0) for j in range(k)]
            stacked.append(row)
    # x fixed iff (e - 1)x lies in the relation lattice, blockwise
    block_rels = []
    for b in range(n):
        for col in rel:
            padded = [0] * (k * n)
            for i in range(k):
                padded[b * k + i] = col[i]
            block_rels.append(padded)
    pre = lattice_preimage(stacked, block_rels, cols=k)
    return subgroup_from_generators(ambient, pre)


def subgroup_elements(ambient: FgAbGroup, gens: list) -> set:
    """All elements of a finite subgroup, by closure."""
    gens = [ambient.reduce(g) for g in gens]
    seen = {ambient.zero()}
    frontier = [ambient.zero()]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = ambient.add(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen
