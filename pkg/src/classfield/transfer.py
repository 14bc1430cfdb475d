"""Pretransfer and transfer (Verlagerung) maps with their double-coset
presentation, plus abelianization systems.

The pretransfer from G to H along an ordered right transversal T sends g
to the product of the T-remover parts of t*g over t in T.  Modulo a
coabelian R(H) the result is transversal-independent and multiplicative;
that reduction is the transfer.  Topological closure is the identity on
finite groups, so generated subgroups stand in for closed generated
subgroups throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import (
    FiniteGroup, Subgroup, Transversal, InvalidReps,
    right_transversal, t_remover, double_coset_of,
)


class NotTransferInducing(ValueError):
    """The pair (R_H, R_G) fails V^T(R_G) <= R_H."""


def pretransfer(g: FiniteGroup, h: Subgroup, t: Transversal, x: int) -> int:
    """Product of kappa_T(t_i * x) over the transversal, in its fixed order."""
    if t.subgroup != h or t.side != "right":
        raise ValueError("pretransfer needs a right transversal of h")
    out = 0
    for rep in t.reps:
        out = g.mul(out, t_remover(t, g.mul(rep, x)))
    return out


def _coabelian_check(h: Subgroup, r: Subgroup):
    if not r.is_subgroup_of(h):
        raise ValueError("coabelian subgroup must lie inside the subgroup")
    if not r.is_normal_in(h):
        raise ValueError("coabelian subgroup must be normal")
    p = h.parent
    for a in h.elements:
        for b in h.elements:
            if p.commutator(a, b) not in r.element_set:
                raise ValueError("quotient by the given subgroup is not abelian")


def _coset_rep(h: Subgroup, r: Subgroup, x: int) -> int:
    p = h.parent
    return min(p.table[x][a] for a in r.elements)


def _is_transfer_inducing(g: FiniteGroup, h: Subgroup, r_h: Subgroup,
                          r_g: Subgroup) -> bool:
    # memoized per group instance, keyed by the (H, R_H, R_G) triple
    key = ("transfer_pair", h.elements, r_h.elements, r_g.elements)
    if key not in g._cache:
        t = right_transversal(g, h)
        g._cache[key] = all(
            pretransfer(g, h, t, x) in r_h.element_set for x in r_g.elements)
    return g._cache[key]


def transfer(g: FiniteGroup, h: Subgroup, r_h: Subgroup, r_g: Subgroup,
             x: int, transversal: Transversal | None = None) -> int:
    """Transfer of x, as the minimal representative of its coset mod R_H.

    Requires {R_H, R_G} to be a transfer inducing pair; the result is
    independent of the transversal and defines a homomorphism
    G/R_G -> H/R_H.
    """
    _coabelian_check(h, r_h)
    _coabelian_check(g.full_subgroup(), r_g)
    if not _is_transfer_inducing(g, h, r_h, r_g):
        raise NotTransferInducing(
            "pretransfer does not map R_G into R_H for this pair")
    t = transversal if transversal is not None else right_transversal(g, h)
    return _coset_rep(h, r_h, pretransfer(g, h, t, x))


def transfer_between(h_small: Subgroup, h_big: Subgroup, r_small: Subgroup,
                     r_big: Subgroup, x: int) -> int:
    """Transfer from a subgroup to a smaller subgroup (both inside parent).

    Used for restriction maps of abelianization functors, where the
    ambient pair is (H_big, H_small) rather than (G, H).
    """
    g = h_big.parent
    sub = _subgroup_as_group(h_big)
    small_inside = Subgroup(sub.group, [sub.index[e] for e in h_small.elements],
                            validate=False)
    rs = Subgroup(sub.group, [sub.index[e] for e in r_small.elements], validate=False)
    rb = Subgroup(sub.group, [sub.index[e] for e in r_big.elements], validate=False)
    y = transfer(sub.group, small_inside, rs, rb, sub.index[x])
    return sub.elements[y]


@dataclass
class _AsGroup:
    group: FiniteGroup
    elements: tuple[int, ...]
    index: dict[int, int]


def _subgroup_as_group(h: Subgroup) -> _AsGroup:
    p = h.parent
    key = ("asgroup", h.elements)
    if key in p._cache:
        return p._cache[key]
    elems = h.elements
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[p.table[a][b]] for b in elems] for a in elems]
    grp = FiniteGroup(table, name=f"{p.name}|{len(elems)}", validate=False)
    out = _AsGroup(grp, elems, index)
    p._cache[key] = out
    return out


def lambda_exponent(g: FiniteGroup, h: Subgroup, x: int, rho: int) -> int:
    """Least j > 0 with rho * x^j * rho^-1 in h."""
    j = 1
    y = g.conj(rho, x)
    acc = y
    while acc not in h.element_set:
        acc = g.mul(acc, y)
        j += 1
        if j > g.order:
            raise AssertionError("lambda exponent search exceeded group order")
    return j


def transfer_via_lambda(g: FiniteGroup, h: Subgroup, r_h: Subgroup, x: int,
                        reps) -> int:
    """Transfer computed from double-coset representatives of H\\G/<x>.

    The exponents lambda_x(rho) sum to the index [G:H]; the value is the
    product of rho * x^lambda * rho^-1 modulo R_H.
    """
    _coabelian_check(h, r_h)
    cyc = g.generated_subgroup([x])
    covered = set()
    for rho in reps:
        dc = double_coset_of(g, h, cyc, rho)
        if covered & dc:
            raise InvalidReps("representatives repeat a double coset")
        covered |= dc
    if len(covered) != g.order:
        raise InvalidReps("representatives do not cover the group")
    total = 0
    out = 0
    for rho in reps:
        lam = lambda_exponent(g, h, x, rho)
        total += lam
        out = g.mul(out, g.conj(rho, g.power(x, lam)))
    if total * len(h.elements) != g.order:
        raise AssertionError("lambda exponents do not sum to the index")
    return _coset_rep(h, r_h, out)


# ---------------------------------------------------------------------------
# abelianization systems
# ---------------------------------------------------------------------------

@dataclass
class AbelianizationSystem:
    """Family H -> R(H) of coabelian normal subgroups over a subgroup system.

    Conjugation equivariance, transfer compatibility along restriction
    edges and inclusion compatibility along induction edges are verified
    by validate_abelianization_system.
    """

    system: "object"  # a mackey.SubgroupSystem
    assignment: dict[tuple[int, ...], Subgroup]

    def r_of(self, h: Subgroup) -> Subgroup:
        return self.assignment[h.elements]


@dataclass
class ValidationReport:
    passed: bool
    witness: object = None
    detail: str = ""

    def __bool__(self):
        return self.passed


def validate_abelianization_system(candidate: AbelianizationSystem) -> ValidationReport:
    """Check the three abelianization-system conditions exhaustively."""
    sys = candidate.system
    g = sys.group
    for key in sys.points():
        h = sys.subgroup(key)
        r = candidate.r_of(h)
        try:
            _coabelian_check(h, r)
        except ValueError as exc:
            return ValidationReport(False, key, f"not coabelian: {exc}")
    # (i) conjugation equivariance
    for key in sys.points():
        h = sys.subgroup(key)
        r = candidate.r_of(h)
        for x in range(g.order):
            conj_h = sys.conjugate(x, key)
            expected = candidate.assignment[conj_h]
            image = {g.conj(x, a) for a in r.elements}
            if image != set(expected.elements):
                return ValidationReport(False, (x, key),
                                        "conjugate of R(H) is not R(^gH)")
    # (ii) transfer compatibility on restriction edges
    for key in sys.points():
        h = sys.subgroup(key)
        r_h = candidate.r_of(h)
        for ikey in sys.res_set(key):
            if ikey == key:
                continue
            i_sub = sys.subgroup(ikey)
            r_i = candidate.assignment[ikey]
            sub = _subgroup_as_group(h)
            inner_i = Subgroup(sub.group, [sub.index[e] for e in i_sub.elements],
                               validate=False)
            t = right_transversal(sub.group, inner_i)
            for x in r_h.elements:
                val = pretransfer(sub.group, inner_i, t, sub.index[x])
                if sub.elements[val] not in r_i.element_set:
                    return ValidationReport(False, (key, ikey, x),
                                            "transfer escapes R(I)")
    # (iii) inclusion compatibility on induction edges
    for key in sys.points():
        r_h = candidate.assignment[key]
        for ikey in sys.ind_set(key):
            r_i = candidate.assignment[ikey]
            if not r_i.element_set <= r_h.element_set:
                return ValidationReport(False, (key, ikey),
                                        "R(I) not contained in R(H)")
    return ValidationReport(True)


def commutator_system(sys) -> AbelianizationSystem:
    """The commutator-subgroup abelianization system on a subgroup system."""
    from .groups import commutator_subgroup
    assignment = {}
    for key in sys.points():
        assignment[key] = commutator_subgroup(sys.subgroup(key))
    return AbelianizationSystem(sys, assignment)


def trivial_system(sys) -> AbelianizationSystem:
    """R(H) = 1 for every H; valid only when every base group is abelian."""
    g = sys.group
    assignment = {key: g.trivial_subgroup() for key in sys.points()}
    return AbelianizationSystem(sys, assignment)


def full_system_assignment(sys) -> AbelianizationSystem:
    """R(H) = H for every H (all quotients trivial, hence abelian)."""
    assignment = {key: sys.subgroup(key) for key in sys.points()}
    return AbelianizationSystem(sys, assignment)
