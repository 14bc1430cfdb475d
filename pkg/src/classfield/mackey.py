"""RIC/Mackey functor engine over finite subgroup systems.

Functors are closed tables: every value (a finitely generated abelian
group in normal form) and every restriction/induction/conjugation edge
map (an integer matrix) is materialized at construction, which keeps the
exhaustive axiom checkers deterministic and the reports serializable.

Built-in functors:
  * abelianization_functor  -- H -> H/R(H), restriction = transfer
  * fixed_point_functor     -- H -> A^H for a G-module A
  * omega_functor           -- constant cyclic value, res = *e, ind = *f
  * quotient_functor        -- value-wise quotient by a subfunctor
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import (
    FgAbGroup, AbHom, element_preimage, fixed_subgroup,
    is_isomorphism, quotient, subgroup_contains,
)
from .groups import (
    FiniteGroup, Subgroup, abelian_quotient, left_transversal,
    right_transversal,
)
from .ramification import RamificationDatum, degrees
from .transfer import (
    AbelianizationSystem, ValidationReport, pretransfer, _subgroup_as_group,
)


class NotMackeySystem(ValueError):
    pass


class NotMackeyCover(ValueError):
    pass


class InvalidDescentBasis(ValueError):
    pass


class NotSubfunctor(ValueError):
    pass


# ---------------------------------------------------------------------------
# subgroup systems
# ---------------------------------------------------------------------------

SubKey = tuple  # sorted element tuple of a subgroup


class SubgroupSystem:
    """Base set of subgroups with restriction and induction edge sets.

    Keys are sorted element tuples.  ``res_sets[H]`` lists the subgroups
    restriction maps out of C(H) may target; ``ind_sets[H]`` the sources
    of induction maps into C(H).
    """

    def __init__(self, group: FiniteGroup, base, res_sets, ind_sets):
        self.group = group
        self._subs = {tuple(sorted(h.elements)): h for h in base}
        self.res_sets = {k: tuple(sorted(v)) for k, v in res_sets.items()}
        self.ind_sets = {k: tuple(sorted(v)) for k, v in ind_sets.items()}
        self.is_mackey = False
        self.is_arithmetic = False

    def points(self):
        return sorted(self._subs, key=lambda k: (len(k), k))

    def subgroup(self, key: SubKey) -> Subgroup:
        return self._subs[key]

    def res_set(self, key: SubKey):
        return self.res_sets[key]

    def ind_set(self, key: SubKey):
        return self.ind_sets[key]

    def conjugate(self, g: int, key: SubKey) -> SubKey:
        grp = self.group
        return tuple(sorted(grp.conj(g, x) for x in key))

    def __contains__(self, key: SubKey) -> bool:
        return key in self._subs


def full_system(group: FiniteGroup) -> SubgroupSystem:
    """Grp(G)^f: all subgroups, all restrictions and inductions."""
    key = "full_system"
    if key in group._cache:
        return group._cache[key]
    subs = group.all_subgroups()
    keys = {h.elements: h for h in subs}
    res, ind = {}, {}
    for k, h in keys.items():
        below = tuple(j for j in keys if set(j) <= set(k))
        res[k] = below
        ind[k] = below
    sys = SubgroupSystem(group, subs, res, ind)
    sys.is_mackey = True
    sys.is_arithmetic = True
    group._cache[key] = sys
    return sys


def system_from_predicate(group: FiniteGroup, edge_ok) -> SubgroupSystem:
    """All subgroups as base; res/ind edges H -> I where edge_ok(H, I)."""
    subs = group.all_subgroups()
    keys = {h.elements: h for h in subs}
    res, ind = {}, {}
    for k, h in keys.items():
        allowed = tuple(j for j in keys
                        if set(j) <= set(k) and edge_ok(h, keys[j]))
        res[k] = allowed
        ind[k] = allowed
    return SubgroupSystem(group, subs, res, ind)


def unramified_system(datum: RamificationDatum) -> SubgroupSystem:
    """Res/ind restricted to unramified subgroups (I ⊇ I_H)."""
    from .ramification import inertia_subgroup

    def edge_ok(h, i):
        return set(inertia_subgroup(datum, h).elements) <= i.element_set

    sys = system_from_predicate(datum.group, edge_ok)
    report = validate_subgroup_system(sys)
    if not report.passed:
        raise AssertionError(f"unramified system invalid: {report.detail}")
    return sys


def validate_subgroup_system(candidate: SubgroupSystem) -> ValidationReport:
    """Subgroup-system axioms plus the Mackey-system conditions.

    Sets is_mackey / is_arithmetic flags on the candidate as a side
    effect of a passing validation.
    """
    grp = candidate.group
    points = set(candidate.points())
    # base closed under conjugation
    for k in points:
        for g in range(grp.order):
            if candidate.conjugate(g, k) not in points:
                return ValidationReport(False, (g, k),
                                        "base not closed under conjugation")
    for star, sets in (("r", candidate.res_sets), ("i", candidate.ind_sets)):
        for k in points:
            entries = sets.get(k)
            if entries is None:
                return ValidationReport(False, k, f"missing {star}-set")
            if k not in entries:
                return ValidationReport(False, k, f"H not in S_{star}(H)")
            for j in entries:
                if j not in points or not set(j) <= set(k):
                    return ValidationReport(False, (k, j),
                                            f"S_{star}(H) member not a subgroup of H")
                for l in sets[j]:
                    if l not in entries:
                        return ValidationReport(
                            False, (k, j, l), f"S_{star} not transitive")
            for g in range(grp.order):
                conj_k = candidate.conjugate(g, k)
                conj_entries = {candidate.conjugate(g, j) for j in entries}
                if conj_entries != set(sets[conj_k]):
                    return ValidationReport(False, (g, k),
                                            f"S_{star} not conjugation-equivariant")
    # Mackey condition: I ∩ J in S_r(J) and in S_i(I)
    is_mackey = True
    for k in points:
        for ikey in candidate.res_sets[k]:
            for jkey in candidate.ind_sets[k]:
                cap = tuple(sorted(set(ikey) & set(jkey)))
                if cap not in candidate.res_sets[jkey] or \
                        cap not in candidate.ind_sets[ikey]:
                    is_mackey = False
    candidate.is_mackey = is_mackey
    candidate.is_arithmetic = all(
        set(candidate.res_sets[k]) == {j for j in points if set(j) <= set(k)}
        == set(candidate.ind_sets[k]) for k in points)
    return ValidationReport(True)


def double_coset_reps_in(h: Subgroup, u: Subgroup, v: Subgroup) -> tuple[int, ...]:
    """Minimal (U,V)-double coset reps inside the subgroup h."""
    p = h.parent
    reps = []
    seen = set()
    for x in h.elements:
        if x in seen:
            continue
        reps.append(x)
        for a in u.elements:
            ax = p.table[a][x]
            for b in v.elements:
                seen.add(p.table[ax][b])
    return tuple(reps)


# ---------------------------------------------------------------------------
# G-modules
# ---------------------------------------------------------------------------

class GModule:
    """Finitely generated abelian group with a validated G-action."""

    def __init__(self, group: FiniteGroup, underlying: FgAbGroup,
                 action: dict[int, AbHom], validate: bool = True):
        self.group = group
        self.underlying = underlying
        self.action = dict(action)
        if validate:
            self._validate()

    @classmethod
    def from_generator_action(cls, group: FiniteGroup,
                              underlying: FgAbGroup,
                              gen_action: dict[int, AbHom]) -> "GModule":
        """Extend an action given on generators to the whole group."""
        action = {0: AbHom.identity(underlying)}
        frontier = [0]
        while frontier:
            x = frontier.pop(0)
            for g, m in gen_action.items():
                y = group.table[x][g]
                if y not in action:
                    action[y] = m.compose(action[x])
                    frontier.append(y)
        if len(action) != group.order:
            raise ValueError("generators do not generate the group")
        return cls(group, underlying, action)

    def _validate(self):
        g = self.group
        if set(self.action) != set(range(g.order)):
            raise ValueError("action must cover every element")
        for a in range(g.order):
            m = self.action[a]
            if m.domain != self.underlying or m.codomain != self.underlying:
                raise ValueError("action maps must be endomorphisms")
        for a in range(g.order):
            for b in range(g.order):
                lhs = self.action[a].compose(self.action[b])
                if lhs != self.action[g.table[a][b]]:
                    raise ValueError(f"action breaks at ({a},{b})")
        ident = AbHom.identity(self.underlying)
        if self.action[0] != ident:
            raise ValueError("identity must act trivially")
        for a in range(g.order):
            comp = self.action[a].compose(self.action[g.inverse[a]])
            if comp != ident:
                raise ValueError("action maps must be automorphisms")


def trivial_module(group: FiniteGroup, underlying: FgAbGroup) -> GModule:
    ident = AbHom.identity(underlying)
    return GModule(group, underlying,
                   {a: ident for a in range(group.order)}, validate=False)


def permutation_module(group: FiniteGroup, stabilizer: Subgroup,
                       torsion: int = 0, sign_kernel: Subgroup | None = None
                       ) -> GModule:
    """Z[G/K]-style module (free or with Z/q coefficients).

    Coordinates are the left cosets gK; g acts by permuting them, twisted
    by the +-1 character with the given kernel when provided.
    """
    p = group
    reps = left_transversal(p, stabilizer).reps
    index = {}
    for i, r in enumerate(reps):
        for a in stabilizer.elements:
            index[p.table[r][a]] = i
    n = len(reps)
    underlying = FgAbGroup(n) if torsion == 0 else FgAbGroup(0, (torsion,) * n)
    action = {}
    for g in range(p.order):
        sign = 1
        if sign_kernel is not None and g not in sign_kernel.element_set:
            sign = -1
        cols = []
        for r in reps:
            target = index[p.table[g][r]]
            col = [0] * n
            col[target] = sign
            cols.append(col)
        action[g] = AbHom.from_columns(underlying, underlying, cols)
    return GModule(p, underlying, action, validate=False)


def sign_module(group: FiniteGroup, kernel: Subgroup,
                torsion: int = 0) -> GModule:
    """Rank-one module twisted by the +-1 character with the given kernel."""
    if kernel.index != 2:
        raise ValueError("sign character needs an index-2 kernel")
    underlying = FgAbGroup(1) if torsion == 0 else FgAbGroup(0, (torsion,))
    action = {}
    for g in range(group.order):
        s = 1 if g in kernel.element_set else -1
        action[g] = AbHom.multiplication(underlying, s)
    return GModule(group, underlying, action, validate=False)


# ---------------------------------------------------------------------------
# RIC functors
# ---------------------------------------------------------------------------

@dataclass
class RicFunctor:
    """Closed functor table over a subgroup system or spectrum domain."""

    domain: object
    values: dict
    res: dict    # (I, H) -> AbHom C(H) -> C(I)
    ind: dict    # (H, I) -> AbHom C(I) -> C(H)
    con: dict    # (g, H) -> AbHom C(H) -> C(^gH)
    meta: dict = field(default_factory=dict)

    def value(self, key):
        return self.values[key]


def validate_ric_functor(phi: RicFunctor) -> ValidationReport:
    """Structural completeness plus triviality/transitivity/equivariance."""
    dom = phi.domain
    grp = dom.group
    points = list(dom.points())
    for x in points:
        if x not in phi.values:
            return ValidationReport(False, x, "missing value")
        for y in dom.res_set(x):
            h = phi.res.get((y, x))
            if h is None or h.domain != phi.values[x] or h.codomain != phi.values[y]:
                return ValidationReport(False, (y, x), "missing or mistyped res")
        for y in dom.ind_set(x):
            h = phi.ind.get((x, y))
            if h is None or h.domain != phi.values[y] or h.codomain != phi.values[x]:
                return ValidationReport(False, (x, y), "missing or mistyped ind")
        for g in range(grp.order):
            h = phi.con.get((g, x))
            gx = dom.conjugate(g, x)
            if h is None or h.domain != phi.values[x] or h.codomain != phi.values[gx]:
                return ValidationReport(False, (g, x), "missing or mistyped con")
    for x in points:
        ident = AbHom.identity(phi.values[x])
        if phi.res[(x, x)] != ident:
            return ValidationReport(False, x, "res_{x,x} != id")
        if phi.ind[(x, x)] != ident:
            return ValidationReport(False, x, "ind_{x,x} != id")
        if phi.con[(0, x)] != ident:
            return ValidationReport(False, x, "con_{1,x} != id")
    for x in points:
        for y in dom.res_set(x):
            for z in dom.res_set(y):
                if phi.res[(z, y)].compose(phi.res[(y, x)]) != phi.res[(z, x)]:
                    return ValidationReport(False, (z, y, x), "res not transitive")
        for y in dom.ind_set(x):
            for z in dom.ind_set(y):
                if phi.ind[(x, y)].compose(phi.ind[(y, z)]) != phi.ind[(x, z)]:
                    return ValidationReport(False, (x, y, z), "ind not transitive")
        for g1 in range(grp.order):
            gx = dom.conjugate(g1, x)
            for g2 in range(grp.order):
                lhs = phi.con[(g2, gx)].compose(phi.con[(g1, x)])
                if lhs != phi.con[(grp.mul(g2, g1), x)]:
                    return ValidationReport(False, (g2, g1, x), "con not transitive")
    for x in points:
        for g in range(grp.order):
            gx = dom.conjugate(g, x)
            for y in dom.res_set(x):
                gy = dom.conjugate(g, y)
                lhs = phi.con[(g, y)].compose(phi.res[(y, x)])
                rhs = phi.res[(gy, gx)].compose(phi.con[(g, x)])
                if lhs != rhs:
                    return ValidationReport(False, (g, y, x), "res not equivariant")
            for y in dom.ind_set(x):
                gy = dom.conjugate(g, y)
                lhs = phi.con[(g, x)].compose(phi.ind[(x, y)])
                rhs = phi.ind[(gx, gy)].compose(phi.con[(g, y)])
                if lhs != rhs:
                    return ValidationReport(False, (g, x, y), "ind not equivariant")
    return ValidationReport(True)


def check_stability(phi: RicFunctor) -> ValidationReport:
    """con_{h,H} = id for h in H."""
    dom = phi.domain
    for x in dom.points():
        members = x[0] if isinstance(x[0], tuple) else x
        for h in members:
            if phi.con[(h, x)] != AbHom.identity(phi.values[x]):
                return ValidationReport(False, (h, x), "con_{h,H} != id")
    return ValidationReport(True)


def check_mackey_formula(phi: RicFunctor) -> ValidationReport:
    """res o ind = sum over double cosets of ind o con o res."""
    dom = phi.domain
    if not isinstance(dom, SubgroupSystem):
        raise NotMackeySystem("Mackey formula needs a subgroup-system domain")
    if not dom.is_mackey:
        raise NotMackeySystem("domain fails the Mackey-system conditions")
    grp = dom.group
    for hkey in dom.points():
        h = dom.subgroup(hkey)
        for ikey in dom.res_set(hkey):
            i_sub = dom.subgroup(ikey)
            for jkey in dom.ind_set(hkey):
                j_sub = dom.subgroup(jkey)
                lhs = phi.res[(ikey, hkey)].compose(phi.ind[(hkey, jkey)])
                rhs = AbHom.zero(phi.values[jkey], phi.values[ikey])
                for rho in double_coset_reps_in(h, i_sub, j_sub):
                    rinv = grp.inverse[rho]
                    i_conj = tuple(sorted(grp.conj(rinv, x) for x in ikey))
                    cap_right = tuple(sorted(set(i_conj) & set(jkey)))
                    cap_left = dom.conjugate(rho, cap_right)
                    term = phi.ind[(ikey, cap_left)] \
                        .compose(phi.con[(rho, cap_right)]) \
                        .compose(phi.res[(cap_right, jkey)])
                    rhs = rhs.add(term)
                if lhs != rhs:
                    return ValidationReport(False, (hkey, ikey, jkey),
                                            "Mackey formula fails")
    return ValidationReport(True)


def check_cohomological(phi: RicFunctor) -> ValidationReport:
    """ind o res = multiplication by the index on every allowed pair."""
    dom = phi.domain
    for hkey in dom.points():
        allowed = set(dom.res_set(hkey)) & set(dom.ind_set(hkey))
        for ikey in allowed:
            n = len(hkey) // len(ikey)
            lhs = phi.ind[(hkey, ikey)].compose(phi.res[(ikey, hkey)])
            if lhs != AbHom.multiplication(phi.values[hkey], n):
                return ValidationReport(False, (hkey, ikey),
                                        "ind o res != index multiple")
    return ValidationReport(True)


# ---------------------------------------------------------------------------
# built-in functors
# ---------------------------------------------------------------------------

def abelianization_functor(system: SubgroupSystem,
                           rsys: AbelianizationSystem) -> RicFunctor:
    """pi_R: H -> H/R(H) with transfer restrictions.

    Conjugation and induction are induced by conjugation and inclusion;
    restriction along I <= H is the transfer from H to I.
    """
    grp = system.group
    values, coords = {}, {}
    for key in system.points():
        h = system.subgroup(key)
        values[key], coords[key] = abelian_quotient(h, rsys.r_of(h))
    res, ind, con = {}, {}, {}
    for hkey in system.points():
        h = system.subgroup(hkey)
        cmap_h = coords[hkey]
        for ikey in system.res_set(hkey):
            if ikey == hkey:
                res[(ikey, hkey)] = AbHom.identity(values[hkey])
                continue
            sub = _subgroup_as_group(h)
            inner_i = Subgroup(sub.group, [sub.index[e] for e in ikey],
                               validate=False)
            t = right_transversal(sub.group, inner_i)
            cmap_i = coords[ikey]
            cols = []
            for rep in cmap_h.gen_reps:
                v = pretransfer(sub.group, inner_i, t, sub.index[rep])
                cols.append(list(cmap_i(sub.elements[v])))
            res[(ikey, hkey)] = AbHom.from_columns(values[hkey], values[ikey], cols)
        for ikey in system.ind_set(hkey):
            cmap_i = coords[ikey]
            cols = [list(cmap_h(rep)) for rep in cmap_i.gen_reps]
            ind[(hkey, ikey)] = AbHom.from_columns(values[ikey], values[hkey], cols)
        for g in range(grp.order):
            gkey = system.conjugate(g, hkey)
            cmap_g = coords[gkey]
            cols = [list(cmap_g(grp.conj(g, rep))) for rep in cmap_h.gen_reps]
            con[(g, hkey)] = AbHom.from_columns(values[hkey], values[gkey], cols)
    return RicFunctor(system, values, res, ind, con,
                      meta={"kind": "abelianization", "coords": coords,
                            "system_r": rsys})


def _factor_through(embed: AbHom, h: AbHom) -> AbHom:
    """Solve embed o x = h for x (columns solved independently)."""
    cols = []
    for j in range(h.domain.rank):
        e = [1 if i == j else 0 for i in range(h.domain.rank)]
        y = h(e)
        x = element_preimage(embed, y)
        if x is None:
            raise ValueError("map does not factor through the subgroup")
        cols.append(list(x))
    return AbHom.from_columns(h.domain, embed.domain, cols)


def fixed_point_functor(module: GModule, system: SubgroupSystem) -> RicFunctor:
    """A_*: H -> A^H with inclusion restrictions and norm inductions."""
    grp = system.group
    amb = module.underlying
    values, embeds = {}, {}
    for key in system.points():
        fixed, emb = fixed_subgroup(amb, [module.action[a] for a in key])
        values[key], embeds[key] = fixed, emb
    res, ind, con = {}, {}, {}
    for hkey in system.points():
        emb_h = embeds[hkey]
        for ikey in system.res_set(hkey):
            res[(ikey, hkey)] = _factor_through(embeds[ikey], emb_h)
        for ikey in system.ind_set(hkey):
            h_sub = system.subgroup(hkey)
            i_sub = system.subgroup(ikey)
            reps = _left_reps_in(h_sub, i_sub)
            norm = AbHom.zero(amb, amb)
            for r in reps:
                norm = norm.add(module.action[r])
            ind[(hkey, ikey)] = _factor_through(
                emb_h, norm.compose(embeds[ikey]))
        for g in range(grp.order):
            gkey = system.conjugate(g, hkey)
            con[(g, hkey)] = _factor_through(
                embeds[gkey], module.action[g].compose(emb_h))
    return RicFunctor(system, values, res, ind, con,
                      meta={"kind": "fixed_point", "module": module,
                            "embeddings": embeds})


def _left_reps_in(h: Subgroup, i: Subgroup) -> list[int]:
    """Minimal left-coset representatives of i inside h."""
    p = h.parent
    reps, seen = [], set()
    for x in h.elements:
        if x in seen:
            continue
        reps.append(x)
        for a in i.elements:
            seen.add(p.table[x][a])
    return reps


def omega_functor(datum: RamificationDatum, system: SubgroupSystem,
                  omega: FgAbGroup) -> RicFunctor:
    """Constant cyclic functor with res = *e and ind = *f."""
    if omega.rank > 1:
        raise ValueError("omega must be cyclic (rank at most 1)")
    grp = system.group
    values = {key: omega for key in system.points()}
    res, ind, con = {}, {}, {}
    for hkey in system.points():
        h = system.subgroup(hkey)
        for ikey in system.res_set(hkey):
            e, _ = degrees(datum, h, system.subgroup(ikey))
            res[(ikey, hkey)] = AbHom.multiplication(omega, e)
        for ikey in system.ind_set(hkey):
            _, f = degrees(datum, h, system.subgroup(ikey))
            ind[(hkey, ikey)] = AbHom.multiplication(omega, f)
        for g in range(grp.order):
            con[(g, hkey)] = AbHom.identity(omega)
    return RicFunctor(system, values, res, ind, con,
                      meta={"kind": "omega", "datum": datum})


def quotient_functor(phi: RicFunctor, sub_gens: dict) -> RicFunctor:
    """Quotient of phi by the subfunctor spanned by sub_gens per point.

    ``sub_gens[x]`` lists coordinate vectors generating the subvalue at
    x; the family must be preserved by every edge map (validated,
    NotSubfunctor on the first failing edge).
    """
    dom = phi.domain
    grp = dom.group
    for x in dom.points():
        gens = sub_gens.get(x, [])
        for y in dom.res_set(x):
            for v in gens:
                if not subgroup_contains(phi.values[y], sub_gens.get(y, []),
                                         phi.res[(y, x)](v)):
                    raise NotSubfunctor(f"res edge ({y},{x}) escapes subfunctor")
        for g in range(grp.order):
            gx = dom.conjugate(g, x)
            for v in gens:
                if not subgroup_contains(phi.values[gx], sub_gens.get(gx, []),
                                         phi.con[(g, x)](v)):
                    raise NotSubfunctor(f"con edge ({g},{x}) escapes subfunctor")
        for y in dom.ind_set(x):
            for v in sub_gens.get(y, []):
                if not subgroup_contains(phi.values[x], gens,
                                         phi.ind[(x, y)](v)):
                    raise NotSubfunctor(f"ind edge ({x},{y}) escapes subfunctor")
    values, projs = {}, {}
    for x in dom.points():
        values[x], projs[x] = quotient(phi.values[x], sub_gens.get(x, []))

    def induced(m: AbHom, src_key, dst_key) -> AbHom:
        src_q, dst_q = values[src_key], values[dst_key]
        cols = []
        for j in range(src_q.rank):
            e = [1 if i == j else 0 for i in range(src_q.rank)]
            lift = element_preimage(projs[src_key], e)
            cols.append(list(projs[dst_key](m(lift))))
        return AbHom.from_columns(src_q, dst_q, cols)

    res = {(y, x): induced(m, x, y) for (y, x), m in phi.res.items()}
    ind = {(x, y): induced(m, y, x) for (x, y), m in phi.ind.items()}
    con = {(g, x): induced(m, x, dom.conjugate(g, x))
           for (g, x), m in phi.con.items()}
    return RicFunctor(dom, values, res, ind, con,
                      meta={"kind": "quotient", "of": phi, "projections": projs})


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass
class FunctorMorphism:
    source: RicFunctor
    target: RicFunctor
    components: dict

    def component(self, key) -> AbHom:
        return self.components[key]


def validate_functor_morphism(phi: FunctorMorphism) -> ValidationReport:
    """All res/ind/con squares commute."""
    src, tgt = phi.source, phi.target
    dom = src.domain
    if tgt.domain is not dom:
        return ValidationReport(False, None, "source and target domains differ")
    grp = dom.group
    for x in dom.points():
        c = phi.components.get(x)
        if c is None or c.domain != src.values[x] or c.codomain != tgt.values[x]:
            return ValidationReport(False, x, "missing or mistyped component")
    for x in dom.points():
        for y in dom.res_set(x):
            lhs = phi.components[y].compose(src.res[(y, x)])
            rhs = tgt.res[(y, x)].compose(phi.components[x])
            if lhs != rhs:
                return ValidationReport(False, ("res", y, x), "res square fails")
        for y in dom.ind_set(x):
            lhs = phi.components[x].compose(src.ind[(x, y)])
            rhs = tgt.ind[(x, y)].compose(phi.components[y])
            if lhs != rhs:
                return ValidationReport(False, ("ind", x, y), "ind square fails")
        for g in range(grp.order):
            gx = dom.conjugate(g, x)
            lhs = phi.components[gx].compose(src.con[(g, x)])
            rhs = tgt.con[(g, x)].compose(phi.components[x])
            if lhs != rhs:
                return ValidationReport(False, ("con", g, x), "con square fails")
    return ValidationReport(True)


# ---------------------------------------------------------------------------
# descent, colimits and the adjunction
# ---------------------------------------------------------------------------

def _validate_descent_basis(system: SubgroupSystem, basis,
                            require_cofinal: bool = True) -> Subgroup:
    """Returns the minimum N0 of a valid finite-level descent basis.

    Cofinality (every base group contains a basis member) is needed for
    the adjunction unit but not for the bare colimit, whose finite-level
    value only sees the minimum; functor_colimit therefore skips it.
    """
    if not basis:
        raise InvalidDescentBasis("basis is empty")
    for b in basis:
        if not b.is_normal():
            raise InvalidDescentBasis(f"{b.elements} is not normal")
        if b.elements not in set(system.points()):
            raise InvalidDescentBasis(f"{b.elements} not in the system base")
    for a in basis:
        for b in basis:
            if not any(set(c.elements) <= a.element_set & b.element_set
                       for c in basis):
                raise InvalidDescentBasis("not a filter basis")
    for key in system.points():
        members = [b for b in basis if b.element_set <= set(key)]
        if require_cofinal and not members:
            raise InvalidDescentBasis(f"basis not cofinal below {key}")
        for b in members:
            if b.elements not in system.res_sets[key]:
                raise InvalidDescentBasis(
                    f"basis member {b.elements} not in S_r({key})")
    n0 = min(basis, key=lambda b: len(b.elements))
    for b in basis:
        if not n0.element_set <= b.element_set:
            raise InvalidDescentBasis("filter basis has no minimum")
    return n0


def functor_colimit(phi: RicFunctor, basis) -> GModule:
    """Finite-level colimit: Phi(N0) with g acting through conjugation."""
    system = phi.domain
    if not isinstance(system, SubgroupSystem):
        raise InvalidDescentBasis("colimit needs a subgroup-system domain")
    stab = check_stability(phi)
    if not stab.passed:
        raise InvalidDescentBasis(f"functor is not stable: {stab.witness}")
    n0 = _validate_descent_basis(system, basis, require_cofinal=False)
    key = n0.elements
    grp = system.group
    action = {g: phi.con[(g, key)] for g in range(grp.order)}
    return GModule(grp, phi.values[key], action)


def check_galois_descent(phi: RicFunctor, hkey, ukey) -> bool:
    """Is res_{U,H}: Phi(H) -> Phi(U)^{H/U} an isomorphism?"""
    system = phi.domain
    h = system.subgroup(hkey)
    u = system.subgroup(ukey)
    if not u.is_normal_in(h):
        raise ValueError("Galois descent needs U normal in H")
    if ukey not in system.res_sets[hkey]:
        raise ValueError("U must be a restriction target of H")
    endos = [phi.con[(x, ukey)] for x in h.elements]
    for x in h.elements:
        if phi.con[(x, ukey)].codomain != phi.values[ukey]:
            raise ValueError("conjugation does not preserve Phi(U)")
    fixed, emb = fixed_subgroup(phi.values[ukey], endos)
    try:
        factored = _factor_through(emb, phi.res[(ukey, hkey)])
    except ValueError:
        return False
    return is_isomorphism(factored)


@dataclass
class AdjunctionResult:
    counit: AbHom                  # epsilon(A): (A_*)* -> A
    counit_is_iso: bool
    unit: FunctorMorphism          # eta(Phi): Phi -> (Phi^*)_*
    unit_is_iso: bool
    unit_witness: object
    colimit_module: GModule


def adjunction_maps(module: GModule, phi: RicFunctor, basis) -> AdjunctionResult:
    """Counit for the module and unit for the functor, with iso verdicts."""
    system = phi.domain
    a_star = fixed_point_functor(module, system)
    n0 = _validate_descent_basis(system, basis)
    counit = a_star.meta["embeddings"][n0.elements]
    counit_iso = is_isomorphism(counit)

    colim = functor_colimit(phi, basis)
    colim_star = fixed_point_functor(colim, system)
    components = {}
    witness = None
    all_iso = True
    for key in system.points():
        emb = colim_star.meta["embeddings"][key]
        try:
            comp = _factor_through(emb, phi.res[(n0.elements, key)])
        except ValueError:
            raise AssertionError("restriction must land in the fixed points")
        components[key] = comp
        if all_iso and not is_isomorphism(comp):
            all_iso = False
            witness = key
    unit = FunctorMorphism(phi, colim_star, components)
    return AdjunctionResult(counit, counit_iso, unit, all_iso, witness, colim)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def subgroup_key_to_id(key) -> str:
    return ",".join(str(x) for x in key)


def subgroup_id_to_key(s: str):
    return tuple(int(x) for x in s.split(",")) if s else ()


def system_to_json(system: SubgroupSystem) -> dict:
    return {
        "base": [subgroup_key_to_id(k) for k in system.points()],
        "res": {subgroup_key_to_id(k): [subgroup_key_to_id(j) for j in v]
                for k, v in system.res_sets.items()},
        "ind": {subgroup_key_to_id(k): [subgroup_key_to_id(j) for j in v]
                for k, v in system.ind_sets.items()},
    }


def system_from_json(group: FiniteGroup, data: dict) -> SubgroupSystem:
    base = [Subgroup(group, subgroup_id_to_key(s)) for s in data["base"]]
    res = {subgroup_id_to_key(k): tuple(subgroup_id_to_key(j) for j in v)
           for k, v in data["res"].items()}
    ind = {subgroup_id_to_key(k): tuple(subgroup_id_to_key(j) for j in v)
           for k, v in data["ind"].items()}
    return SubgroupSystem(group, base, res, ind)


def functor_to_json(phi: RicFunctor) -> dict:
    """Functor file format; only subgroup-system domains are serialized."""
    if not isinstance(phi.domain, SubgroupSystem):
        raise ValueError("only subgroup-system functors serialize to JSON")
    return {
        "system": system_to_json(phi.domain),
        "values": {subgroup_key_to_id(k): v.to_json()
                   for k, v in phi.values.items()},
        "res": [{"from": subgroup_key_to_id(h), "to": subgroup_key_to_id(i),
                 "matrix": [list(r) for r in m.matrix]}
                for (i, h), m in sorted(phi.res.items())],
        "ind": [{"from": subgroup_key_to_id(i), "to": subgroup_key_to_id(h),
                 "matrix": [list(r) for r in m.matrix]}
                for (h, i), m in sorted(phi.ind.items())],
        "con": [{"g": g, "H": subgroup_key_to_id(h),
                 "matrix": [list(r) for r in m.matrix]}
                for (g, h), m in sorted(phi.con.items())],
    }


def functor_from_json(group: FiniteGroup, data: dict) -> RicFunctor:
    system = system_from_json(group, data["system"])
    values = {subgroup_id_to_key(k): FgAbGroup.from_json(v)
              for k, v in data["values"].items()}
    res, ind, con = {}, {}, {}
    for item in data["res"]:
        h = subgroup_id_to_key(item["from"])
        i = subgroup_id_to_key(item["to"])
        res[(i, h)] = AbHom(values[h], values[i],
                            tuple(tuple(r) for r in item["matrix"]))
    for item in data["ind"]:
        i = subgroup_id_to_key(item["from"])
        h = subgroup_id_to_key(item["to"])
        ind[(h, i)] = AbHom(values[i], values[h],
                            tuple(tuple(r) for r in item["matrix"]))
    for item in data["con"]:
        h = subgroup_id_to_key(item["H"])
        g = item["g"]
        gh = system.conjugate(g, h)
        con[(g, h)] = AbHom(values[h], values[gh],
                            tuple(tuple(r) for r in item["matrix"]))
    return RicFunctor(system, values, res, ind, con)
