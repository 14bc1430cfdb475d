"""Class-field-theoretic layer: spectra, Tate H^0/H^-1, valuations,
unramified and full reciprocity morphisms, lattice and reduction checks.

A spectrum is a two-dimensional domain of pairs (H, U) with U normal in
H, built from a subgroup system and a conjugation-equivariant extension
assignment.  Representations live on spectra as RIC-functor tables; the
reciprocity morphism is computed pair by pair, with every certificate
(prime independence, lift independence, naturality) verified
exhaustively over the finite model rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .abelian import (
    AbHom, FgAbGroup, element_preimage, group_order, hom_cokernel, hom_kernel,
    is_isomorphism, is_surjective, quotient, subgroup_contains,
    subgroup_elements, subgroup_from_generators, subgroup_intersection,
    subgroups_equal,
)
from .groups import Subgroup, abelian_quotient, commutator_subgroup, right_transversal
from .mackey import (
    FunctorMorphism, NotMackeyCover, RicFunctor, SubgroupSystem,
    quotient_functor, validate_functor_morphism,
    _factor_through,
)
from .ramification import (
    DepthInsufficient, InertiaTrivialHorizon, NoLiftInModel, RamificationDatum,
    d_horizon,
    frobenius_element, frobenius_group, frobenius_lifts, inertia_subgroup,
    p_parts,
)
from .transfer import (
    AbelianizationSystem, pretransfer, _subgroup_as_group,
)


class NotUrFnd(ValueError):
    pass


class ImageMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

PairKey = tuple  # (hkey, ukey)


class Spectrum:
    """Two-dimensional domain Sp(S, E) of pairs (H, U), U in E(H).

    res edges keep U fixed and move H along S_r; ind edges move to
    (I, V) with I in S_i(H), V in E(I), V <= U.
    """

    def __init__(self, system: SubgroupSystem, extension: dict):
        self.system = system
        self.group = system.group
        self.extension = {k: tuple(sorted(v)) for k, v in extension.items()}
        self._validate_extension()
        self.pairs = tuple(sorted(
            (hkey, ukey)
            for hkey in system.points() for ukey in self.extension[hkey]))
        self.is_l_coherent = self._check_l_coherent()
        self.is_i_coherent = self._check_i_coherent()

    def _validate_extension(self):
        sys = self.system
        grp = self.group
        for hkey in sys.points():
            exts = self.extension.get(hkey)
            if exts is None:
                raise ValueError(f"extension set missing for {hkey}")
            if hkey not in exts:
                raise ValueError("H must belong to its own extension set")
            h = sys.subgroup(hkey)
            for ukey in exts:
                u = Subgroup(grp, ukey, validate=False)
                if not set(ukey) <= set(hkey) or not u.is_normal_in(h):
                    raise ValueError(f"{ukey} is not normal in {hkey}")
            for g in range(grp.order):
                img = {sys.conjugate(g, ukey) for ukey in exts}
                if img != set(self.extension[sys.conjugate(g, hkey)]):
                    raise ValueError("extension sets not conjugation-equivariant")

    # domain protocol ----------------------------------------------------
    def points(self):
        return self.pairs

    def subgroup_pair(self, pair: PairKey):
        sys = self.system
        return sys.subgroup(pair[0]), Subgroup(self.group, pair[1], validate=False)

    def res_set(self, pair: PairKey):
        hkey, ukey = pair
        out = []
        for ikey in self.system.res_set(hkey):
            if ukey in self.extension[ikey]:
                out.append((ikey, ukey))
        return tuple(sorted(out))

    def ind_set(self, pair: PairKey):
        hkey, ukey = pair
        out = []
        for ikey in self.system.ind_set(hkey):
            for vkey in self.extension[ikey]:
                if set(vkey) <= set(ukey):
                    out.append((ikey, vkey))
        return tuple(sorted(out))

    def conjugate(self, g: int, pair: PairKey) -> PairKey:
        sys = self.system
        return (sys.conjugate(g, pair[0]), sys.conjugate(g, pair[1]))

    # coherence flags ------------------------------------------------------
    def ext_r(self, hkey, rsys: AbelianizationSystem):
        r = rsys.assignment[hkey]
        return [u for u in self.extension[hkey] if r.element_set <= set(u)]

    def _check_l_coherent(self) -> bool:
        for hkey in self.system.points():
            exts = self.extension[hkey]
            for u1 in exts:
                for u2 in exts:
                    if set(u2) <= set(u1) and (hkey, u2) not in self.ind_set((hkey, u1)):
                        return False
        return True

    def _check_i_coherent(self) -> bool:
        sys = self.system
        for hkey in sys.points():
            exts = set(self.extension[hkey])
            if not exts <= set(sys.ind_set(hkey)):
                return False
            h = sys.subgroup(hkey)
            for ukey in exts:
                for u1key in sys.points():
                    if not (set(ukey) <= set(u1key) <= set(hkey)):
                        continue
                    u1 = sys.subgroup(u1key)
                    if u1.is_normal_in(h):
                        if u1key not in exts or ukey not in self.extension[u1key]:
                            return False
                    # any intermediate subgroup: (I, U) must be an ind edge
                    if ukey in self.extension.get(u1key, ()):
                        if (u1key, ukey) not in self.ind_set((hkey, ukey)):
                            return False
        return True


def full_extension(system: SubgroupSystem) -> dict:
    """E(H) = all normal subgroups of H that lie in the base."""
    out = {}
    for hkey in system.points():
        h = system.subgroup(hkey)
        out[hkey] = [k for k in system.points()
                     if set(k) <= set(hkey)
                     and Subgroup(system.group, k, validate=False).is_normal_in(h)]
    return out


def unramified_extension(system: SubgroupSystem, datum: RamificationDatum) -> dict:
    """E^ur(H): normal subgroups U of H with I_U = I_H."""
    out = {}
    for hkey in system.points():
        h = system.subgroup(hkey)
        i_h = inertia_subgroup(datum, h).element_set
        members = []
        for k in system.points():
            if not set(k) <= set(hkey):
                continue
            u = Subgroup(system.group, k, validate=False)
            if u.is_normal_in(h) and i_h <= u.element_set:
                members.append(k)
        out[hkey] = members
    return out


def lift_to_spectrum(c: RicFunctor, spectrum: Spectrum) -> RicFunctor:
    """The class functor C viewed on the spectrum: C^E(H,U) = C(H)."""
    values, res, ind, con = {}, {}, {}, {}
    for pair in spectrum.points():
        hkey = pair[0]
        values[pair] = c.values[hkey]
        for q in spectrum.res_set(pair):
            res[(q, pair)] = c.res[(q[0], hkey)]
        for q in spectrum.ind_set(pair):
            ind[(pair, q)] = c.ind[(hkey, q[0])]
        for g in range(spectrum.group.order):
            con[(g, pair)] = c.con[(g, hkey)]
    return RicFunctor(spectrum, values, res, ind, con,
                      meta={"kind": "spectrum_lift", "class_functor": c})


# ---------------------------------------------------------------------------
# tautological class field theory
# ---------------------------------------------------------------------------

def tautological_cft(spectrum: Spectrum, rsys: AbelianizationSystem) -> RicFunctor:
    """Values H/(U R(H)) with transfer restrictions.

    This is the quotient presentation of the tautological theory; its
    values carry coordinate maps usable as the source of reciprocity
    morphisms.
    """
    sys = spectrum.system
    grp = spectrum.group
    values, coords = {}, {}
    quot_kernels = {}
    for pair in spectrum.points():
        h, u = spectrum.subgroup_pair(pair)
        r = rsys.assignment[pair[0]]
        n = grp.generated_subgroup(list(u.elements) + list(r.elements))
        quot_kernels[pair] = n
        values[pair], coords[pair] = abelian_quotient(h, n)
    res, ind, con = {}, {}, {}
    for pair in spectrum.points():
        hkey, ukey = pair
        h = sys.subgroup(hkey)
        cmap_h = coords[pair]
        for q in spectrum.res_set(pair):
            if q == pair:
                res[(q, pair)] = AbHom.identity(values[pair])
                continue
            ikey = q[0]
            sub = _subgroup_as_group(h)
            inner_i = Subgroup(sub.group, [sub.index[e] for e in ikey],
                               validate=False)
            t = right_transversal(sub.group, inner_i)
            cmap_i = coords[q]
            cols = []
            for rep in cmap_h.gen_reps:
                v = pretransfer(sub.group, inner_i, t, sub.index[rep])
                cols.append(list(cmap_i(sub.elements[v])))
            res[(q, pair)] = AbHom.from_columns(values[pair], values[q], cols)
        for q in spectrum.ind_set(pair):
            cmap_i = coords[q]
            cols = [list(cmap_h(rep)) for rep in cmap_i.gen_reps]
            ind[(pair, q)] = AbHom.from_columns(values[q], values[pair], cols)
        for g in range(grp.order):
            gpair = spectrum.conjugate(g, pair)
            cmap_g = coords[gpair]
            cols = [list(cmap_g(grp.conj(g, rep))) for rep in cmap_h.gen_reps]
            con[(g, pair)] = AbHom.from_columns(values[pair], values[gpair], cols)
    return RicFunctor(spectrum, values, res, ind, con,
                      meta={"kind": "tautological", "coords": coords,
                            "kernels": quot_kernels, "system_r": rsys})


def _check_mackey_cover(c: RicFunctor, spectrum: Spectrum):
    sys_c = c.domain
    if not isinstance(sys_c, SubgroupSystem):
        raise NotMackeyCover("class functor must live on a subgroup system")
    flat = spectrum.system
    for hkey in flat.points():
        if hkey not in set(sys_c.points()):
            raise NotMackeyCover(f"cover misses base group {hkey}")
        if not set(flat.res_set(hkey)) <= set(sys_c.res_set(hkey)):
            raise NotMackeyCover(f"cover misses res edges at {hkey}")
        if not set(flat.ind_set(hkey)) <= set(sys_c.ind_set(hkey)):
            raise NotMackeyCover(f"cover misses ind edges at {hkey}")
        if not set(spectrum.extension[hkey]) <= set(sys_c.ind_set(hkey)):
            raise NotMackeyCover(f"extensions of {hkey} not inducible in cover")
    for pair in spectrum.points():
        for (ikey, vkey) in spectrum.ind_set(pair):
            if vkey not in sys_c.ind_sets.get(pair[1], ()):
                raise NotMackeyCover(
                    f"V={vkey} not inducible into U={pair[1]} in the cover")
    if not sys_c.is_mackey:
        raise NotMackeyCover("cover fails the Mackey-system conditions")


def induction_representation(c: RicFunctor, spectrum: Spectrum) -> RicFunctor:
    """H^0-hat representation: (H,U) -> C(H)/ind_{H,U} C(U)."""
    _check_mackey_cover(c, spectrum)
    lifted = lift_to_spectrum(c, spectrum)
    sub_gens = {}
    for pair in spectrum.points():
        hkey, ukey = pair
        sub_gens[pair] = c.ind[(hkey, ukey)].image_generators()
    rep = quotient_functor(lifted, sub_gens)
    rep.meta["kind"] = "induction_representation"
    rep.meta["class_functor"] = c
    rep.meta["norm_subgroups"] = sub_gens
    return rep


# ---------------------------------------------------------------------------
# Tate cohomology in degrees 0 and -1
# ---------------------------------------------------------------------------

def tate_h0(c: RicFunctor, hkey, ukey) -> tuple[FgAbGroup, AbHom]:
    """Cokernel of ind_{H,U} with the projection from C(H)."""
    return hom_cokernel(c.ind[(hkey, ukey)])


def _coset_reps(h: Subgroup, u: Subgroup) -> list[int]:
    p = h.parent
    reps, seen = [], set()
    for x in h.elements:
        if x in seen:
            continue
        reps.append(x)
        for a in u.elements:
            seen.add(p.table[x][a])
    return reps


def _cyclic_generator_rep(h: Subgroup, u: Subgroup) -> int | None:
    """A representative generating H/U when that quotient is cyclic."""
    p = h.parent
    n = len(h.elements) // len(u.elements)
    for x in h.elements:
        y, k = x, 1
        while y not in u.element_set:
            y = p.table[y][x]
            k += 1
        if k == n:
            return x
    return None


def tate_hminus1(c: RicFunctor, hkey, ukey,
                 cyclic_shortcut: bool = True) -> FgAbGroup:
    """ker(ind_{H,U}) modulo the augmentation subgroup I_(H,U).

    I_(H,U) is generated by the images of con_{h,U} - id over coset
    representatives h; for cyclic H/U a single generator suffices.
    """
    sys = c.domain
    h = sys.subgroup(hkey)
    u = sys.subgroup(ukey)
    if not u.is_normal_in(h):
        raise ValueError("Tate groups need U normal in H")
    kernel, embed = hom_kernel(c.ind[(hkey, ukey)])
    gen = _cyclic_generator_rep(h, u) if cyclic_shortcut else None
    reps = [gen] if gen is not None else _coset_reps(h, u)
    value = c.values[ukey]
    ident = AbHom.identity(value)
    aug_gens = []
    for rep in reps:
        diff = c.con[(rep, ukey)].add(ident.scaled(-1))
        for col in diff.image_generators():
            x = element_preimage(embed, col)
            if x is None:
                raise AssertionError("augmentation image must lie in ker(ind)")
            aug_gens.append(list(x))
    result, _ = quotient(kernel, aug_gens)
    return result


def check_class_field_axiom(c: RicFunctor, hkey, ukey) -> bool:
    """|H^0-hat| = [H:U] and H^-1-hat trivial."""
    n = len(hkey) // len(ukey)
    h0, _ = tate_h0(c, hkey, ukey)
    if group_order(h0) != n:
        return False
    return tate_hminus1(c, hkey, ukey).is_trivial()


def check_hilbert90(c: RicFunctor, hkey, ukey) -> bool:
    return tate_hminus1(c, hkey, ukey).is_trivial()


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------

@dataclass
class ValuationFamily:
    """Morphism v: C -> Omega_d with a distinguished generator omega = 1."""

    functor: RicFunctor
    omega: FgAbGroup
    components: dict  # hkey -> AbHom C(H) -> Omega

    def generator(self) -> tuple[int, ...]:
        if self.omega.rank != 1:
            raise ValueError("omega must be cyclic of rank 1")
        return (1,)


@dataclass
class CheckItem:
    name: str
    passed: bool
    witness: object = None


@dataclass
class Report:
    checks: list[CheckItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, passed, witness=None):
        self.checks.append(CheckItem(name, bool(passed), witness))

    def first_failure(self):
        for c in self.checks:
            if not c.passed:
                return c
        return None


def validate_valuation(v: ValuationFamily, datum: RamificationDatum) -> Report:
    """Morphism conditions into Omega_d plus the generator condition."""
    from .mackey import omega_functor
    report = Report()
    c = v.functor
    sys = c.domain
    omega_d = omega_functor(datum, sys, v.omega)
    morphism = FunctorMorphism(c, omega_d, v.components)
    mrep = validate_functor_morphism(morphism)
    report.add("valuation_is_morphism_into_omega_d", mrep.passed, mrep.witness)
    gen = v.generator()
    for hkey in sys.points():
        if element_preimage(v.components[hkey], gen) is None:
            report.add("generator_in_image", False, hkey)
            return report
    report.add("generator_in_image", True)
    return report


def induce_valuation_family(v_top: AbHom, c: RicFunctor,
                            datum: RamificationDatum) -> ValuationFamily:
    """Build v_H = (1/f_H) v o ind_{G,H} from a single valuation at G.

    Requires Omega = Z; raises ImageMismatch when v(ind C(H)) != f_H Z.
    """
    omega = v_top.codomain
    if omega != FgAbGroup(1):
        raise ValueError("induced families need the torsion-free Omega = Z")
    sys = c.domain
    gkey = tuple(range(sys.group.order))
    components = {}
    from .ramification import absolute_f
    for hkey in sys.points():
        f_h = absolute_f(datum, sys.subgroup(hkey))
        composite = v_top.compose(c.ind[(gkey, hkey)])
        entries = [x for row in composite.matrix for x in row]
        image_gen = math.gcd(*entries) if any(entries) else 0
        if image_gen != f_h:
            raise ImageMismatch(
                f"v(ind C(H)) = {image_gen}Z != f_H Z = {f_h}Z at H={hkey}")
        components[hkey] = AbHom(
            composite.domain, omega,
            tuple(tuple(x // f_h for x in row) for row in composite.matrix))
    return ValuationFamily(c, omega, components)


def prime_elements_exist(v: ValuationFamily, hkey) -> tuple[int, ...] | None:
    return element_preimage(v.components[hkey], v.generator())


def _kernel_map(v: ValuationFamily, src_key, dst_key, edge: AbHom):
    """Restrict an edge map of C to the kernels of the valuation."""
    k_src, emb_src = hom_kernel(v.components[src_key])
    k_dst, emb_dst = hom_kernel(v.components[dst_key])
    return _factor_through(emb_dst, edge.compose(emb_src)), k_src, k_dst


def validate_urfnd(c: RicFunctor, v: ValuationFamily, spectrum: Spectrum,
                   datum: RamificationDatum) -> Report:
    """Unramified reciprocity-datum conditions on every unramified pair."""
    report = Report()
    val = validate_valuation(v, datum)
    report.add("valuation_valid", val.passed, val.first_failure())
    if not val.passed:
        return report
    omega = v.omega
    gen = v.generator()
    for pair in spectrum.points():
        hkey, ukey = pair
        h, u = spectrum.subgroup_pair(pair)
        if inertia_subgroup(datum, u).elements != inertia_subgroup(datum, h).elements:
            report.add("pair_unramified", False, pair)
            continue
        n = len(hkey) // len(ukey)
        # (i) Im(v_H) / n Im(v_U) cyclic of order n generated by omega
        im_h = v.components[hkey].image_generators()
        im_u_scaled = [list(omega.scale(n, col))
                       for col in v.components[ukey].image_generators()]
        s, emb = subgroup_from_generators(omega, im_h)
        rel_gens = []
        for colv in im_u_scaled:
            x = element_preimage(emb, colv)
            if x is None:
                report.add("index_subgroup_inclusion", False, pair)
                break
            rel_gens.append(list(x))
        else:
            q, proj = quotient(s, rel_gens)
            ok_order = group_order(q) == n
            omega_in_s = element_preimage(emb, gen)
            generated = False
            if omega_in_s is not None:
                cls = proj(omega_in_s)
                span = subgroup_elements(q, [cls])
                generated = len(span) == group_order(q)
            report.add("image_quotient_cyclic_of_index", ok_order and generated,
                       None if ok_order and generated else pair)
        # (ii) ind surjective on kernels
        ind_k, _, _ = _kernel_map(v, ukey, hkey, c.ind[(hkey, ukey)])
        report.add("ind_surjective_on_kernels", is_surjective(ind_k),
                   None if is_surjective(ind_k) else pair)
        # (iii) |H^0| <= [H:U]
        h0, _ = tate_h0(c, hkey, ukey)
        ok = group_order(h0) <= n
        report.add("tate_h0_bounded", ok, None if ok else pair)
    return report


# ---------------------------------------------------------------------------
# reciprocity tables
# ---------------------------------------------------------------------------

@dataclass
class ReciprocityTable:
    pair: PairKey
    source: FgAbGroup
    source_coords: object  # CosetCoordinateMap from H
    target: FgAbGroup
    target_proj: AbHom     # C(H) -> target
    map: AbHom
    is_iso: bool
    lift_independent: bool | None = None
    prime_independent: bool | None = None

    def to_json(self) -> dict:
        return {"pair": [list(self.pair[0]), list(self.pair[1])],
                "source": self.source.to_json(),
                "target": self.target.to_json(),
                "matrix": [list(r) for r in self.map.matrix],
                "is_iso": self.is_iso,
                "lift_independent": self.lift_independent,
                "prime_independent": self.prime_independent}


def _prime_independence(c: RicFunctor, v: ValuationFamily, hkey, ukey) -> bool:
    """All primes of C(H) agree mod ind C(U): ker(v_H) <= Im(ind_{H,U})."""
    kernel, emb = hom_kernel(v.components[hkey])
    norm_gens = c.ind[(hkey, ukey)].image_generators()
    return all(subgroup_contains(c.values[hkey], norm_gens, col)
               for col in emb.image_generators())


def unramified_upsilon(c: RicFunctor, v: ValuationFamily,
                       datum: RamificationDatum, pair: PairKey,
                       validated: bool = False) -> ReciprocityTable:
    """Frobenius -> prime-element table for an unramified pair.

    The source H/U is cyclic, generated by the relative Frobenius; the
    map sends its k-th power to the k-th power of a prime element modulo
    the norm subgroup.
    """
    hkey, ukey = pair
    sys = c.domain
    h = sys.subgroup(hkey)
    u = sys.subgroup(ukey)
    n = len(hkey) // len(ukey)
    if not validated:
        if inertia_subgroup(datum, u).elements != inertia_subgroup(datum, h).elements:
            raise NotUrFnd(f"pair {pair} is not unramified")
        ind_k, _, _ = _kernel_map(v, ukey, hkey, c.ind[(hkey, ukey)])
        if not is_surjective(ind_k):
            raise NotUrFnd(f"ind not surjective on kernels at {pair}")
        h0, _ = tate_h0(c, hkey, ukey)
        if not group_order(h0) <= n:
            raise NotUrFnd(f"|H^0| exceeds the index at {pair}")
    source, cmap = abelian_quotient(h, u)
    target, proj = tate_h0(c, hkey, ukey)
    if hkey == ukey:
        return ReciprocityTable(pair, source, cmap, target, proj,
                                AbHom.zero(source, target), is_iso=True,
                                prime_independent=True)
    d_vals, horizon = d_horizon(datum, h)
    pi = prime_elements_exist(v, hkey)
    if pi is None:
        raise NotUrFnd(f"no prime element in C(H) at {pair}")
    cols = []
    for rep in cmap.gen_reps:
        k = d_vals[rep] % n
        cols.append(list(proj(c.values[hkey].scale(k, pi))))
    m = AbHom.from_columns(source, target, cols)
    return ReciprocityTable(
        pair, source, cmap, target, proj, m,
        is_iso=is_isomorphism(m),
        prime_independent=_prime_independence(c, v, hkey, ukey))


def validate_fnd(c: RicFunctor, v: ValuationFamily, spectrum: Spectrum,
                 datum: RamificationDatum) -> Report:
    """urFND on the unramified sub-spectrum plus the kernel exactness.

    For each open subgroup U of a base group and each unramified open
    normal V of U, the four-term sequence
    1 -> ker v_U -> ker v_V -> ker v_V -> ker v_U -> 1
    (restriction, con_{phi-1}, induction) must be exact.
    """
    report = Report()
    ur_pairs = unramified_extension(spectrum.system, datum)
    ur_spec = Spectrum(spectrum.system, ur_pairs)
    ur = validate_urfnd(c, v, ur_spec, datum)
    report.add("urfnd_on_unramified_subspectrum", ur.passed, ur.first_failure())
    sys = c.domain
    points = set(sys.points())
    for hkey in spectrum.system.points():
        for ukey in points:
            if not set(ukey) <= set(hkey):
                continue
            u = sys.subgroup(ukey)
            for vkey in ur_pairs.get(ukey, ()):
                v_sub = sys.subgroup(vkey)
                if (vkey, ukey) not in c.res or (ukey, vkey) not in c.ind:
                    report.add("cover_edges_present", False, (ukey, vkey))
                    continue
                # V = U: the Frobenius coset is the identity, con - 1 = 0
                phi = 0 if vkey == ukey else frobenius_element(datum, u, v_sub)
                res_k, k_u, k_v = _kernel_map(v, ukey, vkey, c.res[(vkey, ukey)])
                ind_k, _, _ = _kernel_map(v, vkey, ukey, c.ind[(ukey, vkey)])
                con_diff = c.con[(phi, vkey)].add(
                    AbHom.identity(c.values[vkey]).scaled(-1))
                con_k, _, _ = _kernel_map(v, vkey, vkey, con_diff)
                ok = True
                ker_res, _ = hom_kernel(res_k)
                if not ker_res.is_trivial():
                    ok = False
                im_res = res_k.image_generators()
                ker_con, ker_con_emb = hom_kernel(con_k)
                if ok and not subgroups_equal(k_v, im_res,
                                              ker_con_emb.image_generators()):
                    ok = False
                im_con = con_k.image_generators()
                ker_ind, ker_ind_emb = hom_kernel(ind_k)
                if ok and not subgroups_equal(k_v, im_con,
                                              ker_ind_emb.image_generators()):
                    ok = False
                if ok and not is_surjective(ind_k):
                    ok = False
                report.add("kernel_sequence_exact", ok,
                           None if ok else (hkey, ukey, vkey))
    return report


def upsilon_tilde(c: RicFunctor, v: ValuationFamily, datum: RamificationDatum,
                  h_elt: int, pair: PairKey,
                  certify_prime_independence: bool = False):
    """Value of the lift morphism on a Frobenius element of H.

    Returns coordinates in H^0-hat(C)(H,U) of
    ind_{H,Sigma}(pi^(P'(mult d_H(h)))) for the Frobenius group Sigma of
    h relative to U.
    """
    hkey, ukey = pair
    sys = c.domain
    h = sys.subgroup(hkey)
    u = sys.subgroup(ukey)
    sigma, _ = frobenius_group(datum, h_elt, h, u)
    skey = sigma.elements
    d_vals, _ = d_horizon(datum, h)
    mult = d_vals[h_elt]
    _, pprime = p_parts(mult, datum.primes_p)
    pi = prime_elements_exist(v, skey)
    if pi is None:
        raise NotUrFnd(f"no prime element in C(Sigma) at {skey}")
    target, proj = tate_h0(c, hkey, ukey)
    value = proj(c.ind[(hkey, skey)](c.values[skey].scale(pprime, pi)))
    if certify_prime_independence:
        kernel, emb = hom_kernel(v.components[skey])
        norm_gens = c.ind[(hkey, ukey)].image_generators()
        for col in emb.image_generators():
            shifted = c.ind[(hkey, skey)](c.values[skey].scale(pprime, col))
            if not subgroup_contains(c.values[hkey], norm_gens, shifted):
                raise NotUrFnd(
                    f"prime choice leaks through at Sigma={skey}, pair={pair}")
    return value, target, proj


def upsilon(c: RicFunctor, v: ValuationFamily, datum: RamificationDatum,
            pair: PairKey, fnd_validated: bool = False,
            force: bool = False) -> ReciprocityTable:
    """Full reciprocity table (H/U)^ab -> H^0-hat(C)(H,U).

    Refuses to run on unvalidated data unless forced, in which case the
    per-pair certificates are recomputed here: lift independence over
    every Frobenius lift of every coset, and prime independence.
    """
    if not fnd_validated and not force:
        raise NotUrFnd("run validate_fnd first or pass force=True")
    hkey, ukey = pair
    sys = c.domain
    grp = sys.group
    h = sys.subgroup(hkey)
    u = sys.subgroup(ukey)
    comm = commutator_subgroup(h)
    n_sub = grp.generated_subgroup(list(ukey) + list(comm.elements))
    source, cmap = abelian_quotient(h, n_sub)
    target, proj = tate_h0(c, hkey, ukey)
    if source.is_trivial() and target.is_trivial():
        return ReciprocityTable(pair, source, cmap, target, proj,
                                AbHom.zero(source, target), is_iso=True,
                                lift_independent=True, prime_independent=True)

    lift_ok = True
    coset_values: dict[int, tuple] = {}
    for rep in _coset_reps(h, u):
        try:
            lifts = frobenius_lifts(datum, h, u, rep)
        except NoLiftInModel:
            continue  # value forced by multiplicativity from other cosets
        vals = []
        for lift in lifts:
            try:
                val, _, _ = upsilon_tilde(c, v, datum, lift, pair,
                                          certify_prime_independence=True)
            except DepthInsufficient:
                continue  # this lift's multiplicity exceeds the horizon
            vals.append(val)
        if not vals:
            continue  # no usable lift: the coset is forced by the others
        if len(set(vals)) != 1:
            lift_ok = False
        coset_values[rep] = vals[0]
    cols = []
    for rep in cmap.gen_reps:
        # any U-coset inside the source class of the generator will do
        candidates = sorted(
            min(grp.table[grp.mul(rep, w)][x] for x in u.elements)
            for w in n_sub.elements)
        chosen = next((r for r in candidates if r in coset_values), None)
        if chosen is None:
            raise NoLiftInModel(
                f"no Frobenius lift reaches the generator class of {rep}")
        cols.append(list(coset_values[chosen]))
    m = AbHom.from_columns(source, target, cols)
    # the matrix must reproduce every available coset value; this is the
    # well-definedness of the induced map on (H/U)^ab
    consistent = all(
        m(cmap(rep)) == val for rep, val in coset_values.items())
    return ReciprocityTable(pair, source, cmap, target, proj, m,
                            is_iso=is_isomorphism(m) and consistent,
                            lift_independent=lift_ok,
                            prime_independent=True)


def certify_upsilon_tilde_multiplicative(c: RicFunctor, v: ValuationFamily,
                                         datum: RamificationDatum,
                                         pair: PairKey) -> Report:
    """Exhaustive multiplicativity of the lift morphism on Frob_H."""
    report = Report()
    hkey, _ = pair
    sys = c.domain
    h = sys.subgroup(hkey)
    try:
        d_vals, _ = d_horizon(datum, h)
    except InertiaTrivialHorizon:
        report.add("upsilon_tilde_multiplicative", True, "vacuous: Frob_H empty")
        return report
    frob = [x for x in h.elements if d_vals[x] != 0]
    values = {}
    target = None
    for x in list(frob):
        try:
            values[x], target, _ = upsilon_tilde(c, v, datum, x, pair)
        except DepthInsufficient:
            frob.remove(x)  # unrepresentable multiplicity: outside the model
    if target is None:
        report.add("upsilon_tilde_multiplicative", True,
                   "vacuous: no representable lifts")
        return report
    grp = sys.group
    for a in frob:
        for b in frob:
            ab = grp.table[a][b]
            if ab not in values:
                continue  # product left Frob_H (d_H wrapped to zero)
            lhs = target.add(values[a], values[b])
            if lhs != values[ab]:
                report.add("upsilon_tilde_multiplicative", False, (pair, a, b))
                return report
    report.add("upsilon_tilde_multiplicative", True)
    return report


def upsilon_morphism(c: RicFunctor, v: ValuationFamily,
                     datum: RamificationDatum, spectrum: Spectrum,
                     rsys: AbelianizationSystem,
                     fnd_validated: bool = False, force: bool = False):
    """The reciprocity morphism as a functor morphism, with its tables."""
    source = tautological_cft(spectrum, rsys)
    target = induction_representation(c, spectrum)
    tables = {}
    components = {}
    for pair in spectrum.points():
        table = upsilon(c, v, datum, pair, fnd_validated=fnd_validated,
                        force=force)
        if table.source != source.values[pair]:
            raise AssertionError("source presentation mismatch")
        tables[pair] = table
        components[pair] = table.map
    morphism = FunctorMorphism(source, target, components)
    return morphism, tables


# ---------------------------------------------------------------------------
# lattice properties and reduction theorems
# ---------------------------------------------------------------------------

@dataclass
class ExtensionAssignment:
    """Per-pair subgroups Phi(H,U) <= C(H), given by generators."""

    ambient: dict       # hkey -> FgAbGroup
    subgroups: dict     # (hkey, ukey) -> list of generator vectors


def norm_subgroup_assignment(rep: RicFunctor) -> ExtensionAssignment:
    """Extension assignment of an induction representation."""
    c = rep.meta["class_functor"]
    ambient = {}
    subs = {}
    for pair in rep.domain.points():
        ambient[pair[0]] = c.values[pair[0]]
        subs[pair] = rep.meta["norm_subgroups"][pair]
    return ExtensionAssignment(ambient, subs)


def tautological_assignment(taut: RicFunctor) -> ExtensionAssignment:
    """Extension assignment U R(H)/R(H) inside H/R(H)."""
    rsys = taut.meta["system_r"]
    spectrum: Spectrum = taut.domain
    ambient = {}
    subs = {}
    pi_values = {}
    for pair in spectrum.points():
        hkey, ukey = pair
        if hkey not in pi_values:
            h = spectrum.system.subgroup(hkey)
            pi_values[hkey] = abelian_quotient(h, rsys.assignment[hkey])
        value, cmap = pi_values[hkey]
        ambient[hkey] = value
        subs[pair] = [list(cmap(x)) for x in ukey]
    return ExtensionAssignment(ambient, subs)


def lattice_property_check(assignment: ExtensionAssignment, spectrum: Spectrum,
                           rsys: AbelianizationSystem,
                           iso: FunctorMorphism | None = None) -> Report:
    """Monotonicity, product/intersection laws and R-lattice injectivity."""
    report = Report()
    if iso is not None:
        mrep = validate_functor_morphism(iso)
        all_iso = mrep.passed and all(
            is_isomorphism(iso.components[p]) for p in spectrum.points())
        report.add("supplied_morphism_is_iso", all_iso, mrep.witness)
    grp = spectrum.group
    for hkey in spectrum.system.points():
        exts = spectrum.extension[hkey]
        amb = assignment.ambient[hkey]
        ext_r = set(map(tuple, spectrum.ext_r(hkey, rsys)))
        for u1 in exts:
            for u2 in exts:
                g1 = assignment.subgroups[(hkey, u1)]
                g2 = assignment.subgroups[(hkey, u2)]
                if set(u2) <= set(u1):
                    mono = all(subgroup_contains(amb, g1, x) for x in g2)
                    if not mono:
                        report.add("monotone", False, (hkey, u1, u2))
                        return report
                if u1 not in ext_r or u2 not in ext_r:
                    continue
                prod = tuple(sorted(
                    grp.generated_subgroup(list(u1) + list(u2)).elements))
                cap = tuple(sorted(set(u1) & set(u2)))
                if prod in exts:
                    lhs = assignment.subgroups[(hkey, prod)]
                    if not subgroups_equal(amb, lhs, g1 + g2):
                        report.add("product_law", False, (hkey, u1, u2))
                        return report
                if cap in exts:
                    lhs = assignment.subgroups[(hkey, cap)]
                    rhs = subgroup_intersection(amb, g1, g2)
                    if not subgroups_equal(amb, lhs, rhs):
                        report.add("intersection_law", False, (hkey, u1, u2))
                        return report
        # injectivity on the R-lattice
        r_list = sorted(ext_r)
        for i, u1 in enumerate(r_list):
            for u2 in r_list[i + 1:]:
                if subgroups_equal(amb, assignment.subgroups[(hkey, u1)],
                                   assignment.subgroups[(hkey, u2)]):
                    report.add("r_lattice_injective", False, (hkey, u1, u2))
                    return report
    report.add("monotone", True)
    report.add("product_law", True)
    report.add("intersection_law", True)
    report.add("r_lattice_injective", True)
    return report


@dataclass
class ReducedVerificationReport:
    mode: str
    hypotheses_pass: bool
    hypothesis_witness: object
    reduced_pass: bool
    reduced_witness: object
    full_pass: bool
    full_witness: object

    @property
    def agreement(self) -> bool:
        """The reduction theorems: reduced-pass must imply full-pass."""
        if self.hypotheses_pass and self.reduced_pass:
            return self.full_pass
        return True


def _prime_power_order(n: int) -> bool:
    if n == 1:
        return True
    p = min(p for p in range(2, n + 1) if n % p == 0)
    while n % p == 0:
        n //= p
    return n == 1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n ** 0.5) + 1))


def reduced_verification(theta: FunctorMorphism, mode: str,
                         rsys: AbelianizationSystem,
                         class_functor: RicFunctor | None = None
                         ) -> ReducedVerificationReport:
    """Compare the reduced isomorphy check with the full per-pair check.

    mode 'prime_power': reduced set = pairs with abelian quotient cyclic
    of prime-power order.  mode 'prime': reduced set = prime-order cyclic
    pairs, with the class field axiom on them as an extra hypothesis.
    The theorems predict reduced-pass => full-pass on the R-pairs.
    """
    if mode not in ("prime", "prime_power"):
        raise ValueError("mode must be 'prime' or 'prime_power'")
    spectrum: Spectrum = theta.source.domain
    hyp_ok = True
    hyp_witness = None
    mrep = validate_functor_morphism(theta)
    if not mrep.passed:
        hyp_ok, hyp_witness = False, ("morphism", mrep.witness)
    if not spectrum.is_l_coherent or not spectrum.is_i_coherent:
        hyp_ok, hyp_witness = False, ("coherence",)
    if mode == "prime" and hyp_ok:
        c = class_functor or theta.target.meta.get("class_functor")
        if c is None:
            raise ValueError("mode 'prime' needs the class functor")
        for pair in spectrum.points():
            hkey, ukey = pair
            if tuple(ukey) not in set(map(tuple, spectrum.ext_r(hkey, rsys))):
                continue
            n = len(hkey) // len(ukey)
            if _is_prime(n) and not check_class_field_axiom(c, hkey, ukey):
                hyp_ok, hyp_witness = False, ("class_field_axiom", pair)
                break

    def cyclic_quotient(pair) -> bool:
        h, u = spectrum.subgroup_pair(pair)
        return _cyclic_generator_rep(h, u) is not None

    reduced_pass, reduced_witness = True, None
    full_pass, full_witness = True, None
    for pair in spectrum.points():
        hkey, ukey = pair
        if tuple(ukey) not in set(map(tuple, spectrum.ext_r(hkey, rsys))):
            continue
        n = len(hkey) // len(ukey)
        iso = is_isomorphism(theta.components[pair])
        in_reduced = cyclic_quotient(pair) and (
            _prime_power_order(n) if mode == "prime_power" else _is_prime(n))
        if in_reduced and not iso and reduced_pass:
            reduced_pass, reduced_witness = False, pair
        if not iso and full_pass:
            full_pass, full_witness = False, pair
    return ReducedVerificationReport(mode, hyp_ok, hyp_witness,
                                     reduced_pass, reduced_witness,
                                     full_pass, full_witness)
