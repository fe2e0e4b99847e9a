"""Certified verdicts on whether an orbit space is a manifold.

A verdict pairs a topological answer (yes / no / unknown) with an answer for
smoothness of ``(V + R^d)/G`` for every ``d`` (no / open / unknown). "open"
means no theorem excludes smoothness while none establishes it. Every yes
and no carries certificate steps naming the criterion that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import lcm
from typing import Sequence

import numpy as np

from .errors import CapExceeded, InternalContradiction
from .linalg import rank, solve_congruences
from .reducer import ReductionTrace, reduce_to_2stable
from .repmodel import (
    V0,
    ComponentGroup,
    MonomialElement,
    RepSpec,
    all_translates_with_rank,
    component_group,
    coset_meets_Omega,
    cosets_generate,
    factors_over_partition,
    finite_closure,
    find_translate,
    flip_lines,
    mod1,
    omega_invariants,
    rank_E_minus_g,
    restrict_spec,
    validate,
)
from .serialize import element_to_json
from .weightset import indecomposable_components, is_q_stable

TAGS = (
    "Prop1st", "Cor2dim", "Cor1dim", "Mich", "Submain", "MainNecessity", "MainSufficiency",
    "Mainp", "AdGE", "Abel", "Main1", "GrHi", "HG3", "GiHr", "TorExample", "ProductRule",
    "Reduction",
)
_SMOOTH_ORDER = {"no": 0, "unknown": 1, "open": 2}


@dataclass(frozen=True)
class CertStep:
    theorem: str
    detail: str
    witness: object = None

    def __post_init__(self):
        if self.theorem not in TAGS:
            raise ValueError(f"unknown certificate tag {self.theorem!r}")

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "detail": self.detail, "witness": self.witness}


@dataclass(frozen=True)
class Verdict:
    topological: str
    smooth_all_d: str
    certificate: tuple[CertStep, ...]
    trace: ReductionTrace | None = field(default=None, compare=False, repr=False)
    capped: bool = False

    def __post_init__(self):
        if self.topological not in ("yes", "no", "unknown"):
            raise ValueError(self.topological)
        if self.smooth_all_d not in _SMOOTH_ORDER:
            raise ValueError(self.smooth_all_d)
        if self.topological == "yes" and self.smooth_all_d != "open":
            raise InternalContradiction("a manifold verdict must leave smoothness open")
        if self.topological == "no" and self.smooth_all_d != "no":
            raise InternalContradiction("a non-manifold cannot be a smooth manifold")

    def tags(self) -> list[str]:
        return [c.theorem for c in self.certificate]

    def to_json(self) -> dict:
        out = {
            "topological": self.topological,
            "smooth_for_all_d": self.smooth_all_d,
            "certificate": [c.to_json() for c in self.certificate],
        }
        if self.capped:
            out["capped"] = True
        return out


@dataclass(frozen=True)
class FactorResult:
    topological: str
    smooth_all_d: str
    certificate: tuple[CertStep, ...]


@dataclass(frozen=True)
class ReflectionSubgroupReport:
    order: int
    generators: tuple[MonomialElement, ...]
    is_irreducible_C: bool
    is_G_pq_p_3: tuple[int, int] | None
    degrees_distinct: bool
    elements: tuple[MonomialElement, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class MainReport:
    i: bool
    ii: bool
    iii: bool
    iv: str  # "proved" | "falsified" | "inconclusive"
    iv_witness: dict | None = None
    detail: str = ""


# ---------------------------------------------------------------- helpers


def _is_identity_perm(g: MonomialElement) -> bool:
    return g.perm == tuple(range(g.n_lines))


def _coset_json(c) -> dict:
    return element_to_json(c.representative)


def _span_drop_witness(spec: RepSpec) -> int:
    full = rank(spec.weights)
    for i in range(spec.n_lines):
        rest = [w for j, w in enumerate(spec.weights) if j != i]
        if rank(rest) < full:
            return i
    raise InternalContradiction("no span-dropping item in a non-1-stable multiset")


def character_norm(elements: Sequence[MonomialElement], weights=None) -> Fraction:
    """``<chi, chi>`` of a complex-linear monomial group.

    ``elements`` lists a finite group, or coset representatives of a compact
    group modulo its torus when ``weights`` is given. The integral of
    ``|chi|^2`` splits over line pairs ``(j, k)``; on the subgroup fixing both
    lines ``rot_j - rot_k`` is a character, whose mean is 1 if trivial and 0
    otherwise, while torus averaging kills pairs of unequal weight.
    """
    if any(any(g.conj) for g in elements):
        raise ValueError("character norm needs complex-linear elements")
    n = elements[0].n_lines
    total = 0
    for j in range(n):
        for k in range(n):
            if weights is not None and weights[j] != weights[k]:
                continue
            sub_ = [g for g in elements if g.perm[j] == j and g.perm[k] == k]
            if all(mod1(g.rot[j] - g.rot[k]) == 0 for g in sub_):
                total += len(sub_)
    return Fraction(total, len(elements))


# ------------------------------------------------------------ finite case


def check_finite_case(spec: RepSpec) -> FactorResult:
    """Finite group on V0 (no torus)."""
    if spec.m != 0 or spec.n_lines:
        raise ValueError("finite case needs m = 0 and no lines")
    group = component_group(spec)
    if spec.v0_dim == 0 or len(group) == 1:
        return FactorResult("yes", "open", (CertStep("Mich", "trivial group: the quotient is the space itself"),))
    ranks = [(c, rank_E_minus_g(c.representative)) for c in group]
    for c, rk in ranks:
        if rk == 1:
            return FactorResult("no", "no", (CertStep("Cor1dim", "the finite group contains a reflection",
                                                      _coset_json(c)),))
    pseudo = [c for c, rk in ranks if rk == 2]
    if cosets_generate(pseudo, spec):
        return FactorResult("yes", "open", (CertStep(
            "Mich", f"group of order {len(group)} is generated by its {len(pseudo)} pseudoreflections"),))
    return FactorResult("unknown", "no", (CertStep(
        "Mich", f"pseudoreflections generate a proper subgroup of the order-{len(group)} group"),))


# ------------------------------------------------------- main conditions


def _stabilizer(spec: RepSpec, group: ComponentGroup, r: Sequence[int], phase: Sequence[Fraction]):
    """Exact stabilizer of the vector with moduli ``r`` and phases ``phase``.

    ``r[j] = 0`` marks a zero coordinate. For each coset that maps the support
    onto itself with matching moduli, the torus parts fixing the vector solve
    ``s_j lambda_j . x = phase[perm j] - rot[j] - s_j phase[j] (mod 1)``.
    """
    supp = [j for j in range(spec.n_lines) if r[j]]
    out: dict[MonomialElement, None] = {}
    for c in group:
        g = c.representative
        if any(r[g.perm[j]] != r[j] for j in range(spec.n_lines)):
            continue
        M = [tuple(g.sign(j) * x for x in spec.weights[j]) for j in supp]
        b = [phase[g.perm[j]] - g.rot[j] - g.sign(j) * phase[j] for j in supp]
        sol = solve_congruences(M, b, spec.m)
        if not sol.feasible:
            continue
        if sol.free_directions:
            raise ValueError("stabilizer is not finite")
        for x in sol.points():
            out[g * spec.torus_element(x)] = None
    return list(out)


def _omega_generates(spec: RepSpec, elems: list[MonomialElement]) -> tuple[bool, int]:
    om = [g for g in elems if omega_invariants(g, spec).in_Omega]
    sub_ = finite_closure(om, spec.n_lines, spec.v0_dim, len(elems))
    return len(sub_) == len(elems), len(sub_)


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def sample_condition_iv(spec: RepSpec, seed: int, trials: int) -> dict | None:
    """Search for a vector whose finite stabilizer is not generated by its Omega part."""
    if trials <= 0:
        return None
    group = component_group(spec)
    den = 1
    for c in group:
        for t in c.representative.rot:
            den = lcm(den, t.denominator)
    L = 2 * den
    n = spec.n_lines
    for trial in range(trials):
        rng = _rng(seed, trial)
        supp = [j for j in range(n) if rng.random() < 0.8]
        if not supp or rank([spec.weights[j] for j in supp]) != spec.m:
            continue
        r = [0] * n
        for j in supp:
            r[j] = 1 if rng.random() < 0.7 else 2
        if trial % 2 == 0:
            phase = [Fraction(int(rng.integers(L)), L) for _ in range(n)]
        else:
            phase = [Fraction(int(rng.integers(1000)), 997) for _ in range(n)]
        phase = [p if r[j] else Fraction(0) for j, p in enumerate(phase)]
        found = _check_vector(spec, group, r, phase)
        if found is not None:
            found["trial"] = trial
            return found
    return None


def _check_vector(spec, group, r, phase) -> dict | None:
    Gv = _stabilizer(spec, group, r, phase)
    ok, sub_order = _omega_generates(spec, Gv)
    if ok:
        return None
    return {
        "moduli": list(r),
        "phases": [str(p) for p in phase],
        "stabilizer_order": len(Gv),
        "omega_subgroup_order": sub_order,
    }


def check_main_conditions(spec: RepSpec, seed: int = 0, trials: int | None = None) -> MainReport:
    m, n = spec.m, spec.n_lines
    trials = spec.iv_trials if trials is None else trials
    P = spec.weight_multiset
    cond_i = n == m + 2 and is_q_stable(P, 2)
    gens = spec.generators
    if m > 2:
        cond_ii = all(_is_identity_perm(g) for g in gens)
    else:
        cond_ii = any(all(set(g.perm[j] for j in S) == set(S) for g in gens)
                      for S in combinations(range(n), m))
    group = component_group(spec)
    minus = tuple(tuple(Fraction(-1) if i == j else Fraction(0) for j in range(m)) for i in range(m))
    cond_iii = any(c.A == minus and _is_identity_perm(c.representative) for c in group)
    detail = f"|P|={n}, m={m}"
    if all(_is_identity_perm(c.representative) for c in group):
        return MainReport(cond_i, cond_ii, cond_iii, "proved", None, detail)
    witness = sample_condition_iv(spec, seed, trials)
    if witness is not None:
        return MainReport(cond_i, cond_ii, cond_iii, "falsified", witness, detail)
    return MainReport(cond_i, cond_ii, cond_iii, "inconclusive", None, detail)


def _main_factor(spec: RepSpec, seed: int, trials: int) -> FactorResult:
    rep = check_main_conditions(spec, seed, trials)
    base = f"m={spec.m}, {spec.n_lines} weights"
    failed = [name for name, ok in (("i", rep.i), ("ii", rep.ii), ("iii", rep.iii)) if not ok]
    if failed:
        return FactorResult("unknown", "no", (CertStep(
            "MainNecessity", f"{base}: condition(s) {', '.join(failed)} fail"),))
    if rep.iv == "falsified":
        return FactorResult("unknown", "no", (CertStep(
            "MainNecessity", f"{base}: a finite stabilizer is not generated by its Omega part",
            rep.iv_witness),))
    if rep.iv == "inconclusive":
        return FactorResult("unknown", "unknown", (CertStep(
            "MainSufficiency", f"{base}: conditions i-iii hold; iv undecided after sampling"),))
    certs = (
        CertStep("MainSufficiency", f"{base}: conditions i-iv hold"),
        CertStep("AdGE", "every line is preserved, so iv holds for all finite stabilizers"),
        CertStep("Mainp", "conditions i-iii hold and every line is preserved"),
    )
    return FactorResult("yes", "open", certs)


# ---------------------------------------------------------- dimension one


def _reflections(spec: RepSpec, group: ComponentGroup) -> list[MonomialElement]:
    out: dict[MonomialElement, None] = {}
    one = ((Fraction(1),),)
    for c in group:
        g = c.representative
        if c.A != one:
            continue
        moved = [j for j in range(g.n_lines) if g.perm[j] != j]
        if len(moved) not in (0, 2):
            continue
        for w in all_translates_with_rank(g, spec, 2):
            out[w] = None
    return list(out)


def recognize_imprimitive(H: Sequence[MonomialElement]) -> tuple[int, int] | None:
    """``(p, q)`` when ``H`` is ``G(pq, p, 3)`` up to diagonal conjugation.

    The diagonal part of ``G(M, p, 3)`` consists of ``diag`` with ``M``-th
    roots of unity whose product is an ``(M/p)``-th root; it is unchanged by
    diagonal conjugation. Subset plus cardinality checks give set equality.
    """
    if not H or H[0].n_lines != 3:
        return None
    if {g.perm for g in H} != set(permutations(range(3))):
        return None
    D = [g for g in H if _is_identity_perm(g)]
    M = 1
    for g in D:
        for t in g.rot:
            M = lcm(M, t.denominator)
    if M ** 3 % len(D):
        return None
    p = M ** 3 // len(D)
    if M % p:
        return None
    q = M // p
    if any((q * sum(g.rot)).denominator != 1 for g in D):
        return None
    if len(H) != 6 * len(D):
        return None
    return p, q


def reflection_subgroup(spec: RepSpec) -> ReflectionSubgroupReport:
    """The subgroup generated by all complex reflections (positive weights assumed)."""
    if spec.m != 1 or spec.v0_dim:
        raise ValueError("reflection subgroup needs a one-dimensional torus and no V0")
    if any(w[0] < 0 for w in spec.weights):
        spec = flip_lines(spec, [j for j, w in enumerate(spec.weights) if w[0] < 0])
    group = component_group(spec)
    refl = _reflections(spec, group)
    H = finite_closure(refl, spec.n_lines, 0, spec.group_order_cap)
    irreducible = character_norm(H) == 1
    rec = recognize_imprimitive(H) if irreducible else None
    if irreducible and rec is None:
        raise InternalContradiction("irreducible reflection subgroup is not of type G(pq,p,3)")
    distinct = rec is not None and rec[0] != 3
    return ReflectionSubgroupReport(len(H), tuple(refl), irreducible, rec, distinct, tuple(H))


def _linear_cosets(group: ComponentGroup):
    return [c for c in group if not any(c.representative.conj)]


def _perm_parity(perm: Sequence[int]) -> int:
    seen, parity = set(), 0
    for j in range(len(perm)):
        if j in seen:
            continue
        k, length = j, 0
        while k not in seen:
            seen.add(k)
            k = perm[k]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def is_G_q3(spec: RepSpec, H: ReflectionSubgroupReport) -> int | None:
    """``q`` when the group is conjugate to ``G(q, 3)``, else ``None``.

    Membership criterion for ``G(q, 3)``: conjugation is uniform, the line
    permutation is odd exactly for antilinear elements, and all rotation
    differences lie in ``(1/q) Z``. The group is first conjugated by a
    diagonal matrix that turns one 3-cycle coset into a plain permutation.
    """
    if spec.n_lines != 3 or spec.v0_dim or len(set(spec.weights)) != 1:
        return None
    if any(not _is_identity_perm(h) for h in H.elements):
        return None
    q = 1
    for h in H.elements:
        for t in h.rot:
            q = lcm(q, t.denominator)
    if q < 2 or H.order != q ** 3:
        return None
    group = component_group(spec)
    if len(group) != 6 * q * q:
        return None
    cyc = next((c.representative for c in _linear_cosets(group)
                if _perm_parity(c.representative.perm) == 0 and not _is_identity_perm(c.representative)), None)
    if cyc is None:
        return None
    tau = sum(cyc.rot) / 3
    d = [Fraction(0)] * 3
    j = 0
    for _ in range(2):
        d[cyc.perm[j]] = d[j] + tau - cyc.rot[j]
        j = cyc.perm[j]
    for c in group:
        g = c.representative
        rot = [g.rot[j] + d[g.perm[j]] - g.sign(j) * d[j] for j in range(3)]
        if len(set(g.conj)) != 1 or _perm_parity(g.perm) != int(g.conj[0]):
            return None
        if any((q * (rot[a] - rot[b])).denominator != 1 for a in range(3) for b in range(3)):
            return None
    return q


def omega_generates(spec: RepSpec) -> tuple[bool, list]:
    """Whether the cosets meeting Omega generate ``G/G0``.

    In dimension one an antilinear ``g`` in Omega gives ``t g t^{-1} = t^2 g``,
    so ``<Omega>`` then contains the whole torus and this coset test decides
    ``G = <Omega>``.
    """
    group = component_group(spec)
    om = [c for c in group if coset_meets_Omega(c, spec)]
    anti = any(c.representative.conj and all(c.representative.conj) for c in om)
    return cosets_generate(om, spec) and anti, om


def check_dim1(spec: RepSpec) -> FactorResult:
    if spec.m != 1:
        raise ValueError("dimension-one analysis needs m = 1")
    if any(w[0] < 0 for w in spec.weights):
        spec = flip_lines(spec, [j for j, w in enumerate(spec.weights) if w[0] < 0])
    group = component_group(spec)
    minus = ((Fraction(-1),),)
    anti = [c for c in group if c.A == minus]
    if not anti:
        return FactorResult("unknown", "no", (CertStep("Abel", "the torus is one-dimensional and Ad is trivial"),))
    if spec.n_lines != 3:
        return FactorResult("unknown", "no", (CertStep(
            "Main1", f"{spec.n_lines} complex lines; smoothness forces exactly 3"),))
    H = reflection_subgroup(spec)
    hdesc = f"reflection subgroup of order {H.order}"
    if H.is_irreducible_C and H.degrees_distinct:
        p, q = H.is_G_pq_p_3
        return FactorResult("yes", "open", (CertStep(
            "HG3", f"{hdesc} is irreducible, of type G({p * q},{p},3) with p != 3"),))
    lin = [c.representative for c in _linear_cosets(group)]
    g_reducible = character_norm(lin, spec.weights) != 1
    if H.is_irreducible_C or g_reducible:
        ok, om = omega_generates(spec)
        why = "H is irreducible" if H.is_irreducible_C else "G is reducible over R"
        if ok:
            return FactorResult("yes", "open", (CertStep(
                "GrHi", f"{why}; the {len(om)} cosets meeting Omega generate G", [_coset_json(c) for c in om]),))
        return FactorResult("unknown", "no", (CertStep(
            "GrHi", f"{why}; G is not generated by Omega ({len(om)} of {len(group)} cosets meet it)"),))
    q = is_G_q3(spec, H)
    if q is not None:
        return FactorResult("yes", "open", (CertStep(
            "GiHr", f"G is irreducible over R, {hdesc} is reducible, and G = G({q},3)", {"q": q}),))
    return FactorResult("unknown", "no", (CertStep(
        "GiHr", f"G is irreducible over R, {hdesc} is reducible, and G is not of the form G(q,3), q>1"),))


# ---------------------------------------------------------------- analyze


def _reduction_certs(trace: ReductionTrace) -> list[CertStep]:
    out = []
    for i, st in enumerate(trace.steps):
        out.append(CertStep("Reduction", (
            f"step {i + 1}: classes {[list(N) for N in st.class_orbit]} replaced by their torus quotients; "
            f"m {st.m_before}->{st.m_after}, V0 {st.v0_before}->{st.v0_after}"),
            {"exponents": [list(r.coefficients) for r in st.relations],
             "flips": [list(r.sign_flips) for r in st.relations]}))
    return out


def _combine(results: list[FactorResult]) -> tuple[str, str]:
    if all(r.topological == "yes" for r in results):
        return "yes", "open"
    smooth = min((r.smooth_all_d for r in results), key=_SMOOTH_ORDER.__getitem__)
    return "unknown", smooth


def analyze(spec: RepSpec, iv_trials: int | None = None, seed: int | None = None) -> Verdict:
    """Full pipeline: stability, reduction, product test, per-factor criteria."""
    validate(spec)
    trials = spec.iv_trials if iv_trials is None else iv_trials
    seed = spec.seed if seed is None else seed
    if not is_q_stable(spec.weight_multiset, 1):
        i = _span_drop_witness(spec)
        return Verdict("no", "no", (CertStep(
            "Prop1st", f"removing weight {i} lowers the span, so the weights are not 1-stable",
            {"index": i, "weight": list(spec.weights[i])}),))
    certs: list[CertStep] = []
    trace = None
    try:
        trace = reduce_to_2stable(spec)
        certs += _reduction_certs(trace)
        if not trace.group_propagated:
            certs.append(CertStep("Reduction", "generators could not be carried through the reduction"))
            return Verdict("unknown", "unknown", tuple(certs), trace)
        R = trace.final_spec
        group = component_group(R)
        for c in group:
            w = find_translate(c.representative, R, lambda rk: rk == 1)
            if w is not None:
                certs.append(CertStep("Cor1dim", "G contains a reflection", element_to_json(w)))
                return Verdict("no", "no", tuple(certs), trace)
        dec = indecomposable_components(R.weight_multiset)
        partition = [tuple(b) for b in dec.blocks] + ([(V0,)] if R.v0_dim else [])
        if len(partition) > 1:
            for c in group:
                if not factors_over_partition(c, partition, R):
                    certs.append(CertStep(
                        "Submain", "G is not the direct product of the factor subgroups", _coset_json(c)))
                    return Verdict("unknown", "no", tuple(certs), trace)
        results = []
        for block in dec.blocks:
            fs = restrict_spec(R, block, False)
            if fs.m >= 2:
                results.append(_main_factor(fs, seed, trials))
            else:
                results.append(check_dim1(fs))
        if R.v0_dim or not partition:
            results.append(check_finite_case(restrict_spec(R, [], True)))
        for r in results:
            certs += r.certificate
        topo, smooth = _combine(results)
        if topo == "yes" and len(results) > 1:
            certs.append(CertStep("ProductRule", f"product of {len(results)} manifold factors"))
        if topo == "yes" and trace.steps and R.n_lines == 0 and len(group) == 1:
            certs.append(CertStep("TorExample", f"the quotient is a vector space of dimension {R.v0_dim}"))
        return Verdict(topo, smooth, tuple(certs), trace)
    except CapExceeded as e:
        certs.append(CertStep("Reduction", f"enumeration capped: {e}"))
        return Verdict("unknown", "unknown", tuple(certs), trace, capped=True)
