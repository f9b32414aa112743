"""Proof orchestration: dependency resolution, induction bookkeeping,
obligation scheduling, and registry updates.

Proofs cite other formulas through their exact-sequence corners.  Citation
cycles are allowed as long as the cited instances are strictly smaller in
total length: the proofs of such a cycle form one mutual induction whose
well-foundedness is validated before any obligation runs (lengths are
non-negative integers, base instances are certified directly).  Acyclic
citations simply require the cited formula to be certified first.

Obligations inside a group are independent and may run on a worker pool;
results are reassembled in declaration order, so emitted documents do not
depend on the schedule.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .errors import (BaseCaseGap, CannotCertify, CorankNotOne, DimEqualsDelta,
                     QtpError, RegistryError, SemanticError,
                     SesVerificationError, TwoSesError)
from .inputfmt import materialize_morphism, materialize_ref
from .quiver import SCHOFIELD_SUB_FIRST
from .representation import (check_tree_count, dim_and_length,
                             instantiate_formula, ones_count)
from .symbolic import PolyN
from .trace import (ObligationTrace, ProofTrace, RunTrace, TraceRecorder)
from .verifier import (prove_end_dim_one, ses_data_from, verify_ses,
                       verify_two_ses_hypotheses)

CERTIFIED = "certified"
FAILED = "failed"
REFUSED = "refused"


@dataclass
class RunConfig:
    jobs: int = 1
    budget: object = None
    schofield_order: str = SCHOFIELD_SUB_FIRST


class FormulaRegistry:
    """Certification state per formula; updates are monotonic.

    Scope "all" means every parameter n >= n0 (methods 2/3, or a
    corank-one proof of a constant formula); otherwise single instances
    are recorded.
    """

    def __init__(self):
        self._family = {}
        self._instances = {}

    def certify_family(self, formula, proof):
        self._family.setdefault(formula, proof)

    def certify_instance(self, formula, n, proof):
        self._instances.setdefault(formula, {}).setdefault(n, proof)

    def covers_family(self, formula):
        return formula in self._family

    def covers_instance(self, formula, n):
        if formula in self._family:
            return True
        return n in self._instances.get(formula, {})

    def certified_formulas(self):
        return sorted(self._family)


def _is_constant(rep):
    return all(getattr(e, "a", 0) == 0 for e in rep.dims)


def _length_poly(rep):
    return dim_and_length(rep)[1]


def _shift_affine(poly, c):
    """p(n - c) for an affine polynomial."""
    if poly.c2:
        raise QtpError("length polynomial is not affine")
    return PolyN(poly.c0 - poly.c1 * c, poly.c1, 0)


@dataclass
class _ProofPlan:
    decl: object
    formula: object          # FormulaDecl
    rep: object              # symbolic Representation
    eff_step: int = 0
    pair_data: tuple = ()
    error: object = None


def _proof_graph(doc, needed):
    """Citation edges between proofs (by proof name)."""
    by_formula = {}
    for name, p in doc.proofs.items():
        by_formula.setdefault(p.target, []).append(name)
    edges = {}
    for name in needed:
        p = doc.proofs[name]
        out = []
        for ses in p.pairs:
            for ref in (ses.sub, ses.quot):
                owners = by_formula.get(ref.formula, [])
                if len(owners) > 1:
                    raise SemanticError(
                        "formula %s has several proofs (%s); cannot resolve "
                        "citations" % (ref.formula, ", ".join(owners)))
                if owners and owners[0] != name:
                    out.append(owners[0])
        edges[name] = out
    return edges, by_formula


def _dependency_closure(doc, proof_ids):
    needed = []
    seen = set()
    stack = list(proof_ids)
    while stack:
        name = stack.pop(0)
        if name in seen:
            continue
        if name not in doc.proofs:
            raise SemanticError("unknown proof %r" % name)
        seen.add(name)
        needed.append(name)
        edges, _ = _proof_graph(doc, [name])
        for dep in edges[name]:
            if dep not in seen:
                stack.append(dep)
    return needed


def _sccs(edges, order_index):
    """Iterative Tarjan; components come out child-first (reverse topological)."""
    index = {}
    low = {}
    onstack = set()
    stack = []
    counter = [0]
    components = []

    for root in sorted(edges, key=lambda k: order_index[k]):
        if root in index:
            continue
        work = [(root, iter(sorted(edges[root], key=lambda k: order_index[k])))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        onstack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in edges:
                    continue
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    onstack.add(succ)
                    work.append((succ, iter(sorted(edges[succ],
                                                   key=lambda k: order_index[k]))))
                    advanced = True
                    break
                if succ in onstack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    member = stack.pop()
                    onstack.discard(member)
                    comp.append(member)
                    if member == node:
                        break
                components.append(sorted(comp, key=lambda k: order_index[k]))
    return components


# ---------------------------------------------------------------------------
# obligation construction

def _tree_count_obligation(name, rep):
    def run():
        rec = TraceRecorder()
        dims, length = dim_and_length(rep)
        count = ones_count(rep)
        rec.note("dimension vector: (%s)" % ", ".join(str(d) for d in dims))
        rec.note("length %s, number of ones %s" % (length, count))
        ok = check_tree_count(rep)
        rec.note("ones = length - 1: %s" % ("yes" if ok else "NO"))
        if not ok:
            return FAILED, "ones %s != length-1 %s" % (
                count, length - PolyN.const(1)), rec.steps
        return CERTIFIED, "", rec.steps
    return name, run


def _corank_obligation(name, rep, n, budget):
    def run():
        rec = TraceRecorder()
        try:
            inst = instantiate_formula(rep, n) if rep.symbolic else rep
            rec.note("instance at n = %d, dimension vector (%s)"
                     % (n, ", ".join(str(d) for d in inst.dims)))
            prove_end_dim_one(inst, budget=budget, recorder=rec)
            rec.note("endomorphism space is one-dimensional over every field")
            return CERTIFIED, "", rec.steps
        except (CorankNotOne, DimEqualsDelta) as e:
            return FAILED, str(e), rec.steps
        except CannotCertify as e:
            status = REFUSED
            return status, str(e), rec.steps
    return name, run


def _hypotheses_obligation(name, plan, config):
    def run():
        rec = TraceRecorder()
        d1, d2 = plan.pair_data
        try:
            verify_two_ses_hypotheses(
                d1, d2, tuple(plan.rep.dims), order=config.schofield_order,
                n0=plan.eff_step, recorder=rec)
            return CERTIFIED, "", rec.steps
        except TwoSesError as e:
            return FAILED, str(e), rec.steps
        except QtpError as e:
            return FAILED, str(e), rec.steps
    return name, run


def _ses_obligation(name, data, budget):
    def run():
        rec = TraceRecorder()
        try:
            verify_ses(data, budget=budget, recorder=rec)
            return CERTIFIED, "", rec.steps
        except SesVerificationError as e:
            refused = any("budget" in msg for _, _, msg in e.failures)
            return (REFUSED if refused else FAILED), str(e), rec.steps
    return name, run


# ---------------------------------------------------------------------------
# planning and validation

def _build_plan(doc, proof, registry, group_formulas, config):
    fdecl = doc.formulas[proof.target]
    rep = fdecl.representation
    plan = _ProofPlan(decl=proof, formula=fdecl, rep=rep)
    if proof.method == 1:
        if proof.at_n < rep.n0:
            plan.error = SemanticError(
                "method1 at n=%d below the formula base %d"
                % (proof.at_n, rep.n0), entity=proof.name)
        return plan
    # materialize both pairs, tracking the first parameter the step covers
    eff = rep.n0
    if proof.method == 2 and proof.bases:
        eff = max(eff, max(proof.bases) + 1)
    datas = []
    try:
        for k, ses in enumerate(proof.pairs):
            sub = materialize_ref(doc, ses.sub)
            quot = materialize_ref(doc, ses.quot)
            f = materialize_morphism(doc, doc.morphisms[ses.f])
            g = materialize_morphism(doc, doc.morphisms[ses.g])
            for r in (sub, quot):
                eff = max(eff, r.n0)
            for fam in (f, g):
                for m in fam.maps.values():
                    eff = max(eff, getattr(m, "n0", 0))
            data = ses_data_from(sub, rep, quot, f, g,
                                 label="pair %d" % (k + 1))
            datas.append(data)
    except QtpError as e:
        plan.error = e
        return plan
    plan.eff_step = eff
    for d in datas:
        d.n0 = max(d.n0, eff)
    plan.pair_data = tuple(datas)
    # base coverage: every n in [n0, eff) must be a base case
    covered = set(proof.bases)
    missing = [n for n in range(rep.n0, eff) if n not in covered]
    if missing:
        plan.error = BaseCaseGap(
            "parameter n=%d is not covered by a base case and the inductive "
            "step starts at n=%d" % (missing[0], eff))
        return plan
    # citation legality
    target_len = _length_poly(rep)
    for ses in proof.pairs:
        for ref in (ses.sub, ses.quot):
            cited = doc.formulas[ref.formula].representation
            if ref.absolute is not None:
                if not (registry.covers_instance(ref.formula, ref.absolute)
                        or ref.formula in group_formulas):
                    plan.error = RegistryError(
                        "corner %s cites an uncertified instance" % ref)
                    return plan
                continue
            if plan.eff_step - ref.shift < cited.n0:
                plan.error = BaseCaseGap(
                    "citation %s reaches parameter %d below its base %d"
                    % (ref, plan.eff_step - ref.shift, cited.n0))
                return plan
            if ref.formula in group_formulas:
                cited_len = _shift_affine(_length_poly(cited), ref.shift)
                diff = target_len - cited_len
                if not (diff.nonneg_from(plan.eff_step)
                        and diff.nonzero_from(plan.eff_step)):
                    plan.error = RegistryError(
                        "citation %s does not strictly decrease the total "
                        "length; mutual induction would be unfounded" % ref)
                    return plan
            elif not registry.covers_family(ref.formula):
                plan.error = RegistryError(
                    "corner formula %s is not certified" % ref.formula)
                return plan
    return plan


def _plan_obligations(plan, config):
    proof = plan.decl
    obs = [_tree_count_obligation("tree count of %s" % proof.target, plan.rep)]
    if proof.method == 1:
        obs.append(_corank_obligation(
            "endomorphism corank at n=%d" % proof.at_n, plan.rep,
            proof.at_n, config.budget))
        return obs
    for b in (proof.bases if proof.method == 2 else ()):
        obs.append(_corank_obligation("base case n=%d" % b, plan.rep, b,
                                      config.budget))
    obs.append(_hypotheses_obligation("two-sequence hypotheses", plan, config))
    for k, data in enumerate(plan.pair_data):
        obs.append(_ses_obligation("exact sequence %d" % (k + 1), data,
                                   config.budget))
    return obs


# ---------------------------------------------------------------------------
# the run loop

@dataclass
class RunResult:
    trace: RunTrace
    statuses: dict = field(default_factory=dict)
    budget_exhausted: bool = False

    @property
    def all_certified(self):
        return all(s == CERTIFIED for s in self.statuses.values())


def _run_obligations(obligations, jobs):
    results = [None] * len(obligations)
    if jobs <= 1:
        for k, (name, fn) in enumerate(obligations):
            results[k] = (name,) + fn()
        return results
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(fn): (k, name)
                   for k, (name, fn) in enumerate(obligations)}
        for fut, (k, name) in futures.items():
            results[k] = (name,) + fut.result()
    return results


def run_proofs(doc, proof_ids, config=None, input_bytes=b""):
    """Verify the named proofs and their dependency closure.

    Returns a RunResult whose trace lists every proof in processing order
    with its obligations; the registry is updated per dependency group
    after all of the group's obligations succeed.
    """
    config = config or RunConfig()
    registry = FormulaRegistry()
    needed = _dependency_closure(doc, proof_ids)
    edges, _ = _proof_graph(doc, needed)
    order_index = {name: k for k, (kind, name) in enumerate(doc.order)
                   if kind == "proof"}
    groups = _sccs(edges, order_index)
    run = RunTrace(tool_version=__version__,
                   input_sha256=hashlib.sha256(input_bytes).hexdigest())
    result = RunResult(trace=run)

    for group in groups:
        group_formulas = {doc.proofs[name].target for name in group}
        plans = {}
        for name in group:
            plans[name] = _build_plan(doc, doc.proofs[name], registry,
                                      group_formulas, config)
        group_obs = []
        spans = {}
        for name in group:
            plan = plans[name]
            if plan.error is not None:
                spans[name] = (len(group_obs), len(group_obs))
                continue
            obs = _plan_obligations(plan, config)
            spans[name] = (len(group_obs), len(group_obs) + len(obs))
            group_obs.extend(obs)
        outcomes = _run_obligations(group_obs, config.jobs)
        for name in group:
            proof = doc.proofs[name]
            plan = plans[name]
            ptrace = ProofTrace(proof_id=name, target=proof.target,
                                method=proof.method, status=CERTIFIED)
            if plan.error is not None:
                ptrace.status = FAILED
                ptrace.obligations.append(ObligationTrace(
                    name="validation", status=FAILED, steps=[],
                    message=str(plan.error)))
            else:
                lo, hi = spans[name]
                for oname, status, message, steps in outcomes[lo:hi]:
                    ptrace.obligations.append(ObligationTrace(
                        name=oname, status=status, steps=steps,
                        message=message))
                    if status != CERTIFIED:
                        ptrace.status = FAILED if status == FAILED else REFUSED
                        if "budget" in message:
                            result.budget_exhausted = True
            run.proofs.append(ptrace)
            result.statuses[name] = ptrace.status
        # a mutual induction stands or falls as a whole: when one member
        # fails, the others' obligations prove nothing on their own
        if len(group) > 1 and \
                any(result.statuses[name] != CERTIFIED for name in group):
            for name in group:
                if result.statuses[name] == CERTIFIED:
                    result.statuses[name] = FAILED
                    for ptrace in run.proofs:
                        if ptrace.proof_id == name:
                            ptrace.status = FAILED
                            ptrace.obligations.append(ObligationTrace(
                                name="mutual induction group", status=FAILED,
                                steps=[],
                                message="another proof of the induction "
                                        "group failed"))
        if all(result.statuses.get(name) == CERTIFIED for name in group):
            for name in group:
                proof = doc.proofs[name]
                rep = plans[name].rep
                if proof.method == 1 and not _is_constant(rep):
                    registry.certify_instance(proof.target, proof.at_n, name)
                else:
                    registry.certify_family(proof.target, name)
    return result


# ---------------------------------------------------------------------------
# formula check (tree count + corank readiness at a concrete parameter)

def check_formula(doc, formula_id, n, config=None):
    """Tree count plus corank-one certification of the instance at n.

    Returns (ok, budget_flag, report lines).
    """
    config = config or RunConfig()
    if formula_id not in doc.formulas:
        raise SemanticError("unknown formula %r" % formula_id)
    rep = doc.formulas[formula_id].representation
    lines = []
    dims, length = dim_and_length(rep)
    count = ones_count(rep)
    lines.append("formula %s: dim (%s), length %s, ones %s"
                 % (formula_id, ", ".join(str(d) for d in dims), length, count))
    ok = check_tree_count(rep)
    lines.append("tree count (ones = length - 1): %s" % ("ok" if ok else "FAIL"))
    budget_flag = False
    if ok:
        try:
            inst = instantiate_formula(rep, n) if rep.symbolic else rep
            prove_end_dim_one(inst, budget=config.budget)
            lines.append("corank-one certificate at n=%d: ok" % n)
        except (CorankNotOne, DimEqualsDelta) as e:
            lines.append("corank-one certificate at n=%d: FAIL (%s)" % (n, e))
            ok = False
        except CannotCertify as e:
            lines.append("corank-one certificate at n=%d: REFUSED (%s)" % (n, e))
            budget_flag = e.budget_exhausted
            ok = False
        except QtpError as e:
            lines.append("instance at n=%d: FAIL (%s)" % (n, e))
            ok = False
    return ok, budget_flag, lines
