"""The machine-readable identity registry, sampler and verifier.

Identities live in ``data/*.qid`` files (one per thematic block) in the
corpus DSL; adding an identity requires no code change.  Verification is
pointwise and exact: every member of an identity is evaluated at seeded
random rational points and the values must agree structurally (float mode
compares at a relative tolerance instead).
"""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from itertools import permutations
from math import factorial

from gmpy2 import mpq

from .errors import (CorpusLoadError, GuardViolated, HeightOverflow,
                     ParseError, PrefactorPole, SamplingExhausted,
                     UnsupportedExact)
from .expr import Assignment, Expr, Monomial, eval_expr, parse_expr
from .qpoch import is_in_omega_inf
from .scalar import QQi, approx_eq, rel_residual, to_float
from .series import guards as series_guards

_DATA_FILES = (
    "representations_3param.qid",
    "representations_2param.qid",
    "representations_1param.qid",
    "representations_0param.qid",
    "limit_functions.qid",
    "transforms_3param.qid",
    "transforms_2param.qid",
    "transforms_1param.qid",
    "transforms_0param.qid",
    "summations.qid",
)

_KINDS = ("chain", "interchange", "summation", "representation")


@dataclass(frozen=True)
class Member:
    """One displayed member of an identity."""

    label: str
    expr: Expr
    roles: tuple = ()              # role placeholder names, () if concrete
    text: str = ""

    def expand(self, params):
        """Concrete variants over all role assignments, deduplicated."""
        if not self.roles:
            return [(self.label, (), self.expr)]
        out = []
        seen = set()
        for perm in permutations(params, len(self.roles)):
            mapping = {f"a{role}": Monomial.of_name(name)
                       for role, name in zip(self.roles, perm)}
            e = self.expr.substitute(mapping)
            key = e.key()
            if key in seen:
                continue
            seen.add(key)
            out.append((self.label, perm, e))
        return out


@dataclass
class Identity:
    """A named chain of expressions asserted pairwise equal on a domain."""

    id: str
    kind: str
    source: str
    params: tuple
    members: list
    symmetric: tuple = ()
    closed: Expr | None = None
    family: str | None = None
    guards: tuple = ()
    filename: str = ""
    line: int = 0

    def __post_init__(self):
        if self.kind == "summation" and self.closed is None:
            raise CorpusLoadError(f"summation identity {self.id} needs a closed form",
                                  self.filename, self.line)

    def expanded_members(self):
        """All (label, roles, Expr) variants in display order."""
        out = []
        for m in self.members:
            out.extend(m.expand(self.params))
        return out

    def uses_z(self):
        return any("z" in m.expr.free_params() for m in self.members)

    def free_names(self):
        names = set()
        for m in self.members:
            names |= m.expr.free_params()
        if self.closed is not None:
            names |= self.closed.free_params()
        names.discard("z")
        # role placeholders resolve to concrete params
        for m in self.members:
            for r in m.roles:
                names.discard(f"a{r}")
        return tuple(sorted(names))


# ---------------------------------------------------------------------------
# Corpus file parsing
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^\[identity\s+([A-Za-z0-9_.]+)\]$")
_MEMBER_RE = re.compile(r"^member\s+([A-Za-z0-9_.]+)(?:\s+roles=([a-z,\s]+?))?\s*:\s*(.+)$")
_ATTR_RE = re.compile(r"^(kind|source|params|symmetric|family|guard|closed)\s*:\s*(.*)$")


def _parse_file(name, text):
    identities = []
    current = None

    def finish():
        nonlocal current
        if current is not None:
            if not current["members"]:
                raise CorpusLoadError(f"identity {current['id']} has no members",
                                      name, current["line"])
            identities.append(Identity(
                id=current["id"], kind=current["kind"], source=current["source"],
                params=tuple(current["params"]), members=current["members"],
                symmetric=tuple(current["symmetric"]), closed=current["closed"],
                family=current["family"], guards=tuple(current["guards"]),
                filename=name, line=current["line"]))
            current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER_RE.match(line)
        if m:
            finish()
            current = dict(id=m.group(1), kind="chain", source="", params=[],
                           symmetric=[], members=[], closed=None, family=None,
                           guards=[], line=lineno)
            continue
        if current is None:
            raise CorpusLoadError("content outside an [identity ...] block", name, lineno)
        m = _MEMBER_RE.match(line)
        if m:
            label, roles, body = m.group(1), m.group(2), m.group(3)
            roles_t = tuple(r.strip() for r in roles.split(",")) if roles else ()
            try:
                expr = parse_expr(body)
            except ParseError as exc:
                raise CorpusLoadError(f"member {label}: {exc}", name, lineno) from exc
            current["members"].append(Member(label, expr, roles_t, body))
            continue
        m = _ATTR_RE.match(line)
        if m:
            key, val = m.group(1), m.group(2).strip()
            if key == "kind":
                if val not in _KINDS:
                    raise CorpusLoadError(f"unknown kind {val!r}", name, lineno)
                current["kind"] = val
            elif key == "source":
                current["source"] = val
            elif key in ("params", "symmetric"):
                current[key] = [p.strip() for p in val.split(",") if p.strip()]
            elif key == "family":
                current["family"] = val
            elif key == "guard":
                current["guards"] += [g.strip() for g in val.split(";") if g.strip()]
            elif key == "closed":
                try:
                    current["closed"] = parse_expr(val)
                except ParseError as exc:
                    raise CorpusLoadError(f"closed form: {exc}", name, lineno) from exc
            continue
        raise CorpusLoadError(f"unparseable line: {raw!r}", name, lineno)
    finish()
    return identities


_REGISTRY_CACHE = None


def registry(refresh=False):
    """The complete identity registry, keyed by id, in file order."""
    global _REGISTRY_CACHE
    if _REGISTRY_CACHE is not None and not refresh:
        return _REGISTRY_CACHE
    out = {}
    for fname in _DATA_FILES:
        text = resources.files("qkernel.data").joinpath(fname).read_text()
        for ident in _parse_file(fname, text):
            if ident.id in out:
                raise CorpusLoadError(f"duplicate identity id {ident.id}", fname)
            out[ident.id] = ident
    _REGISTRY_CACHE = out
    return out


def get_identity(ident_id):
    reg = registry()
    if ident_id not in reg:
        raise KeyError(f"unknown identity {ident_id!r}")
    return reg[ident_id]


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic sampling plan: same plan, same sample sequence."""

    seed: int = 0
    trials: int = 50
    n_values: tuple = (0, 1, 2, 3, 4, 5, 6)
    height_bound: int = 16
    max_rejections: int = 10000


def _rng_for(seed, trial):
    return random.Random(seed * 1_000_003 + trial)


def _rand_rational(rng, height):
    num = 0
    while num == 0:
        num = rng.randint(-height, height)
    den = rng.randint(1, height)
    return QQi(mpq(num, den))


def _rand_q(rng, height, unit_disk=False):
    while True:
        v = _rand_rational(rng, height)
        a2 = v.abs_sq()
        if a2 == 0 or a2 == 1:
            continue
        if unit_disk and a2 > 1:
            continue
        return v


def _instantiated_specs(expr, asg):
    if expr.series is None:
        return []
    return [expr.series.instantiate(asg.lookup, asg.q, asg.n)]


def _admissible(ident, exprs, asg):
    """True when every expression accepts the assignment.

    Checks series guards structurally, catches finite prefactor poles via a
    trial evaluation of the Pochhammer factors (cheap, exact), and tests
    infinite-product denominators against Omega_q exactly.
    """
    for e in exprs:
        for spec in _instantiated_specs(e, asg):
            if series_guards(spec):
                return False
        finite = tuple(p for p in e.pochs if not p.length.infinite)
        try:
            eval_expr(Expr(prefactor=e.prefactor, pochs=finite), asg)
        except (PrefactorPole, HeightOverflow):
            return False
        for p in e.pochs:
            if p.length.infinite and p.denominator:
                for arg in p.args:
                    val = arg.evaluate(asg.lookup, asg.q, asg.n)
                    if is_in_omega_inf(val, asg.q):
                        return False
    return True


# Float-mode conditioning control: a sample point is only usable for a
# double-precision comparison at rel_tol 1e-10 when double evaluation at the
# point actually carries fewer than ~1e-11 relative rounding error.  For
# exactly evaluable members that is measured directly against the exact value
# (a wrong formula still disagrees by O(1) at random points, so this filter
# removes no bug-catching power).  Float-only members, which have no exact
# value, are screened by a deterministic input-perturbation probe bounding
# their condition number instead.
_FLOAT_ERR_LIMIT = 1e-11
_PERTURB = 1e-13
_PERTURB_LIMIT = 1e-10


def _float_conditioned(exprs, asg):
    base = asg.to_float()
    pert = None
    for e in exprs:
        try:
            vf = eval_expr(e, base, rel_tol=1e-14)
        except Exception:
            return False
        if not (abs(vf) < 1e120):
            return False
        if e.is_float_only():
            if pert is None:
                pvalues = {k: v * (1.0 + _PERTURB * (i + 1))
                           for i, (k, v) in enumerate(sorted(base.values.items()))}
                pert = Assignment(pvalues, base.q * (1.0 + _PERTURB), base.n,
                                  base.z * (1.0 - _PERTURB) if base.z is not None else None)
            try:
                vp = eval_expr(e, pert, rel_tol=1e-14)
            except Exception:
                return False
            if abs(vp - vf) > _PERTURB_LIMIT * max(1.0, abs(vf)):
                return False
        else:
            try:
                ve = to_float(eval_expr(e, asg))
            except (HeightOverflow, UnsupportedExact):
                return False
            if abs(vf - ve) > _FLOAT_ERR_LIMIT * max(1.0, abs(ve)):
                return False
    return True


def sample_point(ident, plan, trial, _exprs=None, float_safe=False):
    """Rejection-sample an admissible assignment for the identity.

    Deterministic in (plan.seed, trial).  With ``float_safe`` the point must
    additionally be well conditioned for double-precision evaluation.  Raises
    SamplingExhausted after plan.max_rejections rejected candidates.
    """
    if trial >= plan.trials:
        raise ValueError("trial index beyond plan.trials")
    rng = _rng_for(plan.seed, trial)
    n = plan.n_values[trial % len(plan.n_values)]
    exprs = _exprs if _exprs is not None else \
        [e for _, _, e in ident.expanded_members()] \
        + ([ident.closed] if ident.closed is not None else [])
    names = ident.free_names()
    needs_z = ident.uses_z()
    unit_disk = "unitdisk(q)" in ident.guards
    rejections = 0
    while True:
        values = {name: _rand_rational(rng, plan.height_bound) for name in names}
        q = _rand_q(rng, plan.height_bound, unit_disk=unit_disk)
        z = None
        if needs_z:
            z = _rand_rational(rng, plan.height_bound)
        asg = Assignment(values=values, q=q, n=n, z=z)
        if _admissible(ident, exprs, asg) and \
                (not float_safe or _float_conditioned(exprs, asg)):
            return asg
        rejections += 1
        if rejections >= plan.max_rejections:
            raise SamplingExhausted(
                f"{ident.id}: no admissible point in {plan.max_rejections} draws "
                f"(seed {plan.seed}, trial {trial})")


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class Counterexample:
    assignment: str
    member_i: str
    member_j: str
    lhs: str
    rhs: str
    residual: float

    def to_dict(self):
        return {"assignment": self.assignment, "member_i": self.member_i,
                "member_j": self.member_j, "lhs": self.lhs, "rhs": self.rhs,
                "residual": self.residual}


@dataclass
class VerificationReport:
    identity_id: str
    mode: str
    trials_run: int = 0
    trials_passed: int = 0
    rejections: int = 0
    skipped_members: tuple = ()
    counterexamples: list = field(default_factory=list)
    max_residual: float = 0.0
    wall_time: float = 0.0
    budget_exhausted: bool = False

    @property
    def passed(self):
        return self.trials_run > 0 and not self.counterexamples \
            and self.trials_passed == self.trials_run

    def to_dict(self, include_time=True):
        d = {
            "identity": self.identity_id,
            "mode": self.mode,
            "trials_run": self.trials_run,
            "trials_passed": self.trials_passed,
            "rejections": self.rejections,
            "skipped_members": list(self.skipped_members),
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "max_residual": self.max_residual,
            "passed": self.passed,
            "budget_exhausted": self.budget_exhausted,
        }
        if include_time:
            d["wall_time_s"] = round(self.wall_time, 6)
        return d


FLOAT_REL_TOL = 1e-10


def verify(ident, plan=None, mode="exact", time_budget=None):
    """Verify all members (and closed form) agree at seeded sample points.

    Exact mode requires structural equality of exact scalars; float-only
    members are skipped there and reported.  Float mode compares complex
    values with approx_eq at rel_tol 1e-10 on the same assignments.
    Failures are report content, never exceptions.
    """
    if isinstance(ident, str):
        ident = get_identity(ident)
    if plan is None:
        plan = SamplePlan()
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    start = time.monotonic()
    expanded = ident.expanded_members()
    labeled = [(f"{label}[{','.join(map(str, roles))}]" if roles else label, e)
               for label, roles, e in expanded]
    if ident.closed is not None:
        labeled.append(("closed", ident.closed))
    skipped = tuple(lbl for lbl, e in labeled if mode == "exact" and e.is_float_only())
    active = [(lbl, e) for lbl, e in labeled if lbl not in skipped]
    all_exprs = [e for _, _, e in expanded] + \
        ([ident.closed] if ident.closed is not None else [])
    report = VerificationReport(ident.id, mode, skipped_members=skipped)
    for trial in range(plan.trials):
        if time_budget is not None and time.monotonic() - start > time_budget:
            report.budget_exhausted = True
            break
        try:
            asg = sample_point(ident, plan, trial, _exprs=all_exprs,
                               float_safe=(mode == "float"))
        except SamplingExhausted:
            raise
        report.trials_run += 1
        easg = asg if mode == "exact" else asg.to_float()
        values = []
        retry = False
        for lbl, e in active:
            try:
                values.append((lbl, eval_expr(e, easg, rel_tol=1e-14)))
            except (HeightOverflow, UnsupportedExact) as exc:
                # pathological point for this member: drop the trial
                report.trials_run -= 1
                report.rejections += 1
                retry = True
                break
        if retry:
            continue
        ok = True
        base_lbl, base_val = values[0]
        for lbl, val in values[1:]:
            if mode == "exact":
                agree = (val == base_val)
                resid = 0.0 if agree else rel_residual(val, base_val)
            else:
                resid = rel_residual(val, base_val)
                agree = resid <= FLOAT_REL_TOL
            report.max_residual = max(report.max_residual, resid)
            if not agree:
                ok = False
                report.counterexamples.append(Counterexample(
                    asg.describe(), base_lbl, lbl, str(base_val), str(val), resid))
        if ok:
            report.trials_passed += 1
    report.wall_time = time.monotonic() - start
    return report


# ---------------------------------------------------------------------------
# Variant enumeration
# ---------------------------------------------------------------------------

_VARIANT_GROUPS = {
    "threeparam_q": "cor4.3",
    "threeparam_qinv": "cor4.13",
    "twoparam_q": "cor5.8",
    "twoparam_qinv": "cor5.14b",
}

VARIANT_CONVENTION_NOTE = (
    "variant counting convention: (native-sign W forms x parameter "
    "permutations) + (permutations^2 for the single opposite-sign W member); "
    "inferred from the stated 6x6 block structure")


def enumerate_variants(group):
    """Count distinct (permutation x member) variants of a chain identity.

    Native-sign very-well-poised members each contribute one variant per
    permutation of the symmetric parameters; the single opposite-sign member
    contributes its full interchange family (permutations squared).
    """
    if group not in _VARIANT_GROUPS:
        raise KeyError(f"unknown variant group {group!r}; "
                       f"one of {sorted(_VARIANT_GROUPS)}")
    ident = get_identity(_VARIANT_GROUPS[group])
    perms = factorial(len(ident.symmetric))
    native_p = ident.members[0].expr.series.p
    native = sum(1 for m in ident.members
                 if m.expr.series.kind == "W" and m.expr.series.p == native_p)
    opposite = sum(1 for m in ident.members
                   if m.expr.series.kind == "W" and m.expr.series.p == -native_p)
    if opposite != 1:
        raise CorpusLoadError(
            f"{ident.id}: expected exactly one opposite-sign W member, found {opposite}")
    return native * perms + opposite * perms * perms


# ---------------------------------------------------------------------------
# Mutation harness
# ---------------------------------------------------------------------------


def mutate_member_text(ident, rng):
    """Return (label, mutated_text) with a single token changed.

    Used by the mutation-sensitivity harness: a corrupted member must be
    caught by verify within a few trials.  Retries until the mutation parses
    and is structurally different from the original.
    """
    for _ in range(200):
        member = rng.choice(ident.members)
        text = member.text
        tokens = list(re.finditer(r"\d+|[A-Za-z_][A-Za-z_0-9]*", text))
        cands = []
        names = set(ident.params) | {"z"}
        for t in tokens:
            tok = t.group()
            if tok.isdigit():
                cands.append((t, "int"))
            elif tok in names and len(names) > 1:
                cands.append((t, "name"))
        if not cands:
            continue
        t, kind = rng.choice(cands)
        if kind == "int":
            delta = rng.choice([1, -1]) if int(t.group()) > 1 else 1
            new_tok = str(int(t.group()) + delta)
        else:
            others = sorted(names - {t.group()})
            if not others:
                continue
            new_tok = rng.choice(others)
        mutated = text[:t.start()] + new_tok + text[t.end():]
        try:
            new_expr = parse_expr(mutated)
        except ParseError:
            continue
        if new_expr.key() == member.expr.key():
            continue
        if new_expr.free_params() - set(ident.params) - {"z"}:
            continue
        return member.label, mutated
    raise RuntimeError(f"could not build a mutation for {ident.id}")


def mutated_identity(ident, rng):
    """A copy of the identity with one member's text corrupted by one token."""
    label, mutated = mutate_member_text(ident, rng)
    members = [Member(m.label, parse_expr(mutated), m.roles, mutated)
               if m.label == label else m for m in ident.members]
    return Identity(id=f"{ident.id}~mut", kind=ident.kind, source=ident.source,
                    params=ident.params, members=members,
                    symmetric=ident.symmetric, closed=ident.closed,
                    family=ident.family, guards=ident.guards), label
