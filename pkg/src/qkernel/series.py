"""Terminating basic hypergeometric series evaluation.

A :class:`SeriesSpec` is a fully instantiated series.  Two kinds exist:

* ``phi`` - a (r+1)phi_s with zero-count ``p`` in the van de Bult-Rains sense:
  ``p`` > 0 appends p zeros to the denominator, ``p`` < 0 appends -p zeros to
  the numerator.  Zeros are never stored as entries; only ``p`` carries them,
  and their entire effect is on the exponent of the (-1)^k q^binom(k,2) factor.
* ``W`` - a very-well-poised (r+1)W_r with head ``a`` and tail entries.  The
  +/- q*sqrt(a) over +/- sqrt(a) pair is replaced analytically by the factor
  (1 - a q^(2k))/(1 - a) per term, so no square root is ever taken.

For a terminating spec, the distinguished q^(-n) numerator entry is implied by
``termination``; it is not stored in ``numerator``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import (BaseNotInUnitDisk, Divergent, GuardViolated,
                     HeadDegenerate, NotTerminating)
from .qpoch import is_in_omega, is_in_omega_inf, qpoch
from .scalar import (QQi, is_exact, one_like, pow_int, scalar_is_zero,
                     to_float, zero_like)


@dataclass(frozen=True)
class SeriesSpec:
    """An instantiated phi or W series.

    numerator: entries beyond the implied q^(-n) (phi) / the W tail a_5..a_{r+1}.
    denominator: phi only; always empty for W.
    head: the very-well-poised parameter a (W only).
    termination: n for terminating series, None for nonterminating.
    """

    kind: str                      # "phi" | "W"
    numerator: tuple = ()
    denominator: tuple = ()
    p: int = 0
    base: object = None
    argument: object = None
    termination: Optional[int] = None
    head: object = None

    def __post_init__(self):
        if self.kind not in ("phi", "W"):
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.kind == "W":
            if self.head is None:
                raise ValueError("W series needs a head parameter")
            if self.denominator:
                raise ValueError("W series stores only head and tails")

    @property
    def terminating(self):
        return self.termination is not None

    def sign_exponent(self):
        """Exponent e of the per-term ((-1)^k q^binom(k,2))^e factor."""
        if self.kind == "W":
            return self.p
        r_eff = len(self.numerator) + (1 if self.terminating else 0) + max(-self.p, 0)
        s_eff = len(self.denominator) + max(self.p, 0)
        return 1 + s_eff - r_eff

    def key(self):
        """Hashable structural key (numerator/denominator as multisets)."""
        def k(x):
            return (str(type(x).__name__), str(x))
        return (self.kind, tuple(sorted(map(k, self.numerator))),
                tuple(sorted(map(k, self.denominator))), self.p,
                k(self.base), k(self.argument), self.termination,
                k(self.head) if self.head is not None else None)


@dataclass(frozen=True)
class Violation:
    """One violated series precondition."""

    kind: str
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.detail})" if self.detail else self.kind


def _unit_modulus(x):
    if isinstance(x, QQi):
        return x.is_unit_modulus()
    return abs(abs(to_float(x)) - 1.0) < 1e-13


def guards(spec):
    """List every violated precondition of the spec (empty list = admissible).

    Checks: base nonzero and off the unit circle, denominator entries nonzero
    and outside Omega_q^n, and for W-kind the head nondegeneracy plus the
    Omega conditions of the expanded phi-form denominator entries.
    """
    out = []
    q = spec.base
    if scalar_is_zero(q):
        out.append(Violation("BaseZero"))
        return out
    if _unit_modulus(q):
        out.append(Violation("BaseOnUnitCircle", "|q| = 1"))
    n = spec.termination
    if spec.kind == "phi":
        for j, b in enumerate(spec.denominator):
            if scalar_is_zero(b):
                out.append(Violation("DenominatorZero", f"b{j + 1}"))
            elif n is not None:
                if is_in_omega(b, q, n):
                    out.append(Violation("DenominatorInOmega", f"b{j + 1}"))
            elif isinstance(b, QQi) and isinstance(q, QQi) and q.abs_sq() < 1:
                if is_in_omega_inf(b, q):
                    out.append(Violation("DenominatorInOmega", f"b{j + 1} (infinite)"))
    else:
        if n is None:
            out.append(Violation("NotTerminating", "W spec must terminate"))
            return out
        a = spec.head
        if scalar_is_zero(a):
            out.append(Violation("HeadZero"))
        else:
            aq2k = a
            q2 = q * q
            for k in range(n):
                if aq2k == 1:
                    out.append(Violation("HeadDegenerate", f"a*q^{2 * k} = 1"))
                    break
                aq2k = aq2k * q2
            qn1a = pow_int(q, n + 1) * a
            if is_in_omega(qn1a, q, n):
                out.append(Violation("DenominatorInOmega", "q^(n+1)*a"))
            for j, t in enumerate(spec.numerator):
                if scalar_is_zero(t):
                    out.append(Violation("TailZero", f"a{j + 5}"))
                    continue
                if is_in_omega(q * a / t, q, n):
                    out.append(Violation("DenominatorInOmega", f"q*a/a{j + 5}"))
    return out


def _require_admissible(spec):
    bad = guards(spec)
    if bad:
        if any(v.kind == "HeadDegenerate" for v in bad):
            raise HeadDegenerate([str(v) for v in bad])
        raise GuardViolated([str(v) for v in bad])


def eval_phi(spec):
    """Exact-or-float value of a terminating phi spec.

    Sum over k = 0..n of the standard term, with the zero count p entering
    only through the exponent of (-1)^k q^binom(k,2).
    """
    if spec.kind != "phi":
        raise ValueError("eval_phi expects a phi spec")
    if not spec.terminating:
        raise NotTerminating("use eval_phi_nonterminating for nonterminating series")
    _require_admissible(spec)
    n = spec.termination
    q = spec.base
    z = spec.argument
    e = spec.sign_exponent()
    one = one_like(q)
    qmn = pow_int(q, -n)  # the q^(-n) entry
    total = one
    term = one
    qk1 = one                      # q^(k-1) while processing term k
    qk = one                       # q^k
    for k in range(1, n + 1):
        qk = qk * q
        term = term * (one - qmn * qk1)
        for a in spec.numerator:
            term = term * (one - a * qk1)
        term = term / (one - qk)
        for b in spec.denominator:
            term = term / (one - b * qk1)
        if e:
            term = term * pow_int(-qk1, e)
        term = term * z
        total = total + term
        qk1 = qk1 * q
    return total


def eval_w(spec):
    """Value of a terminating very-well-poised W spec.

    Identical to eval_phi on the expanded phi-form, but with the +/- sqrt(a)
    pair folded into the per-term factor (1 - a q^(2k))/(1 - a).
    """
    if spec.kind != "W":
        raise ValueError("eval_w expects a W spec")
    if not spec.terminating:
        raise NotTerminating("nonterminating W series are out of scope")
    _require_admissible(spec)
    n = spec.termination
    q = spec.base
    z = spec.argument
    a = spec.head
    e = spec.p
    one = one_like(q)
    qmn = pow_int(q, -n)
    qn1a = pow_int(q, n + 1) * a
    q2 = q * q
    one_minus_a = one - a
    total = one
    term = one
    qk1 = one
    qk = one
    q2k = one
    for k in range(1, n + 1):
        qk = qk * q
        q2k = q2k * q2
        term = term * (one - qmn * qk1) * (one - a * qk1)
        for t in spec.numerator:
            term = term * (one - t * qk1)
        term = term / (one - qk) / (one - qn1a * qk1)
        for t in spec.numerator:
            term = term / (one - (q * a / t) * qk1)
        if e:
            term = term * pow_int(-qk1, e)
        term = term * z
        total = total + term * ((one - a * q2k) / one_minus_a)
        qk1 = qk1 * q
    return total


def eval_phi_nonterminating(spec, rel_tol=1e-12, max_terms=10000):
    """Partial sums of a nonterminating phi series, complex-valued.

    Requires |q| < 1.  Convergence: always for r <= s (effective counts), and
    |z| < 1 when r = s + 1; otherwise Divergent.  Stops when a geometric tail
    bound falls below rel_tol relative to the running sum.
    """
    if spec.kind != "phi":
        raise ValueError("eval_phi_nonterminating expects a phi spec")
    q = to_float(spec.base)
    z = to_float(spec.argument)
    if abs(q) >= 1.0:
        raise BaseNotInUnitDisk(f"|q| = {abs(q)} >= 1")
    r_eff = len(spec.numerator) + (1 if spec.terminating else 0) + max(-spec.p, 0)
    s_eff = len(spec.denominator) + max(spec.p, 0)
    if r_eff == s_eff + 1 and abs(z) >= 1.0 and not spec.terminating:
        raise Divergent(f"|z| = {abs(z)} >= 1 with r = s + 1")
    if r_eff > s_eff + 1 and not spec.terminating and z != 0:
        raise Divergent("r > s + 1 nonterminating series diverges")
    e = spec.sign_exponent()
    num = [to_float(a) for a in spec.numerator]
    den = [to_float(b) for b in spec.denominator]
    if spec.terminating:
        num = [q ** (-spec.termination)] + num
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    qk1 = 1.0 + 0.0j
    qk = 1.0 + 0.0j
    prev_abs = None
    for k in range(1, max_terms):
        qk *= q
        for a in num:
            term *= (1.0 - a * qk1)
        term /= (1.0 - qk)
        for b in den:
            term /= (1.0 - b * qk1)
        if e:
            term *= (-qk1) ** e
        term *= z
        total += term
        qk1 *= q
        t = abs(term)
        if prev_abs is not None and prev_abs > 0:
            ratio = t / prev_abs
            if ratio < 1.0 and t * ratio / (1.0 - ratio) < rel_tol * max(1.0, abs(total)):
                return total
        if t == 0.0 and k > len(num) + 2:
            return total
        prev_abs = t
    return total


@dataclass(frozen=True)
class Classification:
    balanced: Optional[int]        # the l with q^l * prod(num) = prod(den), if any
    well_poised: bool
    very_well_poised: bool


def classify(spec, max_ell=64):
    """Balance / well-poised / very-well-poised classification.

    For terminating phi specs the implied q^(-n) counts as the first numerator
    entry.  Poisedness is checked as a multiset pairing: some head h with
    every remaining numerator entry u matched to a denominator entry v with
    u*v = q*h.  The very-well-poised pair is detected as two numerator entries
    with sum 0 and product -q^2*h (and the matching +/- sqrt pair downstairs).
    Specs with zero-padding (p != 0) classify by construction: W-kind is
    very-well-poised, padded phi-kind reports no balance and no poisedness.
    """
    if spec.kind == "W":
        return Classification(None, True, True)
    q = spec.base
    num = list(spec.numerator)
    if spec.terminating:
        num = [pow_int(q, -spec.termination)] + num
    den = list(spec.denominator)
    if spec.p != 0:
        return Classification(None, False, False)

    balanced = None
    if num and not any(scalar_is_zero(a) for a in num):
        prod_num = one_like(q)
        for a in num:
            prod_num = prod_num * a
        prod_den = one_like(q)
        for b in den:
            prod_den = prod_den * b
        ratio = prod_den / prod_num
        qp = one_like(q)
        for ell in range(0, max_ell + 1):
            if ratio == qp:
                balanced = ell
                break
            qp = qp * q
        if balanced is None:
            qp = one_like(q)
            for ell in range(1, max_ell + 1):
                qp = qp / q
                if ratio == qp:
                    balanced = -ell
                    break

    well = False
    vwp = False
    if len(num) == len(den) + 1 and not any(scalar_is_zero(a) for a in num):
        for hi, h in enumerate(num):
            rest = num[:hi] + num[hi + 1:]
            used = [False] * len(den)
            target = q * h
            ok = True
            pairing = []
            for u in rest:
                found = False
                for j, v in enumerate(den):
                    if not used[j] and u * v == target:
                        used[j] = True
                        pairing.append((u, v))
                        found = True
                        break
                if not found:
                    ok = False
                    break
            if ok:
                well = True
                # +/- q sqrt(h) upstairs: sum 0, product -q^2 h
                for i in range(len(rest)):
                    for j in range(i + 1, len(rest)):
                        x, y = rest[i], rest[j]
                        if scalar_is_zero(x + y) and x * y == -(q * q) * h:
                            vwp = True
                break
    return Classification(balanced, well, vwp)
