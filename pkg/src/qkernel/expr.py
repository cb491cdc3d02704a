"""Symbolic expression templates and the corpus DSL.

An :class:`Expr` is a monomial prefactor times a product of q-Pochhammer
factors times (at most) one series template.  All exponents are affine in the
termination degree n, with an extra binom(n,2) slot on the q-exponent; this
small closed language covers every prefactor in the corpus.

The text form (grammar in docs/dsl.md) is what the corpus data files contain;
``parse_expr`` and ``render_expr`` round-trip it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from gmpy2 import mpq

from .errors import ParseError, PrefactorPole, UnsupportedExact
from .qpoch import qpoch, qpoch_inf
from .scalar import ONE, QQi, binom2, is_exact, one_like, pow_int, scalar_is_zero, to_float
from .series import SeriesSpec, eval_phi, eval_phi_nonterminating, eval_w

# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    """coeff * (-1)^(s0+s1*n) * q^(q0+q1*n+q2*binom(n,2)) * prod name^(e0+e1*n).

    Canonical: coeff is kept real-positive when real (its sign lives in s0),
    the sign exponents are reduced mod 2, and powers is a name-sorted tuple of
    (name, e0, e1) with (e0, e1) != (0, 0).  Names never include 'q'.
    """

    coeff: QQi = ONE
    s0: int = 0
    s1: int = 0
    q0: int = 0
    q1: int = 0
    q2: int = 0
    powers: tuple = ()

    def __post_init__(self):
        s0, s1 = self.s0 % 2, self.s1 % 2
        coeff = self.coeff
        if not isinstance(coeff, QQi):
            coeff = QQi(coeff)
        if coeff.is_real() and coeff.re < 0:
            coeff = -coeff
            s0 ^= 1
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "s1", s1)

    @staticmethod
    def unit():
        return Monomial()

    @staticmethod
    def of_name(name):
        return Monomial(powers=((name, 1, 0),))

    @staticmethod
    def of_q(q0=1, q1=0, q2=0):
        return Monomial(q0=q0, q1=q1, q2=q2)

    @staticmethod
    def of_coeff(c):
        return Monomial(coeff=c if isinstance(c, QQi) else QQi(c))

    def is_unit(self):
        return (self.coeff.is_one() and not self.s0 and not self.s1
                and not self.q0 and not self.q1 and not self.q2 and not self.powers)

    def is_bare_q(self):
        return (self.coeff.is_one() and not self.s0 and not self.s1
                and (self.q0, self.q1, self.q2) == (1, 0, 0) and not self.powers)

    def mul(self, other):
        pw = {n: (a, b) for n, a, b in self.powers}
        for n, a, b in other.powers:
            c, d = pw.get(n, (0, 0))
            e0, e1 = c + a, d + b
            if e0 or e1:
                pw[n] = (e0, e1)
            elif n in pw:
                del pw[n]
        return Monomial(self.coeff * other.coeff, self.s0 + other.s0,
                        self.s1 + other.s1, self.q0 + other.q0,
                        self.q1 + other.q1, self.q2 + other.q2,
                        tuple(sorted((n, a, b) for n, (a, b) in pw.items())))

    def inv(self):
        return Monomial(self.coeff.inv(), self.s0, self.s1, -self.q0, -self.q1,
                        -self.q2, tuple((n, -a, -b) for n, a, b in self.powers))

    def pow_affine(self, f0, f1=0):
        """Raise to the exponent f0 + f1*n.

        With f1 != 0 the coefficient must be +/-1 and neither the binom slot
        nor any n-dependent parameter exponent may be present (the result
        would leave the affine-in-n language).
        """
        if f1 == 0:
            return Monomial(pow_int(self.coeff, f0), self.s0 * f0, self.s1 * f0,
                            self.q0 * f0, self.q1 * f0, self.q2 * f0,
                            tuple((n, a * f0, b * f0) for n, a, b in self.powers
                                  if a * f0 or b * f0))
        coeff = self.coeff
        s0, s1 = self.s0, self.s1
        if coeff == QQi(-1):
            coeff, s0 = ONE, s0 ^ 1
        if not coeff.is_one():
            raise ValueError(
                f"cannot raise coefficient {self.coeff} to an n-dependent power")
        if self.q2:
            raise ValueError("cannot raise a binom(n,2) q-power to an n-dependent power")
        ns0 = (s0 * f0) % 2
        ns1 = (s0 * f1 + s1 * f0 + s1 * f1) % 2  # n^2 == n (mod 2)
        nq0 = self.q0 * f0
        nq1 = self.q0 * f1 + self.q1 * f0 + self.q1 * f1  # n^2 = n + 2*binom(n,2)
        nq2 = 2 * self.q1 * f1
        pws = []
        for name, a, b in self.powers:
            if b * f1 != 0:
                raise ValueError(f"exponent of {name} would become quadratic in n")
            e0, e1 = a * f0, a * f1 + b * f0
            if e0 or e1:
                pws.append((name, e0, e1))
        return Monomial(ONE, ns0, ns1, nq0, nq1, nq2, tuple(sorted(pws)))

    def substitute(self, mapping):
        """Replace parameter names by monomials (role expansion, documented
        interchange substitutions)."""
        out = Monomial(self.coeff, self.s0, self.s1, self.q0, self.q1, self.q2)
        for name, a, b in self.powers:
            img = mapping.get(name)
            if img is None:
                out = out.mul(Monomial(powers=((name, a, b),)))
            else:
                out = out.mul(img.pow_affine(a, b))
        return out

    def free_params(self):
        return {n for n, _, _ in self.powers}

    def evaluate(self, lookup, q, n):
        """Value at a point; ``lookup(name)`` supplies parameter scalars."""
        v = self.coeff if is_exact(q) else self.coeff.to_complex()
        if (self.s0 + self.s1 * n) % 2:
            v = -v
        qe = self.q0 + self.q1 * n + self.q2 * binom2(n)
        if qe:
            v = v * pow_int(q, qe)
        for name, a, b in self.powers:
            e = a + b * n
            if e:
                v = v * pow_int(lookup(name), e)
        return v

    def render(self):
        parts = []
        if not self.coeff.is_one():
            parts.append(_render_coeff(self.coeff))
        if self.s1:
            parts.append(f"(-1)^({_render_affine(self.s0, self.s1, 0)})")
        if self.q0 or self.q1 or self.q2:
            parts.append(f"q^({_render_affine(self.q0, self.q1, self.q2)})")
        for name, a, b in self.powers:
            if (a, b) == (1, 0):
                parts.append(name)
            else:
                parts.append(f"{name}^({_render_affine(a, b, 0)})")
        body = "*".join(parts) if parts else "1"
        if self.s0 and not self.s1:
            return "-" + body
        return body

    def key(self):
        return (str(self.coeff), self.s0, self.s1, self.q0, self.q1, self.q2,
                self.powers)


def _render_coeff(c):
    if not c.is_real():
        raise ValueError("complex rational coefficients are not part of the DSL")
    num, den = c.re.numerator, c.re.denominator
    return f"{num}/{den}" if den != 1 else f"{num}"


def _render_affine(c0, c1, c2):
    terms = []
    if c0:
        terms.append(f"{c0:+d}")
    if c1:
        terms.append("+n" if c1 == 1 else ("-n" if c1 == -1 else f"{c1:+d}*n"))
    if c2:
        terms.append("+binom" if c2 == 1 else ("-binom" if c2 == -1 else f"{c2:+d}*binom"))
    if not terms:
        return "0"
    s = "".join(terms)
    return s[1:] if s.startswith("+") else s


# ---------------------------------------------------------------------------
# Pochhammer factors and series templates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PochLength:
    """Finite length l0 + l1*n (l1 in {0,1,2}) or the infinite symbol."""

    l0: int = 0
    l1: int = 0
    infinite: bool = False

    def at(self, n):
        if self.infinite:
            raise ValueError("infinite length has no finite value")
        v = self.l0 + self.l1 * n
        if v < 0:
            raise ValueError(f"Pochhammer length {self.l0}+{self.l1}n negative at n={n}")
        return v

    def render(self):
        if self.infinite:
            return "inf"
        if (self.l0, self.l1) == (0, 1):
            return "n"
        if self.l1 and not self.l0:
            return f"{self.l1}n"
        if not self.l1:
            return str(self.l0)
        raise ValueError(f"unrenderable length {self.l0}+{self.l1}n")


LENGTH_N = PochLength(0, 1)
LENGTH_2N = PochLength(0, 2)
LENGTH_INF = PochLength(infinite=True)


@dataclass(frozen=True)
class PochFactor:
    """(arg_1, ..., arg_k; base)_length in numerator or denominator position.

    base_exp in {1, -1, 2} selects base q, q^-1 or q^2.
    """

    args: tuple
    base_exp: int = 1
    length: PochLength = LENGTH_N
    denominator: bool = False

    def free_params(self):
        out = set()
        for a in self.args:
            out |= a.free_params()
        return out

    def substitute(self, mapping):
        return PochFactor(tuple(a.substitute(mapping) for a in self.args),
                          self.base_exp, self.length, self.denominator)

    def render(self):
        base = {1: "q", -1: "q^-1", 2: "q^2"}[self.base_exp]
        inner = ", ".join(a.render() for a in self.args)
        return f"poch({inner}; {base}; {self.length.render()})"

    def key(self):
        return (tuple(sorted(a.key() for a in self.args)), self.base_exp,
                (self.length.l0, self.length.l1, self.length.infinite),
                self.denominator)


_QMN_KEY = Monomial.of_q(0, -1, 0).key()  # the literal q^-n termination marker


@dataclass(frozen=True)
class SeriesTemplate:
    """A series whose entries are monomials in the free parameters.

    For phi-kind, ``numerator`` holds the entries beyond the implied q^-n;
    for W-kind it holds the tail entries and ``head`` the very-well-poised
    parameter.
    """

    kind: str
    p: int
    numerator: tuple
    denominator: tuple
    argument: Monomial = field(default_factory=Monomial.unit)
    head: Optional[Monomial] = None
    terminating: bool = True

    def free_params(self):
        out = set()
        for m in self.numerator + self.denominator:
            out |= m.free_params()
        out |= self.argument.free_params()
        if self.head is not None:
            out |= self.head.free_params()
        return out

    def substitute(self, mapping):
        return SeriesTemplate(
            self.kind, self.p,
            tuple(m.substitute(mapping) for m in self.numerator),
            tuple(m.substitute(mapping) for m in self.denominator),
            self.argument.substitute(mapping),
            self.head.substitute(mapping) if self.head is not None else None,
            self.terminating)

    def instantiate(self, lookup, q, n):
        return SeriesSpec(
            kind=self.kind,
            numerator=tuple(m.evaluate(lookup, q, n) for m in self.numerator),
            denominator=tuple(m.evaluate(lookup, q, n) for m in self.denominator),
            p=self.p,
            base=q,
            argument=self.argument.evaluate(lookup, q, n),
            termination=n if self.terminating else None,
            head=self.head.evaluate(lookup, q, n) if self.head is not None else None)

    def render(self):
        if self.kind == "W":
            first = [self.head.render()]
            second = ["q^-n"] + [m.render() for m in self.numerator]
        else:
            first = (["q^-n"] if self.terminating else []) \
                + [m.render() for m in self.numerator]
            second = [m.render() for m in self.denominator]
        g1 = ", ".join(first) if first else "-"
        g2 = ", ".join(second) if second else "-"
        return f"{self.kind}[p={self.p}]({g1} ; {g2} ; q ; {self.argument.render()})"

    def key(self):
        return (self.kind, self.p,
                tuple(sorted(m.key() for m in self.numerator)),
                tuple(sorted(m.key() for m in self.denominator)),
                self.argument.key(),
                self.head.key() if self.head is not None else None,
                self.terminating)


# ---------------------------------------------------------------------------
# Expr and evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    """prefactor * prod(poch factors) * series, or delta_(n,0) closed forms."""

    prefactor: Monomial = field(default_factory=Monomial.unit)
    pochs: tuple = ()
    series: Optional[SeriesTemplate] = None
    delta: bool = False

    def free_params(self):
        out = set(self.prefactor.free_params())
        for p in self.pochs:
            out |= p.free_params()
        if self.series is not None:
            out |= self.series.free_params()
        return out

    def is_float_only(self):
        if any(p.length.infinite for p in self.pochs):
            return True
        return self.series is not None and not self.series.terminating

    def substitute(self, mapping):
        return Expr(self.prefactor.substitute(mapping),
                    tuple(p.substitute(mapping) for p in self.pochs),
                    self.series.substitute(mapping) if self.series else None,
                    self.delta)

    def series_only(self):
        """The bare series of this expression (prefactors dropped)."""
        return Expr(series=self.series)

    def render(self):
        parts = []
        if not self.prefactor.is_unit() or (not self.pochs and self.series is None
                                            and not self.delta):
            parts.append(self.prefactor.render())
        text = " * ".join(parts)
        for p in self.pochs:
            if p.denominator:
                text = (text + " / " if text else "1 / ") + p.render()
            else:
                text = (text + " * " if text else "") + p.render()
        if self.series is not None:
            text = (text + " * " if text else "") + self.series.render()
        if self.delta:
            text = (text + " * " if text else "") + "delta"
        return text

    def key(self):
        return (self.prefactor.key(), tuple(sorted(p.key() for p in self.pochs)),
                self.series.key() if self.series else None, self.delta)


def free_params(e):
    """The parameter names syntactically present, beyond {q, n, z}."""
    return e.free_params()


@dataclass(frozen=True)
class Assignment:
    """A concrete evaluation point: parameter values, q, optional z, and n."""

    values: dict
    q: object
    n: int
    z: object = None

    def lookup(self, name):
        if name == "z" and "z" not in self.values:
            if self.z is None:
                raise KeyError("assignment has no z")
            return self.z
        return self.values[name]

    def to_float(self):
        return Assignment({k: to_float(v) for k, v in self.values.items()},
                          to_float(self.q), self.n,
                          to_float(self.z) if self.z is not None else None)

    def describe(self):
        items = [f"{k}={v}" for k, v in sorted(self.values.items())]
        if self.z is not None and "z" not in self.values:
            items.append(f"z={self.z}")
        items.append(f"q={self.q}")
        items.append(f"n={self.n}")
        return ", ".join(items)


def eval_expr(e, asg, rel_tol=1e-12):
    """Evaluate an Expr at an assignment; exact when asg.q is exact.

    Raises PrefactorPole when a denominator-position Pochhammer vanishes,
    GuardViolated out of the series evaluator, and UnsupportedExact when a
    float-only construct is evaluated with exact scalars.
    """
    q = asg.q
    n = asg.n
    exact = is_exact(q)
    v = e.prefactor.evaluate(asg.lookup, q, n)
    for p in e.pochs:
        base = pow_int(q, p.base_exp)
        if p.length.infinite:
            if exact:
                raise UnsupportedExact("infinite q-Pochhammer factor in exact mode")
            val = complex(1.0)
            for a in p.args:
                val *= qpoch_inf(a.evaluate(asg.lookup, q, n), base, rel_tol)
        else:
            ln = p.length.at(n)
            val = one_like(q)
            for a in p.args:
                val = val * qpoch(a.evaluate(asg.lookup, q, n), base, ln)
        if p.denominator:
            if scalar_is_zero(val):
                raise PrefactorPole(f"{p.render()} vanished")
            v = v / val
        else:
            v = v * val
    if e.series is not None:
        spec = e.series.instantiate(asg.lookup, q, n)
        if spec.kind == "W":
            v = v * eval_w(spec)
        elif spec.terminating:
            v = v * eval_phi(spec)
        else:
            if exact:
                raise UnsupportedExact("nonterminating series in exact mode")
            v = v * eval_phi_nonterminating(spec, rel_tol)
    if e.delta and n != 0:
        v = v * 0
    return v


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*|/|\^|\(|\)|\[|\]|;|,|\+|-|=)
""", re.VERBOSE)

_RESERVED = {"n", "binom", "inf", "poch", "phi", "W", "delta"}


class _Tokens:
    def __init__(self, text):
        self.toks = []
        line, col = 1, 1
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group(), line, col))
            for ch in m.group():
                if ch == "\n":
                    line, col = line + 1, 1
                else:
                    col += 1
            pos = m.end()
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, -1, -1)

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val):
        kind, v, line, col = self.peek()
        if v != val:
            raise ParseError(f"found {v!r}" if v else "unexpected end of input",
                             line, col, expected=repr(val))
        return self.next()

    def error(self, msg, expected=None):
        _, v, line, col = self.peek()
        raise ParseError(msg + (f" (at {v!r})" if v else " (at end)"),
                         line, col, expected)


def parse_expr(text):
    """Parse a DSL expression into an Expr (grammar: docs/dsl.md)."""
    toks = _Tokens(text)
    e = _parse_product(toks)
    if toks.peek()[0] is not None:
        toks.error("trailing input after expression")
    return e


def _parse_product(toks):
    prefactor = Monomial.unit()
    pochs = []
    series = None
    delta = False
    invert = False
    while True:
        val = toks.peek()[1]
        if val == "poch":
            pochs.append(_parse_poch(toks, denominator=invert))
        elif val in ("phi", "W"):
            if invert:
                toks.error("series cannot appear in denominator position")
            if series is not None:
                toks.error("more than one series in expression")
            series = _parse_series(toks)
        elif val == "delta":
            if invert:
                toks.error("delta cannot appear in denominator position")
            toks.next()
            delta = True
        else:
            m = _parse_monomial(toks)
            prefactor = prefactor.mul(m.inv() if invert else m)
        val = toks.peek()[1]
        if val == "*":
            toks.next()
            invert = False
        elif val == "/":
            toks.next()
            invert = True
        else:
            break
    return Expr(prefactor, tuple(pochs), series, delta)


def _parse_poch(toks, denominator=False):
    toks.expect("poch")
    toks.expect("(")
    args = [_parse_monomial(toks)]
    while toks.peek()[1] == ",":
        toks.next()
        args.append(_parse_monomial(toks))
    toks.expect(";")
    base = _parse_base(toks)
    toks.expect(";")
    length = _parse_length(toks)
    toks.expect(")")
    return PochFactor(tuple(args), base, length, denominator)


def _parse_base(toks):
    if toks.peek()[1] != "q":
        toks.error("bad base", expected="'q', 'q^2' or 'q^-1'")
    toks.next()
    if toks.peek()[1] != "^":
        return 1
    toks.next()
    sign = 1
    if toks.peek()[1] == "-":
        toks.next()
        sign = -1
    kind, val, line, col = toks.peek()
    if kind != "int":
        toks.error("bad base exponent", expected="integer")
    toks.next()
    e = sign * int(val)
    if e not in (1, -1, 2):
        raise ParseError(f"unsupported Pochhammer base q^{e}", line, col)
    return e


def _parse_length(toks):
    kind, val, line, col = toks.peek()
    if val == "n":
        toks.next()
        return LENGTH_N
    if val == "inf":
        toks.next()
        return LENGTH_INF
    if kind == "int":
        toks.next()
        if toks.peek()[1] == "*":
            toks.next()
            toks.expect("n")
            return PochLength(0, int(val))
        if toks.peek()[1] == "n":
            toks.next()
            return PochLength(0, int(val))
        return PochLength(int(val), 0)
    toks.error("bad Pochhammer length", expected="'n', '2n', integer, or 'inf'")


def _parse_series(toks):
    kind, val, line, col = toks.next()
    is_w = val == "W"
    toks.expect("[")
    toks.expect("p")
    toks.expect("=")
    sign = 1
    if toks.peek()[1] == "-":
        toks.next()
        sign = -1
    k2, v2, l2, c2 = toks.peek()
    if k2 != "int":
        toks.error("bad zero count", expected="integer")
    toks.next()
    p = sign * int(v2)
    toks.expect("]")
    toks.expect("(")
    group1 = _parse_arglist(toks)
    toks.expect(";")
    group2 = _parse_arglist(toks)
    toks.expect(";")
    base = _parse_base(toks)
    if base != 1:
        raise ParseError("series base must be q in the DSL", line, col)
    toks.expect(";")
    arg = _parse_monomial(toks)
    toks.expect(")")

    if is_w:
        if len(group1) != 1:
            raise ParseError("W series takes a single head entry", line, col)
        if not group2 or group2[0].key() != _QMN_KEY:
            raise ParseError("W series needs the q^-n marker first in its second group",
                             line, col)
        return SeriesTemplate("W", p, tuple(group2[1:]), (), arg,
                              head=group1[0], terminating=True)
    terminating = bool(group1) and group1[0].key() == _QMN_KEY
    if terminating:
        group1 = group1[1:]
    if not terminating and not group1 and not group2:
        raise ParseError("series with empty numerator and denominator needs a "
                         "q^-n termination marker", line, col)
    return SeriesTemplate("phi", p, tuple(group1), tuple(group2), arg,
                          terminating=terminating)


def _parse_arglist(toks):
    val = toks.peek()[1]
    if val in (";", ")"):
        return []
    if val == "-" and toks.peek(1)[1] in (";", ")"):
        toks.next()
        return []
    out = [_parse_monomial(toks)]
    while toks.peek()[1] == ",":
        toks.next()
        out.append(_parse_monomial(toks))
    return out


def _parse_monomial(toks):
    m = _parse_mfactor(toks)
    while toks.peek()[1] in ("*", "/"):
        if toks.peek(1)[1] in ("poch", "phi", "W", "delta"):
            break  # that operator belongs to the product level
        op = toks.next()[1]
        rhs = _parse_mfactor(toks)
        m = m.mul(rhs.inv() if op == "/" else rhs)
    return m


def _parse_mfactor(toks):
    neg = False
    while toks.peek()[1] == "-":
        toks.next()
        neg = not neg
    base = _parse_matom(toks)
    if toks.peek()[1] == "^":
        toks.next()
        c0, c1, c2 = _parse_exponent(toks)
        if c2:
            if not base.is_bare_q():
                toks.error("binom exponents apply to the bare base q only")
            base = Monomial.of_q(c0, c1, c2)
        else:
            try:
                base = base.pow_affine(c0, c1)
            except ValueError as exc:
                _, _, line, col = toks.peek()
                raise ParseError(str(exc), line, col) from exc
    if neg:
        base = base.mul(Monomial(s0=1))
    return base


def _parse_matom(toks):
    kind, val, line, col = toks.peek()
    if kind == "int":
        toks.next()
        return Monomial.of_coeff(QQi(mpq(val)))
    if val == "q":
        toks.next()
        return Monomial.of_q(1, 0, 0)
    if val == "(":
        toks.next()
        m = _parse_monomial(toks)
        toks.expect(")")
        return m
    if kind == "name":
        if val in _RESERVED:
            toks.error(f"reserved word {val!r} cannot be a parameter")
        toks.next()
        return Monomial.of_name(val)
    toks.error("bad monomial atom", expected="integer, name, 'q' or '('")


def _parse_exponent(toks):
    """Exponent after '^': returns (c0, c1, c2) for c0 + c1*n + c2*binom(n,2)."""
    kind, val, line, col = toks.peek()
    if kind == "int":
        toks.next()
        return int(val), 0, 0
    if val == "-":
        toks.next()
        k2, v2, _, _ = toks.peek()
        if k2 == "int":
            toks.next()
            return -int(v2), 0, 0
        if v2 == "n":
            toks.next()
            return 0, -1, 0
        if v2 == "binom":
            toks.next()
            return 0, 0, -1
        toks.error("bad exponent", expected="integer, n or binom")
    if val == "n":
        toks.next()
        return 0, 1, 0
    if val == "binom":
        toks.next()
        return 0, 0, 1
    if val == "(":
        toks.next()
        c0, c1, c2 = _parse_affine(toks)
        toks.expect(")")
        return c0, c1, c2
    toks.error("bad exponent", expected="integer, n, binom or '('")


def _parse_affine(toks):
    c0 = c1 = c2 = 0
    sign = 1
    parsed_any = False
    while True:
        kind, val, _, _ = toks.peek()
        if val == "-":
            toks.next()
            sign = -sign
            continue
        if val == "+":
            toks.next()
            continue
        if kind == "int":
            toks.next()
            coef = sign * int(val)
            nxt = toks.peek()[1]
            if nxt == "*":
                toks.next()
                v2 = toks.peek()[1]
                if v2 == "n":
                    toks.next()
                    c1 += coef
                elif v2 == "binom":
                    toks.next()
                    c2 += coef
                else:
                    toks.error("bad affine term", expected="n or binom")
            elif nxt == "n":
                toks.next()
                c1 += coef
            elif nxt == "binom":
                toks.next()
                c2 += coef
            else:
                c0 += coef
        elif val == "n":
            toks.next()
            c1 += sign
        elif val == "binom":
            toks.next()
            c2 += sign
        else:
            if not parsed_any:
                toks.error("empty affine exponent")
            break
        sign = 1
        parsed_any = True
        if toks.peek()[1] not in ("+", "-"):
            break
    return c0, c1, c2


def render_expr(e):
    """Canonical text for an Expr; parse_expr(render_expr(e)) equals e."""
    return e.render()
