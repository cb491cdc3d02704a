"""Generic transformation engines on instantiated series.

Each engine maps a :class:`~qkernel.series.SeriesSpec` to a
:class:`TransformResult` (a concrete prefactor scalar plus a target spec) whose
defining equality ``eval(source) = prefactor * eval(target)`` holds exactly in
exact mode.  Engines certify pointwise; the symbolic identity chains live in
the corpus instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotBalanced, NotTerminating, RuleShapeMismatch, ZeroParameter
from .qpoch import qpoch, qpoch_multi
from .scalar import binom2, one_like, pow_int, scalar_is_zero
from .series import SeriesSpec


@dataclass(frozen=True)
class TransformResult:
    """A certified rewrite: eval(source) = prefactor * eval(target)."""

    prefactor: object
    target: SeriesSpec


def _require_terminating(spec):
    if not spec.terminating:
        raise NotTerminating("transformation engines need a terminating series")


def _require_nonzero(entries):
    for x in entries:
        if scalar_is_zero(x):
            raise ZeroParameter(
                "zero parameter entry; represent zeros through the p count instead")


def invert(spec):
    """Inversion of a terminating phi^p series (base-q reversal of summation).

    Target is a phi^(s-r+p) with reciprocal-shifted parameters:
    numerator q^(1-n)/b_j, denominator q^(1-n)/a_k, argument
    (b_1...b_s)/(a_1...a_r) * q^((1-p)n+p+1)/z, and prefactor
    (a_1,...;q)_n/(b_1,...;q)_n (z/q)^n ((-1)^n q^binom(n,2))^(s-r+p-1).
    """
    if spec.kind != "phi":
        raise ValueError("invert expects a phi spec")
    _require_terminating(spec)
    _require_nonzero(spec.numerator + spec.denominator)
    n = spec.termination
    q = spec.base
    z = spec.argument
    r = len(spec.numerator)
    s = len(spec.denominator)
    p = spec.p
    q1n = pow_int(q, 1 - n)
    new_num = tuple(q1n / b for b in spec.denominator)
    new_den = tuple(q1n / a for a in spec.numerator)
    ratio = one_like(q)
    for b in spec.denominator:
        ratio = ratio * b
    for a in spec.numerator:
        ratio = ratio / a
    new_arg = ratio * pow_int(q, (1 - p) * n + p + 1) / z
    pref = (qpoch_multi(spec.numerator, q, n) / qpoch_multi(spec.denominator, q, n)
            * pow_int(z / q, n)
            * pow_int(pow_int(-1, n) * pow_int(q, binom2(n)), s - r + p - 1))
    target = SeriesSpec(kind="phi", numerator=new_num, denominator=new_den,
                        p=s - r + p, base=q, argument=new_arg, termination=n)
    return TransformResult(pref, target)


def invert_w(spec):
    """Inversion of a terminating very-well-poised W^p series.

    head -> q^(-2n)/a, tails a_k -> q^(-n) a_k/a, argument
    q^((2-p)n+p+r-3) a^(r-3) / ((a_5...a_{r+1})^2 z) where r+1 is the series
    order, and the displayed prefactor with the +/- sqrt pairs multiplied out
    to (1 - a q^(2n))/(1 - a).
    """
    if spec.kind != "W":
        raise ValueError("invert_w expects a W spec")
    _require_terminating(spec)
    _require_nonzero((spec.head,) + spec.numerator)
    n = spec.termination
    q = spec.base
    z = spec.argument
    a = spec.head
    tails = spec.numerator
    m = len(tails)  # r - 3
    p = spec.p
    new_head = pow_int(q, -2 * n) / a
    qmn = pow_int(q, -n)
    new_tails = tuple(qmn * t / a for t in tails)
    prod_tails = one_like(q)
    for t in tails:
        prod_tails = prod_tails * t
    new_arg = (pow_int(q, (2 - p) * n + p + m) * pow_int(a, m)
               / (prod_tails * prod_tails * z))
    one = one_like(q)
    pref = (pow_int(z / q, n)
            * pow_int(pow_int(-1, n) * pow_int(q, binom2(n)), p - 1)
            * (one - a * pow_int(q, 2 * n)) / (one - a)
            * qpoch(a, q, n) * qpoch_multi(tails, q, n)
            / (qpoch(pow_int(q, n + 1) * a, q, n)
               * qpoch_multi(tuple(q * a / t for t in tails), q, n)))
    target = SeriesSpec(kind="W", numerator=new_tails, p=p, base=q,
                        argument=new_arg, termination=n, head=new_head)
    return TransformResult(pref, target)


def watson(spec):
    """Balanced terminating 4phi3 with argument q to a very-well-poised 8W7.

    Requires q^(1-n)*a*b*c = d*e*f exactly (NotBalanced otherwise) and
    argument q.  Target: head d*e/(q*a), tails (d/a, e/a, b, c), argument
    q*a/f; prefactor (de/ab, de/ac;q)_n / (de/a, de/abc;q)_n.
    """
    if spec.kind != "phi" or len(spec.numerator) != 3 or len(spec.denominator) != 3 \
            or spec.p != 0:
        raise ValueError("watson expects a 4phi3 spec (3 numerator entries "
                         "beyond q^-n, 3 denominator entries, p = 0)")
    _require_terminating(spec)
    _require_nonzero(spec.numerator + spec.denominator)
    n = spec.termination
    q = spec.base
    if spec.argument != one_like(q) * q:
        raise NotBalanced("the balanced transformation applies at argument q only")
    a, b, c = spec.numerator
    d, e, f = spec.denominator
    if pow_int(q, 1 - n) * a * b * c != d * e * f:
        raise NotBalanced("q^(1-n)*a*b*c = d*e*f fails at this point")
    de = d * e
    pref = (qpoch_multi((de / (a * b), de / (a * c)), q, n)
            / qpoch_multi((de / a, de / (a * b * c)), q, n))
    target = SeriesSpec(kind="W", numerator=(d / a, e / a, b, c), p=0, base=q,
                        argument=q * a / f, termination=n, head=de / (q * a))
    return TransformResult(pref, target)


def q_inverse(spec):
    """Base q -> q^(-1) connection for a terminating (r+1)phi_r.

    Returns the reciprocal-parameter series at base 1/q with argument
    (a_1...a_r)/(b_1...b_r) * z/q^(n+1) and prefactor 1.  The second form of
    the same connection is exactly ``invert(spec)``.
    """
    if spec.kind != "phi" or spec.p != 0 or len(spec.numerator) != len(spec.denominator):
        raise ValueError("q_inverse expects a plain terminating (r+1)phi_r")
    _require_terminating(spec)
    _require_nonzero(spec.numerator + spec.denominator)
    n = spec.termination
    q = spec.base
    z = spec.argument
    ratio = one_like(q)
    for a in spec.numerator:
        ratio = ratio * a
    for b in spec.denominator:
        ratio = ratio / b
    target = SeriesSpec(
        kind="phi",
        numerator=tuple(1 / a for a in spec.numerator),
        denominator=tuple(1 / b for b in spec.denominator),
        p=0,
        base=1 / q,
        argument=ratio * z / pow_int(q, n + 1),
        termination=n)
    return TransformResult(one_like(q), target)


def q_inverse_second(spec):
    """The second displayed form of the q -> q^(-1) connection (= invert)."""
    return invert(spec)


_LIMIT_RULES = ("inf1", "inf3", "zero1", "zero3")


def limit_transition(spec, rule, lam):
    """One step of a lambda-ladder limit transition on a W^p series.

    ``spec`` is the lambda-free shape: its last tail entry t and argument z
    carry the limit slot.  With L the ladder value (large), the rules read:

    inf1:  lhs = W^p(..., L*t; z/L)      rhs = W^(p+1)(...; t*z)
    inf3:  lhs = W^p(..., t/L; L*z)      rhs = W^(p-1)(...; t*z/(q*a))
    zero1: lhs = W^p(..., t/L; L*z)      rhs = W^(p-1)(...; t*z/(q*a))   (eps = 1/L)
    zero3: lhs = W^p(..., L*t; z/L)      rhs = W^(p+1)(...; t*z)         (eps = 1/L)

    Returns (lhs_at_lambda, rhs).
    """
    if rule not in _LIMIT_RULES:
        raise ValueError(f"unknown limit rule {rule!r}")
    if spec.kind != "W":
        raise RuleShapeMismatch("limit transitions apply to W series")
    if not spec.numerator:
        raise RuleShapeMismatch("the series needs a tail entry to carry lambda")
    _require_terminating(spec)
    t = spec.numerator[-1]
    rest = spec.numerator[:-1]
    z = spec.argument
    a = spec.head
    q = spec.base
    grow = rule in ("inf1", "zero3")  # the tail entry grows like lambda
    if grow:
        lhs = SeriesSpec(kind="W", numerator=rest + (lam * t,), p=spec.p,
                         base=q, argument=z / lam,
                         termination=spec.termination, head=a)
        rhs = SeriesSpec(kind="W", numerator=rest, p=spec.p + 1, base=q,
                         argument=t * z, termination=spec.termination, head=a)
    else:
        lhs = SeriesSpec(kind="W", numerator=rest + (t / lam,), p=spec.p,
                         base=q, argument=z * lam,
                         termination=spec.termination, head=a)
        rhs = SeriesSpec(kind="W", numerator=rest, p=spec.p - 1, base=q,
                         argument=t * z / (q * a), termination=spec.termination,
                         head=a)
    return lhs, rhs
