"""q-Pochhammer symbols and the associated identity suite.

Finite symbols are exact in either scalar mode; infinite products and the
generalized symbol (a;q)_b are float-only with an explicit truncation-tail
bound.  The identity suite exposes each classical q-Pochhammer identity as a
named residual check, evaluated at a concrete parameter point.  Identities
whose displayed form involves square roots are checked under the substitution
a = s^2, with the +/- pairs multiplied out so everything stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BaseNotInUnitDisk, DivisionByZero, GuardViolated, PoleAtOmegaPoint
from .scalar import (QQi, binom2, is_exact, one_like, pow_int, scalar_is_zero,
                     to_float)


def qpoch(a, q, n):
    """(a;q)_n = (1-a)(1-aq)...(1-aq^(n-1)); the empty product is 1."""
    if n < 0:
        raise ValueError("q-Pochhammer length must be nonnegative")
    result = one_like(q)
    aqj = a
    for _ in range(n):
        result = result * (1 - aqj)
        aqj = aqj * q
    return result


def qpoch_multi(args, q, n):
    """(a_1,...,a_k;q)_n, the product of qpoch over the argument list."""
    result = one_like(q)
    for a in args:
        result = result * qpoch(a, q, n)
    return result


def qpoch_inf(a, q, rel_tol=1e-12, max_terms=100000):
    """(a;q)_inf as a complex double, truncated once the tail bound drops below rel_tol.

    Requires |q| < 1.  The truncation index N satisfies |a q^N|/(1-|q|) < rel_tol.
    """
    q = to_float(q)
    a = to_float(a)
    absq = abs(q)
    if absq >= 1.0:
        raise BaseNotInUnitDisk(f"(a;q)_inf needs |q| < 1, got |q| = {absq}")
    if a == 0:
        return complex(1.0)
    result = complex(1.0)
    aqn = a
    for _ in range(max_terms):
        if abs(aqn) / (1.0 - absq) < rel_tol:
            return result
        result *= (1.0 - aqn)
        aqn *= q
    return result


def qpoch_general(a, q, b, rel_tol=1e-12):
    """(a;q)_b = (a;q)_inf / (a q^b;q)_inf for scalar b; float-only, |q| < 1.

    Raises PoleAtOmegaPoint when a*q^b lands (numerically) in Omega_q, where
    the denominator product vanishes.
    """
    import cmath

    q = to_float(q)
    a = to_float(a)
    b = to_float(b)
    if abs(q) >= 1.0:
        raise BaseNotInUnitDisk(f"(a;q)_b needs |q| < 1, got |q| = {abs(q)}")
    if a == 0:
        return complex(1.0)
    aqb = a * cmath.exp(b * cmath.log(q))
    num = qpoch_inf(a, q, rel_tol)
    # check the denominator product for a (near-)zero factor before dividing
    factor = aqb
    absq = abs(q)
    while abs(factor) / (1.0 - absq) >= rel_tol:
        if abs(1.0 - factor) < rel_tol:
            raise PoleAtOmegaPoint(f"a*q^b = {aqb} is within {rel_tol} of Omega_q")
        factor *= q
    den = qpoch_inf(aqb, q, rel_tol)
    return num / den


def is_in_omega(a, q, n):
    """Exact membership of a in Omega_q^n = {q^(-k) : 0 <= k <= n-1}.

    Equivalent to (a;q)_n = 0; tested as a*q^k = 1 for some k.
    """
    aqk = a
    for _ in range(n):
        if aqk == 1:
            return True
        aqk = aqk * q
    return False


def is_in_omega_inf(a, q, max_k=512):
    """Exact membership of a in Omega_q = {q^(-k) : k >= 0}, for |q| < 1.

    Only meaningful for exact scalars with |q| < 1, where the test terminates
    because |q^(-k)| grows without bound.
    """
    if not is_exact(a):
        raise TypeError("is_in_omega_inf needs exact scalars")
    qabs2 = q.abs_sq()
    if qabs2 >= 1:
        raise BaseNotInUnitDisk("Omega_q membership scan needs |q| < 1")
    aqk = a
    for _ in range(max_k):
        if aqk == 1:
            return True
        aqk = aqk * q
        if aqk.abs_sq() < 1:
            # all further a*q^k have modulus < 1 and can never reach 1
            return False
    return False


# -- identity suite ----------------------------------------------------------


@dataclass(frozen=True)
class PochIdentity:
    """A named q-Pochhammer identity with a residual evaluator.

    ``params`` lists the free names drawn by the sampler ('a', 'b', 'x', 's',
    'k'); q and n are always present.  ``evaluate`` returns LHS - RHS.
    """

    name: str
    params: tuple
    evaluate: object  # callable(point: dict) -> Scalar
    guard: object = None  # callable(point) -> bool, True = admissible


def _ev_eq3(pt):
    a, q, n = pt["a"], pt["q"], pt["n"]
    lhs = qpoch(a, pow_int(q, -1), n)
    rhs = qpoch(a.inv() if isinstance(a, QQi) else 1 / a, q, n) \
        * pow_int(-a, n) * pow_int(q, -binom2(n))
    return lhs - rhs


def _ev_eq4(pt):
    a, q, n, k = pt["a"], pt["q"], pt["n"], pt["k"]
    lhs = qpoch(a, q, n + k)
    first = qpoch(a, q, k) * qpoch(a * pow_int(q, k), q, n)
    second = qpoch(a, q, n) * qpoch(a * pow_int(q, n), q, k)
    return (lhs - first) + (lhs - second)


def _ev_eq5(pt):
    a, q, n = pt["a"], pt["q"], pt["n"]
    lhs = qpoch(a, q, n)
    rhs = qpoch(pow_int(q, 1 - n) / a, q, n) * pow_int(-a, n) * pow_int(q, binom2(n))
    return lhs - rhs


def _ev_eq6(pt):
    a, q, n, k = pt["a"], pt["q"], pt["n"], pt["k"]
    lhs = qpoch(a * pow_int(q, -n), q, k)
    den = qpoch(pow_int(q, 1 - k) / a, q, n)
    rhs = pow_int(q, -n * k) * qpoch(q / a, q, n) / den * qpoch(a, q, k)
    return lhs - rhs


def _guard_eq6(pt):
    a, q, n, k = pt["a"], pt["q"], pt["n"], pt["k"]
    return not is_in_omega(pow_int(q, 1 - k) / a, q, n)


def _ev_eq7(pt):
    # (a;q)_2n = (a;q^2)_n (aq;q^2)_n, plus the split +/-sqrt form under a = s^2
    s, q, n = pt["s"], pt["q"], pt["n"]
    a = s * s
    q2 = q * q
    lhs = qpoch(a, q, 2 * n)
    mid = qpoch(a, q2, n) * qpoch(a * q, q2, n)
    split = qpoch(s, q, n) * qpoch(-s, q, n) * qpoch(q * a, q2, n)
    return (lhs - mid) + (lhs - split)


def _ev_eq8(pt):
    # a^n (x/a;q)_n = q^binom(n,2) (-x)^n (a/x;q^(-1))_n  (the limit-ready form)
    a, x, q, n = pt["a"], pt["x"], pt["q"], pt["n"]
    lhs = pow_int(a, n) * qpoch(x / a, q, n)
    rhs = pow_int(q, binom2(n)) * pow_int(-x, n) * qpoch(a / x, pow_int(q, -1), n)
    return lhs - rhs


def _ev_eq9(pt):
    # (a q^n;q)_n = (a;q^2)_n (qa;q^2)_n / (a;q)_n with a = s^2, a not in Omega_q^n
    s, q, n = pt["s"], pt["q"], pt["n"]
    a = s * s
    q2 = q * q
    lhs = qpoch(a * pow_int(q, n), q, n)
    split = qpoch(s, q, n) * qpoch(-s, q, n) * qpoch(q * a, q2, n)
    rhs = split / qpoch(a, q, n)
    return lhs - rhs


def _guard_eq9(pt):
    s, q, n = pt["s"], pt["q"], pt["n"]
    return not is_in_omega(s * s, q, n)


def _ev_eq10(pt):
    a, q, n = pt["a"], pt["q"], pt["n"]
    lhs = qpoch(pow_int(q, -n) * a, q, n)
    rhs = pow_int(q, -binom2(n)) * pow_int(-a / q, n) * qpoch(q / a, q, n)
    return lhs - rhs


def _ev_eq11(pt):
    a, q, n = pt["a"], pt["q"], pt["n"]
    lhs = qpoch(pow_int(q, -n) * a, q, 2 * n)
    rhs = (pow_int(q, -binom2(n)) * pow_int(-a / q, n)
           * qpoch(a, q, n) * qpoch(q / a, q, n))
    return lhs - rhs


def _ev_eq12(pt):
    a, b, q, n = pt["a"], pt["b"], pt["q"], pt["n"]
    lhs = qpoch(pow_int(q, -n) * a, q, n) / qpoch(pow_int(q, -n) * b, q, n)
    rhs = pow_int(a / b, n) * qpoch(q / a, q, n) / qpoch(q / b, q, n)
    return lhs - rhs


def _guard_eq12(pt):
    a, b, q, n = pt["a"], pt["b"], pt["q"], pt["n"]
    return (not is_in_omega(pow_int(q, -n) * b, q, n)
            and not is_in_omega(q / b, q, n))


def _ev_eq13(pt):
    a, b, q, n = pt["a"], pt["b"], pt["q"], pt["n"]
    lhs = qpoch(pow_int(q, -2 * n) * a, q, n) / qpoch(pow_int(q, -2 * n) * b, q, n)
    rhs = (pow_int(a / b, n)
           * qpoch(q / b, q, n) * qpoch(q / a, q, 2 * n)
           / (qpoch(q / a, q, n) * qpoch(q / b, q, 2 * n)))
    return lhs - rhs


def _guard_eq13(pt):
    a, b, q, n = pt["a"], pt["b"], pt["q"], pt["n"]
    return (not is_in_omega(pow_int(q, -2 * n) * b, q, n)
            and not is_in_omega(q / a, q, n)
            and not is_in_omega(q / b, q, 2 * n))


POCH_IDENTITIES = {
    "eq3": PochIdentity("eq3", ("a",), _ev_eq3),
    "eq4": PochIdentity("eq4", ("a", "k"), _ev_eq4),
    "eq5": PochIdentity("eq5", ("a",), _ev_eq5),
    "eq6": PochIdentity("eq6", ("a", "k"), _ev_eq6, _guard_eq6),
    "eq7": PochIdentity("eq7", ("s",), _ev_eq7),
    "eq8": PochIdentity("eq8", ("a", "x"), _ev_eq8),
    "eq9": PochIdentity("eq9", ("s",), _ev_eq9, _guard_eq9),
    "eq10": PochIdentity("eq10", ("a",), _ev_eq10),
    "eq11": PochIdentity("eq11", ("a",), _ev_eq11),
    "eq12": PochIdentity("eq12", ("a", "b"), _ev_eq12, _guard_eq12),
    "eq13": PochIdentity("eq13", ("a", "b"), _ev_eq13, _guard_eq13),
}


def poch_identity_residual(name, point):
    """Residual LHS - RHS of a named identity at a parameter point.

    Exactly zero in exact mode whenever the identity's guards hold; raises
    GuardViolated otherwise.  ``point`` maps the identity's parameter names
    plus 'q' and 'n' (and 'k' where used) to scalars.
    """
    if name == "lambdamu":
        raise GuardViolated("lambdamu is a limit statement; use lambdamu_residuals")
    ident = POCH_IDENTITIES[name]
    if ident.guard is not None and not ident.guard(point):
        raise GuardViolated(f"{name}: point violates the identity's hypotheses")
    return ident.evaluate(point)


def lambdamu_residuals(a, b, q, n, ladder):
    """Float residuals of (a*lam;q)_n/(b*lam;q)_n -> (a/b)^n along a lambda ladder."""
    a, b, q = to_float(a), to_float(b), to_float(q)
    target = pow_int(a / b, n)
    out = []
    for lam in ladder:
        lam = to_float(lam)
        num = qpoch(a * lam, q, n)
        den = qpoch(b * lam, q, n)
        if den == 0:
            raise DivisionByZero("(b*lambda;q)_n vanished on ladder")
        out.append(abs(num / den - target))
    return out
