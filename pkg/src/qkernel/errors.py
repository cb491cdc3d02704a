"""Exception hierarchy for the qkernel package.

Guard-type errors (GuardViolated, PrefactorPole, HeadDegenerate) signal "this
sample point is inadmissible for this expression" and are treated as rejection
events by the sampler, never as verification failures.
"""

from __future__ import annotations


class QKernelError(Exception):
    """Base class for all qkernel errors."""


class DivisionByZero(QKernelError):
    """Exact division or inversion with a zero divisor."""


class HeightOverflow(QKernelError):
    """An exact scalar exceeded the configured height cap."""


class BaseNotInUnitDisk(QKernelError):
    """An infinite product or nonterminating series was asked for with |q| >= 1."""


class PoleAtOmegaPoint(QKernelError):
    """A generalized q-Pochhammer ratio hit a zero of its denominator product."""


class Divergent(QKernelError):
    """A nonterminating series does not converge at the given argument."""


class GuardViolated(QKernelError):
    """A series precondition failed (denominator in the forbidden set, bad base, ...)."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NotTerminating(QKernelError):
    """A terminating-only operation received a nonterminating series."""


class HeadDegenerate(GuardViolated):
    """The very-well-poised head factor (1 - a*q^(2k))/(1 - a) is ill-defined."""


class PrefactorPole(QKernelError):
    """A denominator-position Pochhammer prefactor vanished at the sample point."""


class UnsupportedExact(QKernelError):
    """The expression requires floating point (infinite product or nonterminating sum)."""


class ParseError(QKernelError):
    """Corpus DSL syntax error, with position and expectation info."""

    def __init__(self, message, line=None, column=None, expected=None):
        self.line = line
        self.column = column
        self.expected = expected
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        exp = f" (expected {expected})" if expected else ""
        super().__init__(f"{message}{loc}{exp}")


class CorpusLoadError(QKernelError):
    """A corpus data file failed to load."""

    def __init__(self, message, filename=None, line=None):
        self.filename = filename
        self.line = line
        loc = f" [{filename}:{line}]" if filename else ""
        super().__init__(f"{message}{loc}")


class SamplingExhausted(QKernelError):
    """The rejection sampler gave up after max_rejections attempts."""


class NotBalanced(QKernelError):
    """A balance hypothesis (q^(1-n)*a*b*c = d*e*f) does not hold exactly."""


class ZeroParameter(QKernelError):
    """A transformation requiring nonzero parameters received a zero."""


class NoSuchEdge(QKernelError):
    """The requested limit edge is not part of the scheme graph."""


class RuleShapeMismatch(QKernelError):
    """A limit-transition rule was applied to a series of the wrong shape."""


class NoAdmissibleRepresentation(QKernelError):
    """Every representation of a family rejected the evaluation point."""
