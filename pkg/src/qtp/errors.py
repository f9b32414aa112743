"""Exception types shared across the package.

Exit-code mapping used by the CLI lives in qtp.cli; the distinction that
matters there is input errors (parse/semantic) versus refusals
(CannotCertify and friends) versus exhausted search budgets.
"""

from __future__ import annotations


class QtpError(Exception):
    """Base class for all package errors."""


class ShapeError(QtpError):
    """Matrix or vector dimensions do not fit the operation."""


class ClosureViolation(QtpError):
    """An arithmetic result left the allowed entry alphabet.

    Carries the offending cell so diagnostics can point at it.
    """

    def __init__(self, message, cell=None, value=None):
        super().__init__(message)
        self.cell = cell
        self.value = value


class PartitionMismatch(QtpError):
    """Block partitions are incompatible and cannot be refined to agree."""


class CannotCertify(QtpError):
    """No admissible field-independent operation sequence was found.

    This is a refusal, not a claim that the input is field-dependent.
    ``diagnostic`` holds plain-elimination ranks over several fields so the
    caller can report whether the ranks actually differ.
    ``budget_exhausted`` distinguishes an exhausted search budget from a
    fully explored (and failed) search space.
    """

    def __init__(self, message, diagnostic=None, budget_exhausted=False):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
        self.budget_exhausted = budget_exhausted


class NotFullRank(QtpError):
    """A certified rank fell short of the requested full row/column rank."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NotTame(QtpError):
    """The quiver has no one-dimensional radical (not of extended Dynkin type)."""


class NotARoot(QtpError):
    """A dimension vector is not a positive real or imaginary root."""


class Ext1HypothesisNotMet(QtpError):
    """None of the supported Ext1-via-Euler cases applies; refusing to guess."""


class CorankNotOne(QtpError):
    """The endomorphism system has solution space dimension != 1."""

    def __init__(self, message, corank=None):
        super().__init__(message)
        self.corank = corank


class DimEqualsDelta(QtpError):
    """The candidate has dimension vector delta, excluded from certification."""


class SesVerificationError(QtpError):
    """One or more short-exact-sequence conditions failed.

    ``failures`` is a list of (condition, location, message) triples with
    condition in {"a", "b", "c", "d"}.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        lines = "; ".join(
            "(%s) at %s: %s" % (cond, loc, msg) for cond, loc, msg in self.failures
        )
        super().__init__("short exact sequence conditions violated: " + lines)

    def failed_conditions(self):
        return sorted({cond for cond, _, _ in self.failures})


class TwoSesError(QtpError):
    """Hypotheses of the two-sequence indecomposability criterion failed.

    ``failures`` is a list of (condition, message) pairs with condition in
    {"a", "c", "d"}; condition (b) is delegated to the two sequence checks.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join("(%s) %s" % (c, m) for c, m in self.failures))

    def failed_conditions(self):
        return sorted({c for c, _ in self.failures})


class RegistryError(QtpError):
    """A proof cited a formula that is not certified (and not provable here)."""


class BaseCaseGap(QtpError):
    """Induction base cases do not cover every parameter value."""


class ParseError(QtpError):
    """Syntax error in an input document, with source location."""

    def __init__(self, message, line, col):
        super().__init__("%d:%d: %s" % (line, col, message))
        self.line = line
        self.col = col


class SemanticError(QtpError):
    """Well-formed syntax with an invalid meaning (bad reference, bad shape...)."""

    def __init__(self, message, entity=None, line=None, col=None):
        loc = "" if line is None else "%d:%d: " % (line, col or 0)
        ent = "" if entity is None else "%s: " % entity
        super().__init__(loc + ent + message)
        self.entity = entity
        self.line = line
        self.col = col
