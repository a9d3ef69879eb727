"""Exception taxonomy.

Two trunks: InputError for anything the caller got wrong (bad arguments,
out-of-range parameters, malformed files), NumericalFailureError for
computations that ran but could not be certified (root residuals too large,
non-finite state, fit breakdown).  The CLI maps these to distinct exit codes.
"""


class InputError(ValueError):
    """Caller-side mistake: bad value, bad file, bad combination of options."""


class DomainError(InputError):
    """A quantity left the region where the requested map is defined."""


class UnsupportedRegimeError(InputError):
    """Requested an approximation outside its regime of validity."""


class AmbiguousBranchError(InputError):
    """Root branches could not be disambiguated along a parameter sweep."""


class UnsupportedError(InputError):
    """Valid-looking request for a feature combination that does not exist."""


class NumericalFailureError(RuntimeError):
    """Computation finished but failed its own certification checks."""
