"""Exception hierarchy shared by all cftkit modules."""


class CftkitError(Exception):
    """Base class for all cftkit errors."""


class UsageError(CftkitError):
    """Caller violated a precondition (bad parameters, mismatched orders)."""


class ConsistencyError(CftkitError):
    """An exact internal identity failed; carries a witness describing where.

    This is never valid-input behaviour: it signals either corrupted data
    or a formula bug, and aborts the computation loudly.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
