class LocalMSTError(Exception):
    pass


class InvalidParameter(LocalMSTError, ValueError):
    pass


class DistributionError(LocalMSTError, ValueError):
    pass


class GraphError(LocalMSTError, ValueError):
    """Malformed or disconnected input graph, or a broken structural precondition."""


class BudgetExceeded(LocalMSTError):
    pass
