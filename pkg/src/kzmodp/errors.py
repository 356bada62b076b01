"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Parameters violate a precondition (non-prime modulus, bad model, ...)."""


class SizeGuardError(RuntimeError):
    """A construction would materialize more terms than the configured limit."""

    def __init__(self, what: str, estimate: int, limit: int):
        self.what = what
        self.estimate = estimate
        self.limit = limit
        super().__init__(f"{what}: estimated {estimate} terms exceeds limit {limit}")


class CertificationError(Exception):
    """A checked claim failed; ``item`` names the offending tuple or check."""

    def __init__(self, item, message: str):
        self.item = item
        super().__init__(f"{item}: {message}")
