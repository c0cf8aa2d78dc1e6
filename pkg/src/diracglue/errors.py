"""Exception types shared across the package."""


class HypothesisViolation(ValueError):
    """The inputs violate the hypotheses of the estimate being checked.

    Attributes:
        violations: list of human-readable hypothesis failures.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
