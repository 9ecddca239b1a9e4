from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of a sampled identity check; failures hold replay data."""

    name: str
    passed: bool = True
    samples: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, **info):
        self.passed = False
        self.failures.append(info)

    def to_json(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "samples": self.samples,
            "failures": self.failures,
            "details": self.details,
        }

    def __bool__(self):
        return self.passed
