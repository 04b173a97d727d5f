"""Check results and verification report containers.

A Check is one verified statement with pass/fail/not_applicable status and
optional witness eigenvalues.  A VerificationReport aggregates checks and
formats a stable one-line-per-check summary.
"""

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not_applicable"


@dataclass
class Check:
    name: str
    status: str
    details: str = ""
    witnesses: list = field(default_factory=list)

    @property
    def passed(self):
        return self.status == PASS


def passed(name, details="", witnesses=None):
    return Check(name, PASS, details, list(witnesses or []))


def failed(name, details="", witnesses=None):
    return Check(name, FAIL, details, list(witnesses or []))


def skipped(name, details=""):
    return Check(name, NOT_APPLICABLE, details)


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, checks):
        self.checks.extend(checks)

    @property
    def all_pass(self):
        return all(c.status != FAIL for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.status == FAIL]

    def find(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self):
        lines = []
        for c in self.checks:
            line = "%s: %s" % (c.name, c.status.upper())
            if c.details:
                line += "  (%s)" % c.details
            lines.append(line)
        return "\n".join(lines)
