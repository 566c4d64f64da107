"""Uniform check reports.

A CheckReport records a named check, its verdict, and on failure a list
of (code, witness) pairs.  Extra structured output (e.g. a functor
classification) goes into `details`.  Reports render deterministically.
"""

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    passed: bool
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def add_failure(self, code, witness=None):
        self.passed = False
        self.failures.append((code, witness))

    @property
    def witness(self):
        return self.failures[0][1] if self.failures else None

    def to_json(self):
        return {
            "name": self.name,
            "verdict": "pass" if self.passed else "fail",
            "failures": [
                {"code": code, "witness": repr(w)} for code, w in self.failures
            ],
            "details": {k: _plain(v) for k, v in sorted(self.details.items())},
        }

    def render_text(self):
        mark = "PASS" if self.passed else "FAIL"
        lines = [f"[{mark}] {self.name}"]
        for code, w in self.failures:
            lines.append(f"    {code}: {w!r}")
        for k, v in sorted(self.details.items()):
            lines.append(f"    {k} = {_plain(v)}")
        return "\n".join(lines)


def _plain(v):
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return repr(v)
