"""Check records and reports.

The canonical JSON section is sorted and free of timings, so identical inputs
produce byte-identical output; timings live in a separate ``timings`` block.
"""

from contextlib import contextmanager
from dataclasses import dataclass, field
import json
import time

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((_jsonable(v) for v in value), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


@dataclass
class Check:
    name: str
    status: str
    witness: object = None
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self):
        return self.status != FAIL

    def canonical(self):
        out = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.detail:
            out["detail"] = _jsonable(self.detail)
        return out


class Report:
    def __init__(self, command, config=None):
        self.command = command
        self.config = dict(config or {})
        self.checks = []
        self.errors = []

    def add(self, name, ok, witness=None, seconds=0.0, **detail):
        status = PASS if ok else FAIL
        chk = Check(name, status, None if ok else witness, detail, seconds)
        self.checks.append(chk)
        return chk

    def skip(self, name, reason):
        chk = Check(name, SKIP, None, {"reason": reason})
        self.checks.append(chk)
        return chk

    def extend(self, checks, prefix=""):
        for c in checks:
            if prefix:
                c = Check(f"{prefix}{c.name}", c.status, c.witness, c.detail, c.seconds)
            self.checks.append(c)

    @contextmanager
    def timed(self, name):
        """Run a block that returns its verdict through ``box``::

            with report.timed("x") as box:
                box["ok"] = ...; box["witness"] = ...
        """
        box = {"ok": True, "witness": None, "detail": {}}
        t0 = time.perf_counter()
        yield box
        self.add(name, box["ok"], box["witness"], time.perf_counter() - t0, **box["detail"])

    def error(self, exc):
        record = exc.as_record() if hasattr(exc, "as_record") else {"kind": type(exc).__name__, "message": str(exc)}
        self.errors.append(record)

    @property
    def ok(self):
        return not self.errors and all(c.ok for c in self.checks)

    def summary(self):
        counts = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.checks:
            counts[c.status] += 1
        return {"pass": counts[PASS], "fail": counts[FAIL], "skip": counts[SKIP], "errors": len(self.errors)}

    def canonical(self):
        return {
            "command": _jsonable(self.command),
            "config": _jsonable(self.config),
            "checks": [c.canonical() for c in self.checks],
            "errors": _jsonable(self.errors),
            "summary": self.summary(),
        }

    def canonical_json(self):
        return json.dumps(self.canonical(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_json(self):
        doc = {
            "canonical": self.canonical(),
            "timings": {c.name: round(c.seconds, 6) for c in self.checks},
        }
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def text(self):
        lines = [f"# {self.command if isinstance(self.command, str) else ' '.join(map(str, self.command))}"]
        for c in self.checks:
            line = f"[{c.status}] {c.name}"
            if c.status == FAIL and c.witness is not None:
                line += f"  witness={json.dumps(_jsonable(c.witness), sort_keys=True)}"
            elif c.status == SKIP:
                line += f"  ({c.detail.get('reason', '')})"
            lines.append(line)
        for e in self.errors:
            lines.append(f"[ERROR] {e['kind']}: {e['message']}")
        s = self.summary()
        lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped, {s['errors']} errors")
        return "\n".join(lines) + "\n"
