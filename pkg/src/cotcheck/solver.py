"""Driver for an external SMT solver speaking SMT-LIB v2 over stdio.

A driver owns exactly one solver process and serializes queries. Each query
runs in a fresh solver session: the default transport keeps the process
alive and sends `(reset)` between queries, which is behaviorally identical
to one process per query but avoids respawn latency. Set
`reuse_process=False` for a literal process per query, or `incremental=True`
to reuse asserted state across queries via push/pop (established formulas
only ever grow during a run, so reuse is append-only).
"""

from __future__ import annotations

import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .logic import Formula, Not, Vocabulary
from .smtlib import print_vocabulary

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

REASON_TIMEOUT = "timeout"
REASON_SOLVER_UNKNOWN = "solver-unknown"
REASON_SOLVER_FAILURE = "solver-failure"


class SolverError(Exception):
    pass


class SolverSpawnFailure(SolverError):
    pass


class ProtocolError(SolverError):
    """The solver's reply could not be interpreted."""


class SolverFailure(SolverError):
    """The solver kept crashing and the driver exhausted its restarts."""


@dataclass
class SolverConfig:
    path: str
    args: list[str] = field(default_factory=list)
    timeout_ms: int = 10000
    restart_on_crash: bool = True
    reuse_process: bool = True
    incremental: bool = False

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")


@dataclass(frozen=True)
class CheckResult:
    status: str  # sat | unsat | unknown
    model: Optional[str] = None
    elapsed_ms: int = 0
    reason: Optional[str] = None  # set when status == unknown

    def __post_init__(self):
        if self.model is not None and self.status != SAT:
            raise ValueError("model only accompanies sat results")


@dataclass(frozen=True)
class EntailmentVerdict:
    kind: str  # entailed | not_entailed | inconclusive
    counter_model: Optional[str] = None
    reason: Optional[str] = None
    elapsed_ms: int = 0

    @property
    def is_entailed(self) -> bool:
        return self.kind == "entailed"


@dataclass(frozen=True)
class ContradictionVerdict:
    kind: str  # yes | no | inconclusive
    reason: Optional[str] = None
    elapsed_ms: int = 0


class _ProcIO:
    """Owns the solver process plus a pump thread draining stdout lines."""

    def __init__(self, cfg: SolverConfig):
        try:
            self.proc = subprocess.Popen(
                [cfg.path, *cfg.args],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise SolverSpawnFailure(f"cannot start solver {cfg.path!r}: {e}") from e
        self.lines: queue.Queue = queue.Queue()
        self._pump = threading.Thread(target=self._drain, daemon=True)
        self._pump.start()

    def _drain(self):
        try:
            for line in self.proc.stdout:
                self.lines.put(line.rstrip("\n"))
        except ValueError:
            pass
        self.lines.put(None)

    def send(self, text: str) -> bool:
        try:
            self.proc.stdin.write(text)
            self.proc.stdin.flush()
            return True
        except (BrokenPipeError, OSError, ValueError):
            return False

    def read_until(self, marker: str, deadline: float):
        """Lines before `marker`, with how the read ended: ok | eof | timeout."""
        out = []
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return out, "timeout"
            try:
                line = self.lines.get(timeout=remaining)
            except queue.Empty:
                return out, "timeout"
            if line is None:
                return out, "eof"
            if line == marker:
                return out, "ok"
            out.append(line)

    def kill(self):
        try:
            self.proc.kill()
            self.proc.wait(timeout=5)
        except Exception:
            pass


def _render_assert(f: Formula) -> str:
    return f"(assert {f})\n"


class SolverDriver:
    """Serialized satisfiability/entailment/consistency queries with timeouts,
    unknown handling, and model extraction. Transferable between threads but
    not shareable concurrently."""

    def __init__(self, cfg: SolverConfig):
        self.cfg = cfg
        self._io: Optional[_ProcIO] = None
        self._marker_seq = 0
        self._inc_vocab_version: Optional[int] = None
        self._inc_asserted: list[str] = []
        self._lock = threading.Lock()

    # -- public queries ----------------------------------------------------

    def check_sat(self, vocab: Vocabulary, assertions: Sequence[Formula],
                  want_model: bool = False) -> CheckResult:
        """Satisfiability of the conjunction; Unknown on timeout."""
        with self._lock:
            return self._query(vocab, list(assertions), [], want_model)

    def entails(self, vocab: Vocabulary, established: Sequence[Formula],
                goal: Formula, want_model: bool = True) -> EntailmentVerdict:
        """established |= goal, checked as unsatisfiability of established + not(goal)."""
        with self._lock:
            res = self._query(vocab, list(established), [Not(goal)], want_model)
        if res.status == UNSAT:
            return EntailmentVerdict("entailed", elapsed_ms=res.elapsed_ms)
        if res.status == SAT:
            return EntailmentVerdict("not_entailed", counter_model=res.model,
                                     elapsed_ms=res.elapsed_ms)
        return EntailmentVerdict("inconclusive", reason=res.reason,
                                 elapsed_ms=res.elapsed_ms)

    def contradicts(self, vocab: Vocabulary, established: Sequence[Formula],
                    candidate: Formula) -> ContradictionVerdict:
        """established |= not(candidate), checked as unsat of established + candidate."""
        with self._lock:
            res = self._query(vocab, list(established), [candidate], False)
        if res.status == UNSAT:
            return ContradictionVerdict("yes", elapsed_ms=res.elapsed_ms)
        if res.status == SAT:
            return ContradictionVerdict("no", elapsed_ms=res.elapsed_ms)
        return ContradictionVerdict("inconclusive", reason=res.reason,
                                    elapsed_ms=res.elapsed_ms)

    def close(self):
        with self._lock:
            if self._io is not None:
                self._io.kill()
                self._io = None
            self._inc_vocab_version = None
            self._inc_asserted = []

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- query plumbing ------------------------------------------------------

    def _deadline(self) -> float:
        return time.monotonic() + self.cfg.timeout_ms / 1000 + max(
            2.0, self.cfg.timeout_ms / 1000
        )

    def _header(self, want_model: bool) -> str:
        lines = [f"(set-option :timeout {self.cfg.timeout_ms})\n"]
        if want_model:
            lines.append("(set-option :produce-models true)\n")
        return "".join(lines)

    def _query(self, vocab, base: list[Formula], probes: list[Formula],
               want_model: bool) -> CheckResult:
        start = time.monotonic()
        if not self.cfg.reuse_process:
            result = self._query_oneshot(vocab, base + probes, want_model)
        elif self.cfg.incremental:
            result = self._query_incremental(vocab, base, probes, want_model)
        else:
            result = self._query_session(vocab, base + probes, want_model)
        elapsed = int((time.monotonic() - start) * 1000)
        return CheckResult(result.status, result.model, elapsed, result.reason)

    def _query_oneshot(self, vocab, assertions, want_model) -> CheckResult:
        script = self._header(want_model) + print_vocabulary(vocab)
        script += "".join(_render_assert(f) for f in assertions)
        script += "(check-sat)\n"
        if want_model:
            script += "(get-model)\n"
        try:
            proc = subprocess.Popen(
                [self.cfg.path, *self.cfg.args],
                stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True,
            )
        except OSError as e:
            raise SolverSpawnFailure(f"cannot start solver {self.cfg.path!r}: {e}") from e
        deadline = self._deadline()
        try:
            out, _ = proc.communicate(script, timeout=max(0.1, deadline - time.monotonic()))
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return CheckResult(UNKNOWN, reason=REASON_TIMEOUT)
        lines = [l.rstrip("\n") for l in out.splitlines()]
        return self._interpret(lines, want_model, crashed=proc.returncode not in (0, None))

    def _ensure_process(self) -> _ProcIO:
        if self._io is None or self._io.proc.poll() is not None:
            self._io = _ProcIO(self.cfg)
            self._inc_vocab_version = None
            self._inc_asserted = []
        return self._io

    def _next_marker(self) -> str:
        self._marker_seq += 1
        return f"::done-{self._marker_seq}::"

    def _abandon_process(self):
        if self._io is not None:
            self._io.kill()
            self._io = None
        self._inc_vocab_version = None
        self._inc_asserted = []

    def _roundtrip(self, io: _ProcIO, payload: str, deadline: float):
        marker = self._next_marker()
        if not io.send(payload + f'(echo "{marker}")\n'):
            return None, "eof"
        return io.read_until(marker, deadline)

    def _query_session(self, vocab, assertions, want_model,
                       retried: bool = False) -> CheckResult:
        io = self._ensure_process()
        script = "(reset)\n" + self._header(want_model) + print_vocabulary(vocab)
        script += "".join(_render_assert(f) for f in assertions)
        script += "(check-sat)\n"
        deadline = self._deadline()
        lines, how = self._roundtrip(io, script, deadline)
        return self._finish_session(io, lines, how, want_model, deadline,
                                    lambda: self._query_session(vocab, assertions,
                                                                want_model, retried=True),
                                    retried)

    def _finish_session(self, io, lines, how, want_model, deadline, retry, retried):
        if how == "timeout":
            self._abandon_process()
            return CheckResult(UNKNOWN, reason=REASON_TIMEOUT)
        if how == "eof":
            self._abandon_process()
            if self.cfg.restart_on_crash and not retried:
                return retry()
            if not self.cfg.restart_on_crash:
                raise SolverFailure("solver process died and restarts are disabled")
            raise SolverFailure("solver process died twice on the same query")
        result = self._interpret(lines, want_model=False, crashed=False)
        if result.status == SAT and want_model:
            model_lines, how2 = self._roundtrip(io, "(get-model)\n", deadline)
            if how2 != "ok":
                self._abandon_process()
                return result
            model = "\n".join(model_lines).strip() or None
            return CheckResult(SAT, model=model)
        return result

    # Incremental mode: the established prefix is kept asserted across
    # queries (it only grows during a run); probes go inside push/pop.
    def _query_incremental(self, vocab, base: list[Formula], probes: list[Formula],
                           want_model, retried: bool = False) -> CheckResult:
        io = self._ensure_process()
        rendered = [str(f) for f in base]
        prefix_ok = (
            self._inc_vocab_version == vocab.version
            and rendered[: len(self._inc_asserted)] == self._inc_asserted
        )
        parts = []
        if not prefix_ok:
            parts.append("(reset)\n" + self._header(want_model) + print_vocabulary(vocab))
            self._inc_asserted = []
            self._inc_vocab_version = vocab.version
        new = rendered[len(self._inc_asserted):]
        parts.extend(f"(assert {text})\n" for text in new)
        parts.append("(push 1)\n")
        parts.extend(_render_assert(f) for f in probes)
        parts.append("(check-sat)\n")
        deadline = self._deadline()
        lines, how = self._roundtrip(io, "".join(parts), deadline)
        if how == "ok":
            self._inc_asserted = rendered
        result = self._finish_session(io, lines, how, want_model, deadline,
                                      lambda: self._query_incremental(
                                          vocab, base, probes, want_model, retried=True),
                                      retried)
        if how == "ok" and self._io is io and io.proc.poll() is None:
            io.send("(pop 1)\n")
        return result

    def _interpret(self, lines: list[str], want_model: bool, crashed: bool) -> CheckResult:
        status = None
        status_idx = -1
        for i, line in enumerate(lines):
            word = line.strip()
            if word in (SAT, UNSAT, UNKNOWN):
                status, status_idx = word, i
                break
            if word.startswith("(error"):
                raise ProtocolError(f"solver reported an error: {word}")
            if word:
                raise ProtocolError(f"unparseable solver reply: {word!r}")
        if status is None:
            if crashed:
                return CheckResult(UNKNOWN, reason=REASON_SOLVER_FAILURE)
            raise ProtocolError("no sat/unsat/unknown in solver reply")
        if status == UNKNOWN:
            return CheckResult(UNKNOWN, reason=REASON_SOLVER_UNKNOWN)
        model = None
        if status == SAT and want_model:
            tail = [l for l in lines[status_idx + 1:] if not l.strip().startswith("(error")]
            model = "\n".join(tail).strip() or None
        return CheckResult(status, model=model)


# -- convenience wrappers over a one-off driver -----------------------------

def _as_driver(cfg: Union[SolverConfig, SolverDriver]) -> tuple[SolverDriver, bool]:
    if isinstance(cfg, SolverDriver):
        return cfg, False
    return SolverDriver(cfg), True


def check_sat(vocab: Vocabulary, assertions: Sequence[Formula],
              cfg: Union[SolverConfig, SolverDriver],
              want_model: bool = False) -> CheckResult:
    driver, own = _as_driver(cfg)
    try:
        return driver.check_sat(vocab, assertions, want_model)
    finally:
        if own:
            driver.close()


def entails(vocab: Vocabulary, established: Sequence[Formula], goal: Formula,
            cfg: Union[SolverConfig, SolverDriver],
            want_model: bool = True) -> EntailmentVerdict:
    driver, own = _as_driver(cfg)
    try:
        return driver.entails(vocab, established, goal, want_model)
    finally:
        if own:
            driver.close()


def contradicts(vocab: Vocabulary, established: Sequence[Formula],
                candidate: Formula,
                cfg: Union[SolverConfig, SolverDriver]) -> ContradictionVerdict:
    driver, own = _as_driver(cfg)
    try:
        return driver.contradicts(vocab, established, candidate)
    finally:
        if own:
            driver.close()
