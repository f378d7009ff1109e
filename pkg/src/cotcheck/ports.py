"""The LLM boundary: autoformalization, premise generation, premise judging,
and reflection ports, each available as a remote HTTP chat endpoint or a
deterministic fixture replay for offline runs.

Ports exchange machine-readable scripts inside fenced blocks. The adapter
extracts the first fence and interprets it by its info tag:

    ```assertions     SMT-LIB assert forms (a translation)
    ```declarations   SMT-LIB declarations (a vocabulary extension)
    ```refused        free-text reason the step cannot be expressed
    ```json           structured payloads (candidates, verdicts, revisions)

A missing or mistagged fence is a malformed round and counts against the
caller's retry budget.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import requests

from .logic import And, Declaration, Formula, Vocabulary
from .smtlib import ParseError, parse_script, print_vocabulary

logger = logging.getLogger(__name__)

PORT_KINDS = ("autoformalizer", "premise_generator", "premise_judge", "reflector")

CONTEXT_SOURCE = "context"
COMMONSENSE_SOURCE = "commonsense"

DIM_GROUNDED = "grounded_contextual"
DIM_ACCEPTABLE = "acceptable_commonsense"
DIM_NECESSARY = "necessary_commonsense"

_FENCE = re.compile(r"```([A-Za-z0-9_-]*)[ \t]*\n(.*?)```", re.DOTALL)


class PortFailure(Exception):
    """Transport-level failure, after transport retries."""


class MissingFixture(PortFailure):
    """No recorded response for a fixture key."""


def extract_fenced_block(text: str) -> Optional[tuple[str, str]]:
    m = _FENCE.search(text)
    if not m:
        return None
    return m.group(1) or "", m.group(2)


# --- request identity -------------------------------------------------------

@dataclass(frozen=True)
class RequestKey:
    case_id: str
    port_kind: str
    step_index: int
    round: int
    attempt: int = 0

    def key_string(self) -> str:
        return f"{self.port_kind}/a{self.attempt}/s{self.step_index}/r{self.round}"


def request_digest(payload: dict) -> str:
    """Stable hash of the canonical serialized request."""
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# --- transports -------------------------------------------------------------

class FixtureTransport:
    """Replays recorded responses keyed by (case-id, port-kind, step, round).

    One JSON file per case under the fixture directory:
        {"case_id": ..., "responses": {"<port>/a0/s1/r1": "text or
         {\"text\": ..., \"request_digest\": ...}"}}
    A pinned request_digest, when present, must match the live request.
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        if not self.path.is_dir():
            raise PortFailure(f"fixture directory not found: {self.path}")
        self._cache: dict[str, dict] = {}
        self._lock = threading.Lock()

    def _case_file(self, case_id: str) -> dict:
        with self._lock:
            if case_id not in self._cache:
                path = self.path / f"{case_id}.json"
                if not path.exists():
                    raise MissingFixture(f"no fixture file for case {case_id!r} at {path}")
                self._cache[case_id] = json.loads(path.read_text(encoding="utf-8"))
            return self._cache[case_id]

    def complete(self, key: RequestKey, payload: dict, *, system: str, user: str) -> str:
        responses = self._case_file(key.case_id).get("responses", {})
        entry = responses.get(key.key_string())
        if entry is None:
            raise MissingFixture(
                f"no recorded response for key {key.case_id}/{key.key_string()}"
            )
        if isinstance(entry, str):
            return entry
        pinned = entry.get("request_digest")
        if pinned is not None and pinned != request_digest(payload):
            raise MissingFixture(
                f"request digest mismatch for {key.case_id}/{key.key_string()}: "
                f"recorded {pinned}, got {request_digest(payload)}"
            )
        return entry["text"]


class RemoteTransport:
    """Single HTTP POST contract: {model, system, user, temperature,
    max_tokens} in, {text} out. Three transport retries with backoff."""

    def __init__(self, url: str, model: str = "", token_env: Optional[str] = None,
                 max_tokens: int = 4096, timeout_s: float = 120.0,
                 max_retries: int = 3, backoff_s: float = 0.5):
        if not url:
            raise PortFailure("remote port needs a URL")
        self.url = url
        self.model = model
        self.token_env = token_env
        self.max_tokens = max_tokens
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self.backoff_s = backoff_s

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.token_env:
            import os

            token = os.environ.get(self.token_env)
            if not token:
                raise PortFailure(f"auth token env var {self.token_env!r} is not set")
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, key: RequestKey, payload: dict, *, system: str, user: str) -> str:
        body = {
            "model": self.model,
            "system": system,
            "user": user,
            "temperature": 0,
            "max_tokens": self.max_tokens,
        }
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries):
            try:
                resp = requests.post(self.url, json=body, headers=self._headers(),
                                     timeout=self.timeout_s)
                if resp.status_code >= 500:
                    raise PortFailure(f"server error {resp.status_code}")
                if resp.status_code != 200:
                    raise PortFailure(
                        f"port at {self.url} replied {resp.status_code}: {resp.text[:200]}"
                    )
                return resp.json()["text"]
            except (requests.RequestException, KeyError, ValueError, PortFailure) as e:
                if isinstance(e, PortFailure) and "replied" in str(e):
                    raise  # 4xx is not retryable
                last_error = e
                if attempt + 1 < self.max_retries:
                    time.sleep(self.backoff_s * (2**attempt))
        raise PortFailure(f"port at {self.url} unreachable after "
                          f"{self.max_retries} attempts: {last_error}")


Transport = Union[FixtureTransport, RemoteTransport]


def fixture_lookup(fixture_path: Union[str, Path], key: RequestKey,
                   payload: Optional[dict] = None) -> str:
    """Recorded response for `key`; a missing key is a hard error naming it."""
    return FixtureTransport(fixture_path).complete(key, payload or {}, system="", user="")


# --- prompt templates -------------------------------------------------------

_PROMPT_DIR = Path(__file__).parent / "prompts"

_SYSTEM_PROMPTS = {
    "autoformalizer": "You translate reasoning steps into SMT-LIB. Reply with one fenced block tagged assertions, declarations, or refused.",
    "premise_generator": "You identify supporting premises for a reasoning step. Reply with one fenced json block.",
    "premise_judge": "You grade premises. Reply with one fenced json block.",
    "reflector": "You revise chains of reasoning given verifier feedback. Reply with one fenced json block.",
}


def _load_template(name: str) -> str:
    return (_PROMPT_DIR / f"{name}.txt").read_text(encoding="utf-8")


class _SafeDict(dict):
    def __missing__(self, key):
        return ""


def _render(template: str, payload: dict) -> str:
    rendered = {}
    for k, v in payload.items():
        rendered[k] = v if isinstance(v, str) else json.dumps(v, indent=2, ensure_ascii=False)
    return template.format_map(_SafeDict(rendered))


# --- port results -----------------------------------------------------------

@dataclass(frozen=True)
class TranslationOk:
    script_text: str


@dataclass(frozen=True)
class NeedsVocabulary:
    script_text: str


@dataclass(frozen=True)
class Refused:
    reason: str


@dataclass(frozen=True)
class MalformedRound:
    detail: str


AutoformalizeResult = Union[TranslationOk, NeedsVocabulary, Refused, MalformedRound]


@dataclass(frozen=True)
class RawCandidate:
    nl_text: str
    source: str  # context | commonsense
    script_text: str
    span: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class JudgeVerdict:
    dimension: str
    passed: bool
    rationale: str = ""


@dataclass(frozen=True)
class RevisedCot:
    steps: tuple[str, ...]
    answer: Optional[str] = None


# --- port adapters ----------------------------------------------------------

class Port:
    kind = ""

    def __init__(self, transport: Transport):
        self.transport = transport
        self._template = _load_template(self.kind)

    def _call(self, key: RequestKey, payload: dict) -> str:
        user = _render(self._template, payload)
        return self.transport.complete(key, payload, system=_SYSTEM_PROMPTS[self.kind],
                                       user=user)


class AutoformalizerPort(Port):
    kind = "autoformalizer"

    def translate(self, key: RequestKey, payload: dict) -> AutoformalizeResult:
        text = self._call(key, payload)
        block = extract_fenced_block(text)
        if block is None:
            return MalformedRound("no fenced block in port response")
        tag, body = block
        if tag == "assertions":
            return TranslationOk(body)
        if tag == "declarations":
            return NeedsVocabulary(body)
        if tag == "refused":
            return Refused(body.strip() or "refused without a reason")
        return MalformedRound(f"unexpected fence tag {tag!r}")


class PremiseGeneratorPort(Port):
    kind = "premise_generator"

    def generate(self, key: RequestKey, payload: dict) -> Union[list[RawCandidate], MalformedRound]:
        text = self._call(key, payload)
        block = extract_fenced_block(text)
        if block is None:
            return MalformedRound("no fenced block in port response")
        tag, body = block
        if tag not in ("json", ""):
            return MalformedRound(f"unexpected fence tag {tag!r}")
        try:
            entries = json.loads(body)
            out = []
            for e in entries:
                source = e["source"]
                if source not in (CONTEXT_SOURCE, COMMONSENSE_SOURCE):
                    return MalformedRound(f"unknown premise source {source!r}")
                span = tuple(e["span"]) if e.get("span") is not None else None
                out.append(RawCandidate(e["nl"], source, e["script"], span))
            return out
        except (ValueError, KeyError, TypeError) as e:
            return MalformedRound(f"bad candidate payload: {e}")


class PremiseJudgePort(Port):
    kind = "premise_judge"

    def judge(self, key: RequestKey, payload: dict) -> list[JudgeVerdict]:
        text = self._call(key, payload)
        block = extract_fenced_block(text)
        if block is None:
            raise PortFailure("judge returned no fenced block")
        try:
            entries = json.loads(block[1])
            return [JudgeVerdict(e["dimension"], bool(e["pass"]), e.get("rationale", ""))
                    for e in entries]
        except (ValueError, KeyError, TypeError) as e:
            raise PortFailure(f"bad judge payload: {e}") from e


class ReflectorPort(Port):
    kind = "reflector"

    def revise(self, key: RequestKey, payload: dict) -> RevisedCot:
        text = self._call(key, payload)
        block = extract_fenced_block(text)
        if block is None:
            raise PortFailure("reflector returned no fenced block")
        try:
            data = json.loads(block[1])
            steps = tuple(str(s) for s in data["steps"])
            return RevisedCot(steps, data.get("answer"))
        except (ValueError, KeyError, TypeError) as e:
            raise PortFailure(f"bad reflector payload: {e}") from e


@dataclass
class NLPorts:
    """The four LLM-facing ports; all resolvable at engine start."""

    autoformalizer: AutoformalizerPort
    premise_generator: PremiseGeneratorPort
    premise_judge: PremiseJudgePort
    reflector: ReflectorPort

    @classmethod
    def from_config(cls, cfg: dict) -> "NLPorts":
        adapters = {}
        port_classes = {
            "autoformalizer": AutoformalizerPort,
            "premise_generator": PremiseGeneratorPort,
            "premise_judge": PremiseJudgePort,
            "reflector": ReflectorPort,
        }
        for kind, port_cls in port_classes.items():
            spec = cfg[kind]
            if spec["kind"] == "fixture":
                transport = FixtureTransport(spec["path"])
            else:
                transport = RemoteTransport(
                    url=spec["url"],
                    model=spec.get("model", ""),
                    token_env=spec.get("token_env"),
                )
            adapters[kind] = port_cls(transport)
        return cls(**adapters)

    @classmethod
    def fixtures(cls, path: Union[str, Path]) -> "NLPorts":
        transport = FixtureTransport(path)
        return cls(AutoformalizerPort(transport), PremiseGeneratorPort(transport),
                   PremiseJudgePort(transport), ReflectorPort(transport))


# --- autoformalization: the two-stage translate/extend loop -----------------

@dataclass(frozen=True)
class AutoformalizeRequest:
    case_id: str
    step_index: int
    step_text: str
    vocab: Vocabulary
    prior_steps: tuple[str, ...] = ()
    context: str = ""
    document: str = ""
    question: str = ""
    attempt: int = 0

    def payload(self, round_no: int) -> dict:
        return {
            "case_id": self.case_id,
            "step_index": self.step_index,
            "step_text": self.step_text,
            "vocab_script": print_vocabulary(self.vocab),
            "prior_steps": list(self.prior_steps),
            "context": self.context,
            "document": self.document,
            "question": self.question,
            "attempt": self.attempt,
            "round": round_no,
        }


@dataclass(frozen=True)
class Translation:
    formula: Formula
    vocab: Vocabulary
    new_declarations: tuple[Declaration, ...]
    span_map: tuple[tuple[str, int], ...]
    rounds: int


@dataclass(frozen=True)
class Untranslatable:
    reason: str
    diagnostics: tuple[str, ...]
    rounds: int
    vocab: Vocabulary  # extensions admitted before giving up persist


def _conjoin(formulas: Sequence[Formula]) -> Formula:
    return formulas[0] if len(formulas) == 1 else And(tuple(formulas))


def autoformalize(req: AutoformalizeRequest, port: AutoformalizerPort,
                  max_rounds: int = 3) -> Union[Translation, Untranslatable]:
    """Translate one step, extending the vocabulary between rounds.

    Each port interaction consumes one round, whether it returns a
    translation, a vocabulary extension, or something malformed. A Refused
    reply short-circuits to Untranslatable.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    vocab = req.vocab
    new_decls: list[Declaration] = []
    diagnostics: list[str] = []
    for round_no in range(1, max_rounds + 1):
        key = RequestKey(req.case_id, "autoformalizer", req.step_index, round_no,
                         req.attempt)
        current = dataclasses.replace(req, vocab=vocab)
        result = port.translate(key, current.payload(round_no))
        if isinstance(result, Refused):
            return Untranslatable(result.reason, tuple(diagnostics), round_no, vocab)
        if isinstance(result, MalformedRound):
            diagnostics.append(f"round {round_no}: {result.detail}")
            continue
        if isinstance(result, NeedsVocabulary):
            try:
                script = parse_script(result.script_text, vocab)
            except ParseError as e:
                diagnostics.append(f"round {round_no}: bad declarations: {e.diagnostic}")
                continue
            if script.assertions:
                diagnostics.append(
                    f"round {round_no}: declarations block contained assertions"
                )
                continue
            for decl in script.declarations:
                extended = vocab.declare(decl)
                if extended is not vocab:
                    new_decls.append(decl)
                vocab = extended
            continue
        # TranslationOk
        try:
            script = parse_script(result.script_text, vocab)
        except ParseError as e:
            diagnostics.append(f"round {round_no}: {e.diagnostic}")
            continue
        if script.declarations:
            diagnostics.append(f"round {round_no}: assertions block contained declarations")
            continue
        if not script.assertions:
            diagnostics.append(f"round {round_no}: no assertions in translation")
            continue
        span_map = tuple(
            (a.doc, i) for i, a in enumerate(script.assertions) if a.doc is not None
        )
        formula = _conjoin([a.formula for a in script.assertions])
        return Translation(formula, vocab, tuple(new_decls), span_map, round_no)
    return Untranslatable(
        "translation budget exhausted", tuple(diagnostics), max_rounds, vocab
    )


# --- premise generation ------------------------------------------------------

@dataclass(frozen=True)
class ParsedCandidate:
    nl_text: str
    source: str
    formula: Formula
    declarations: tuple[Declaration, ...]
    script_text: str
    span: Optional[tuple[int, int]] = None


def _parse_candidate(raw: RawCandidate, vocab: Vocabulary) -> ParsedCandidate:
    script = parse_script(raw.script_text, vocab)
    if not script.assertions:
        from .smtlib import ParseDiagnostic

        raise ParseError(ParseDiagnostic(1, 1, "candidate script has no assertions", "("))
    formula = _conjoin([a.formula for a in script.assertions])
    return ParsedCandidate(raw.nl_text, raw.source, formula,
                           script.declarations, raw.script_text, raw.span)


def generate_premises(
    case_id: str,
    step_index: int,
    step_text: str,
    formula: Formula,
    vocab: Vocabulary,
    port: PremiseGeneratorPort,
    max_candidates: int = 5,
    context: str = "",
    document: str = "",
    question: str = "",
    attempt: int = 0,
) -> list[ParsedCandidate]:
    """Candidate premises for a step that failed entailment.

    Candidates are parsed independently against the current vocabulary (each
    carries its own declaration delta, committed later only if it survives
    filtering). One regeneration round replaces the set when any candidate
    fails to parse/sort or introduces an undocumented declaration; still-bad
    candidates are then dropped.
    """
    payload = {
        "case_id": case_id,
        "step_index": step_index,
        "step_text": step_text,
        "formula": str(formula),
        "vocab_script": print_vocabulary(vocab),
        "context": context,
        "document": document,
        "question": question,
        "max_candidates": max_candidates,
        "attempt": attempt,
    }

    def fetch(round_no: int):
        key = RequestKey(case_id, "premise_generator", step_index, round_no, attempt)
        return port.generate(key, {**payload, "round": round_no})

    def parse_all(raws):
        parsed, problems = [], []
        for raw in raws:
            try:
                candidate = _parse_candidate(raw, vocab)
            except ParseError as e:
                problems.append(f"{raw.nl_text!r}: {getattr(e, 'diagnostic', 'empty script')}")
                continue
            if any(d.doc is None for d in candidate.declarations):
                problems.append(f"{raw.nl_text!r}: new declaration without a gloss")
            parsed.append(candidate)
        return parsed, problems

    result = fetch(1)
    if isinstance(result, MalformedRound):
        raws, problems = [], [result.detail]
    else:
        raws = result[:max_candidates]
        _, problems = parse_all(raws)
    if problems:
        logger.debug("premise regeneration for step %s: %s", step_index, problems)
        regenerated = fetch(2)
        if not isinstance(regenerated, MalformedRound):
            raws = regenerated[:max_candidates]
    # after regeneration, candidates that still fail to parse/sort are dropped
    parsed, _ = parse_all(raws)
    return parsed[:max_candidates]


# --- premise judging ---------------------------------------------------------

def applicable_dimensions(source: str, necessity: bool = False) -> tuple[str, ...]:
    if source == CONTEXT_SOURCE:
        return (DIM_GROUNDED,)
    dims = [DIM_ACCEPTABLE]
    if necessity:
        dims.append(DIM_NECESSARY)
    return tuple(dims)


def judge_premise(
    case_id: str,
    step_index: int,
    candidate_ordinal: int,
    nl_text: str,
    script_text: str,
    source: str,
    port: PremiseJudgePort,
    necessity: bool = False,
    context: str = "",
    document: str = "",
    question: str = "",
    attempt: int = 0,
) -> tuple[JudgeVerdict, ...]:
    """Judge one premise on the dimensions its source admits.

    Context premises are graded on attribution to the source text only;
    commonsense premises on acceptability, plus necessity when enabled.
    """
    dims = applicable_dimensions(source, necessity)
    key = RequestKey(case_id, "premise_judge", step_index, candidate_ordinal, attempt)
    payload = {
        "case_id": case_id,
        "step_index": step_index,
        "premise_nl": nl_text,
        "premise_script": script_text,
        "source": source,
        "dimensions": list(dims),
        "context": context,
        "document": document,
        "question": question,
        "attempt": attempt,
        "round": candidate_ordinal,
    }
    verdicts = port.judge(key, payload)
    got = tuple(v.dimension for v in verdicts)
    if set(got) != set(dims):
        raise PortFailure(
            f"judge returned dimensions {got} for a {source} premise; expected {dims}"
        )
    return tuple(verdicts)
