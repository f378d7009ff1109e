"""Step-wise verification of a reasoning chain against a growing premise set.

For each step: autoformalize (bounded retries, untranslatable on exhaustion),
check contradiction against established knowledge, check entailment, and if
neither holds generate supporting premises, filter them for consistency,
optionally judge them, and re-check entailment. Failures are classified as
untranslatable, contradiction, or ungrounded; the run always continues to
the next step. Per-candidate vocabulary extensions commit only when the
candidate survives filtering; step-level extensions always commit.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import __version__
from .logic import (
    ErrorKind,
    Formula,
    KnowledgeState,
    PremiseOrigin,
    StepFormula,
    Vocabulary,
)
from .ports import (
    AutoformalizeRequest,
    JudgeVerdict,
    NLPorts,
    ParsedCandidate,
    PortFailure,
    Translation,
    Untranslatable,
    autoformalize,
    generate_premises,
    judge_premise,
)
from .smtlib import Assertion, Script, parse_script, print_script, script_vocabulary
from .solver import (
    CheckResult,
    ContradictionVerdict,
    EntailmentVerdict,
    ProtocolError,
    SolverConfig,
    SolverDriver,
    SolverFailure,
    SolverSpawnFailure,
)

JUDGE_OFF = "off"
JUDGE_FILTER = "filter"
JUDGE_ANNOTATE = "annotate"

STATUS_ENTAILED_DIRECT = "entailed_direct"
STATUS_ENTAILED_WITH_PREMISES = "entailed_with_premises"
STATUS_FAILED = "failed"

ALREADY_ENTAILED = "already_entailed"
CONTRADICTED = "contradicted"
NEEDS_PREMISES = "needs_premises"


@dataclass(frozen=True)
class EngineConfig:
    retry_cap: int = 3
    max_candidates: int = 5
    judge_mode: str = JUDGE_ANNOTATE
    judge_necessity: bool = False

    def __post_init__(self):
        if self.judge_mode not in (JUDGE_OFF, JUDGE_FILTER, JUDGE_ANNOTATE):
            raise ValueError(f"unknown judge mode {self.judge_mode!r}")
        if self.retry_cap < 1:
            raise ValueError("retry_cap must be at least 1")


@dataclass(frozen=True)
class VerificationCase:
    case_id: str
    question: str
    cot_steps: tuple[str, ...]
    final_answer: str
    context: str = ""
    document: str = ""
    gold_answer: Optional[str] = None

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationCase":
        missing = {"case_id", "question", "cot", "answer"} - set(data)
        if missing:
            raise ValueError(f"case record missing keys: {sorted(missing)}")
        return cls(
            case_id=data["case_id"],
            question=data["question"],
            cot_steps=tuple(data["cot"]),
            final_answer=data["answer"],
            context=data.get("context", ""),
            document=data.get("document", ""),
            gold_answer=data.get("gold"),
        )

    def to_dict(self) -> dict:
        out = {
            "case_id": self.case_id,
            "question": self.question,
            "cot": list(self.cot_steps),
            "answer": self.final_answer,
        }
        if self.context:
            out["context"] = self.context
        if self.document:
            out["document"] = self.document
        if self.gold_answer is not None:
            out["gold"] = self.gold_answer
        return out

    def prompt_text(self) -> str:
        parts = [p for p in (self.context, self.document, self.question) if p]
        return "\n\n".join(parts)


@dataclass(frozen=True)
class SolverEvidence:
    kind: str  # contradiction-check | entailment-check | premise-consistency:N | re-entailment | degeneracy-check
    status: str
    reason: Optional[str] = None
    model: Optional[str] = None
    elapsed_ms: int = 0

    @classmethod
    def from_check(cls, kind: str, res: CheckResult) -> "SolverEvidence":
        return cls(kind, res.status, res.reason, res.model, res.elapsed_ms)

    @classmethod
    def from_entailment(cls, kind: str, v: EntailmentVerdict) -> "SolverEvidence":
        return cls(kind, v.kind, v.reason, v.counter_model, v.elapsed_ms)

    @classmethod
    def from_contradiction(cls, kind: str, v: ContradictionVerdict) -> "SolverEvidence":
        return cls(kind, v.kind, v.reason, None, v.elapsed_ms)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {"kind": self.kind, "status": self.status}
        if self.reason:
            out["reason"] = self.reason
        if self.model:
            out["model"] = self.model
        if include_timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SolverEvidence":
        return cls(data["kind"], data["status"], data.get("reason"),
                   data.get("model"), data.get("elapsed_ms", 0))


@dataclass(frozen=True)
class PremiseRecord:
    premise_id: str
    nl_text: str
    formula_text: str
    script_text: str
    source: str  # context | commonsense
    introduced_at_step: int
    judge_verdicts: tuple[JudgeVerdict, ...] = ()
    span: Optional[tuple[int, int]] = None

    def all_verdicts_pass(self) -> bool:
        return all(v.passed for v in self.judge_verdicts)

    def to_dict(self) -> dict:
        out = {
            "premise_id": self.premise_id,
            "nl": self.nl_text,
            "formula": self.formula_text,
            "script": self.script_text,
            "source": self.source,
            "introduced_at_step": self.introduced_at_step,
            "judge_verdicts": [
                {"dimension": v.dimension, "pass": v.passed, "rationale": v.rationale}
                for v in self.judge_verdicts
            ],
        }
        if self.span is not None:
            out["span"] = list(self.span)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PremiseRecord":
        return cls(
            premise_id=data["premise_id"],
            nl_text=data["nl"],
            formula_text=data["formula"],
            script_text=data["script"],
            source=data["source"],
            introduced_at_step=data["introduced_at_step"],
            judge_verdicts=tuple(
                JudgeVerdict(v["dimension"], v["pass"], v.get("rationale", ""))
                for v in data.get("judge_verdicts", [])
            ),
            span=tuple(data["span"]) if data.get("span") else None,
        )


@dataclass(frozen=True)
class StepOutcome:
    step_index: int
    step_text: str
    status: str  # entailed_direct | entailed_with_premises | failed
    error: Optional[ErrorKind] = None
    formula_text: Optional[str] = None
    premise_ids: tuple[str, ...] = ()
    span_map: tuple[tuple[str, int], ...] = ()
    solver_evidence: tuple[SolverEvidence, ...] = ()
    diagnostics: tuple[str, ...] = ()
    degenerate_entailment: bool = False
    rounds: int = 0

    def __post_init__(self):
        if self.status == STATUS_FAILED and self.error is None:
            raise ValueError("failed outcomes carry an error kind")
        if self.error == ErrorKind.UNTRANSLATABLE and self.formula_text is not None:
            raise ValueError("untranslatable steps have no formula")
        if self.status != STATUS_FAILED and self.formula_text is None:
            raise ValueError("entailed outcomes carry a formula")
        if self.status == STATUS_ENTAILED_WITH_PREMISES and not self.premise_ids:
            raise ValueError("entailed_with_premises lists at least one premise")

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "step_index": self.step_index,
            "step_text": self.step_text,
            "status": self.status,
        }
        if self.error is not None:
            out["error"] = self.error.value
        if self.formula_text is not None:
            out["formula"] = self.formula_text
        if self.premise_ids:
            out["premise_ids"] = list(self.premise_ids)
        if self.span_map:
            out["span_map"] = [[text, idx] for text, idx in self.span_map]
        out["solver_evidence"] = [e.to_dict(include_timing) for e in self.solver_evidence]
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        if self.degenerate_entailment:
            out["degenerate_entailment"] = True
        if self.rounds:
            out["rounds"] = self.rounds
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StepOutcome":
        return cls(
            step_index=data["step_index"],
            step_text=data["step_text"],
            status=data["status"],
            error=ErrorKind(data["error"]) if "error" in data else None,
            formula_text=data.get("formula"),
            premise_ids=tuple(data.get("premise_ids", ())),
            span_map=tuple((t, i) for t, i in data.get("span_map", ())),
            solver_evidence=tuple(
                SolverEvidence.from_dict(e) for e in data.get("solver_evidence", ())
            ),
            diagnostics=tuple(data.get("diagnostics", ())),
            degenerate_entailment=data.get("degenerate_entailment", False),
            rounds=data.get("rounds", 0),
        )


@dataclass
class VerificationReport:
    case_id: str
    outcomes: list[StepOutcome]
    premises: list[PremiseRecord]
    established: list[dict]  # {"origin": "step:3"|"premise:P1", "formula": text}
    established_script: str
    valid: bool
    errors: list[tuple[int, ErrorKind]]
    final_answer: str
    timing_ms: list[int] = field(default_factory=list)
    aborted: bool = False
    abort_reason: Optional[str] = None
    engine_version: str = __version__
    config_digest: Optional[str] = None

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "case_id": self.case_id,
            "valid": self.valid,
            "aborted": self.aborted,
            "errors": [[i, kind.value] for i, kind in self.errors],
            "final_answer": self.final_answer,
            "outcomes": [o.to_dict(include_timing) for o in self.outcomes],
            "premises": [p.to_dict() for p in self.premises],
            "established": self.established,
            "established_script": self.established_script,
            "engine_version": self.engine_version,
        }
        if self.abort_reason:
            out["abort_reason"] = self.abort_reason
        if self.config_digest:
            out["config_digest"] = self.config_digest
        if include_timing:
            out["timing_ms"] = list(self.timing_ms)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            case_id=data["case_id"],
            outcomes=[StepOutcome.from_dict(o) for o in data["outcomes"]],
            premises=[PremiseRecord.from_dict(p) for p in data["premises"]],
            established=list(data.get("established", [])),
            established_script=data.get("established_script", ""),
            valid=data["valid"],
            errors=[(i, ErrorKind(kind)) for i, kind in data["errors"]],
            final_answer=data.get("final_answer", ""),
            timing_ms=list(data.get("timing_ms", [])),
            aborted=data.get("aborted", False),
            abort_reason=data.get("abort_reason"),
            engine_version=data.get("engine_version", ""),
            config_digest=data.get("config_digest"),
        )


def config_digest(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# --- classification ---------------------------------------------------------

def classify_step(state: KnowledgeState, f: Formula,
                  driver: SolverDriver) -> tuple[str, list[SolverEvidence]]:
    """Contradiction first, then entailment, else premises are needed.

    Inconclusive verdicts fail open: an inconclusive contradiction check is
    treated as no contradiction, an inconclusive entailment as not entailed;
    both stay visible in the evidence.
    """
    established = state.established_formulas()
    evidence = []
    con = driver.contradicts(state.vocab, established, f)
    evidence.append(SolverEvidence.from_contradiction("contradiction-check", con))
    if con.kind == "yes":
        return CONTRADICTED, evidence
    ent = driver.entails(state.vocab, established, f)
    evidence.append(SolverEvidence.from_entailment("entailment-check", ent))
    if ent.kind == "entailed":
        return ALREADY_ENTAILED, evidence
    return NEEDS_PREMISES, evidence


# --- premise incorporation ---------------------------------------------------

class _PremiseCounter:
    def __init__(self):
        self.n = 0

    def next_id(self) -> str:
        self.n += 1
        return f"P{self.n}"


def incorporate_premises(
    state: KnowledgeState,
    step_index: int,
    step_text: str,
    f: Formula,
    candidates: Sequence[ParsedCandidate],
    driver: SolverDriver,
    ports: NLPorts,
    cfg: EngineConfig,
    case: VerificationCase,
    counter: _PremiseCounter,
    prior_evidence: Sequence[SolverEvidence] = (),
    span_map: tuple = (),
    rounds: int = 0,
    attempt: int = 0,
) -> tuple[KnowledgeState, StepOutcome, list[PremiseRecord]]:
    """Filter candidates, conjoin survivors, re-check entailment, update state.

    Survivors and the step formula are appended to established knowledge
    whether or not entailment succeeds (an ungrounded step still contributes
    its claims to later checks). Discarded candidates' declarations roll back.
    """
    evidence = list(prior_evidence)
    established = state.established_formulas()
    survivors: list[tuple[ParsedCandidate, tuple[JudgeVerdict, ...]]] = []
    for ordinal, cand in enumerate(candidates, 1):
        try:
            cand_vocab = state.vocab.declare_all(cand.declarations)
        except Exception as e:
            evidence.append(SolverEvidence(f"premise-consistency:{ordinal}", "skipped",
                                           reason=f"declaration conflict: {e}"))
            continue
        res = driver.check_sat(cand_vocab, established + [cand.formula])
        evidence.append(SolverEvidence.from_check(f"premise-consistency:{ordinal}", res))
        if res.status == "unsat":
            continue  # inconsistent with established knowledge; roll back
        verdicts: tuple[JudgeVerdict, ...] = ()
        if cfg.judge_mode != JUDGE_OFF:
            verdicts = judge_premise(
                case.case_id, step_index, ordinal, cand.nl_text, cand.script_text,
                cand.source, ports.premise_judge, necessity=cfg.judge_necessity,
                context=case.context, document=case.document, question=case.question,
                attempt=attempt,
            )
            if cfg.judge_mode == JUDGE_FILTER and not all(v.passed for v in verdicts):
                continue
        survivors.append((cand, verdicts))

    # commit survivors: vocabulary first, then formulas with premise origins
    records: list[PremiseRecord] = []
    vocab = state.vocab
    for cand, _ in survivors:
        vocab = vocab.declare_all(cand.declarations)
    state.extend_vocab(vocab)
    premise_formulas = [cand.formula for cand, _ in survivors]

    ent = driver.entails(state.vocab, established + premise_formulas, f)
    evidence.append(SolverEvidence.from_entailment("re-entailment", ent))
    degenerate = False
    if ent.kind == "entailed" and survivors:
        sanity = driver.check_sat(state.vocab, established + premise_formulas)
        evidence.append(SolverEvidence.from_check("degeneracy-check", sanity))
        degenerate = sanity.status == "unsat"

    for cand, verdicts in survivors:
        record = PremiseRecord(
            premise_id=counter.next_id(),
            nl_text=cand.nl_text,
            formula_text=str(cand.formula),
            script_text=cand.script_text,
            source=cand.source,
            introduced_at_step=step_index,
            judge_verdicts=verdicts,
            span=cand.span,
        )
        records.append(record)
        state.add_established(cand.formula, PremiseOrigin(record.premise_id))
        state.add_premise_id(record.premise_id)
    state.add_established(f, StepFormula(step_index))

    if ent.kind == "entailed":
        outcome = StepOutcome(
            step_index, step_text, STATUS_ENTAILED_WITH_PREMISES,
            formula_text=str(f),
            premise_ids=tuple(r.premise_id for r in records),
            span_map=span_map, solver_evidence=tuple(evidence),
            degenerate_entailment=degenerate, rounds=rounds,
        )
    else:
        state.record_error(step_index, ErrorKind.UNGROUNDED)
        outcome = StepOutcome(
            step_index, step_text, STATUS_FAILED, error=ErrorKind.UNGROUNDED,
            formula_text=str(f),
            premise_ids=tuple(r.premise_id for r in records),
            span_map=span_map, solver_evidence=tuple(evidence), rounds=rounds,
        )
    return state, outcome, records


# --- the per-case loop --------------------------------------------------------

def _established_entries(state: KnowledgeState) -> list[dict]:
    out = []
    for formula, origin in state.established:
        if isinstance(origin, StepFormula):
            tag = f"step:{origin.index}"
        else:
            tag = f"premise:{origin.premise_id}"
        out.append({"origin": tag, "formula": str(formula)})
    return out


def _established_script(state: KnowledgeState) -> str:
    items = list(state.vocab.declarations)
    for formula, origin in state.established:
        items.append(Assertion(formula, doc=origin.label()))
    return print_script(Script(tuple(items)))


def verify_case(
    case: VerificationCase,
    ports: NLPorts,
    solver: Union[SolverConfig, SolverDriver],
    cfg: EngineConfig = EngineConfig(),
    attempt: int = 0,
) -> VerificationReport:
    """Run the per-step verification loop and assemble the report.

    Port or solver infrastructure failures abort the case: the report is
    marked aborted (distinct from invalid) with the outcomes gathered so far.
    """
    own_driver = not isinstance(solver, SolverDriver)
    driver = SolverDriver(solver) if own_driver else solver
    state = KnowledgeState()
    outcomes: list[StepOutcome] = []
    premises: list[PremiseRecord] = []
    timing: list[int] = []
    counter = _PremiseCounter()
    abort_reason = None
    try:
        for i, step_text in enumerate(case.cot_steps, 1):
            started = time.monotonic()
            req = AutoformalizeRequest(
                case_id=case.case_id, step_index=i, step_text=step_text,
                vocab=state.vocab, prior_steps=tuple(case.cot_steps[: i - 1]),
                context=case.context, document=case.document,
                question=case.question, attempt=attempt,
            )
            result = autoformalize(req, ports.autoformalizer, cfg.retry_cap)
            state.extend_vocab(result.vocab)
            if isinstance(result, Untranslatable):
                state.record_error(i, ErrorKind.UNTRANSLATABLE)
                outcomes.append(StepOutcome(
                    i, step_text, STATUS_FAILED, error=ErrorKind.UNTRANSLATABLE,
                    diagnostics=(result.reason, *result.diagnostics),
                    rounds=result.rounds,
                ))
                timing.append(int((time.monotonic() - started) * 1000))
                continue
            f = result.formula
            classification, evidence = classify_step(state, f, driver)
            if classification == CONTRADICTED:
                state.record_error(i, ErrorKind.CONTRADICTION)
                outcomes.append(StepOutcome(
                    i, step_text, STATUS_FAILED, error=ErrorKind.CONTRADICTION,
                    formula_text=str(f), span_map=result.span_map,
                    solver_evidence=tuple(evidence), rounds=result.rounds,
                ))
                timing.append(int((time.monotonic() - started) * 1000))
                continue
            if classification == ALREADY_ENTAILED:
                state.add_established(f, StepFormula(i))
                outcomes.append(StepOutcome(
                    i, step_text, STATUS_ENTAILED_DIRECT, formula_text=str(f),
                    span_map=result.span_map, solver_evidence=tuple(evidence),
                    rounds=result.rounds,
                ))
                timing.append(int((time.monotonic() - started) * 1000))
                continue
            candidates = generate_premises(
                case.case_id, i, step_text, f, state.vocab,
                ports.premise_generator, cfg.max_candidates,
                context=case.context, document=case.document,
                question=case.question, attempt=attempt,
            )
            state, outcome, new_records = incorporate_premises(
                state, i, step_text, f, candidates, driver, ports, cfg, case,
                counter, prior_evidence=evidence, span_map=result.span_map,
                rounds=result.rounds, attempt=attempt,
            )
            outcomes.append(outcome)
            premises.extend(new_records)
            timing.append(int((time.monotonic() - started) * 1000))
    except PortFailure as e:
        abort_reason = f"port-failure: {e}"
    except (SolverFailure, SolverSpawnFailure, ProtocolError) as e:
        abort_reason = f"solver-failure: {e}"
    finally:
        if own_driver:
            driver.close()

    aborted = abort_reason is not None
    valid = not aborted and not state.errors
    return VerificationReport(
        case_id=case.case_id,
        outcomes=outcomes,
        premises=premises,
        established=_established_entries(state),
        established_script=_established_script(state),
        valid=valid,
        errors=list(state.errors),
        final_answer=case.final_answer,
        timing_ms=timing,
        aborted=aborted,
        abort_reason=abort_reason,
    )


# --- report replay (re-checkability) -----------------------------------------

def replay_report(report: VerificationReport,
                  solver: Union[SolverConfig, SolverDriver]) -> bool:
    """Re-check a report's recorded entailments against the solver.

    For every entailed step, the established prefix before the step plus the
    step's own premises must still entail its formula; the full premise set
    must be satisfiable. Returns True when everything re-checks.
    """
    own_driver = not isinstance(solver, SolverDriver)
    driver = SolverDriver(solver) if own_driver else solver
    try:
        script = parse_script(report.established_script)
        vocab = script_vocabulary(script)
        by_origin = {}
        order = []
        for entry, assertion in zip(report.established, script.assertions):
            by_origin[entry["origin"]] = assertion.formula
            order.append(entry["origin"])
        for outcome in report.outcomes:
            if outcome.status == STATUS_FAILED:
                continue
            goal = by_origin.get(f"step:{outcome.step_index}")
            if goal is None:
                return False
            prefix = []
            for origin in order:
                if origin == f"step:{outcome.step_index}":
                    break
                if origin.startswith("premise:") and origin.split(":", 1)[1] in outcome.premise_ids:
                    continue  # the step's own premises join below
                prefix.append(by_origin[origin])
            premise_formulas = [by_origin[f"premise:{pid}"] for pid in outcome.premise_ids]
            verdict = driver.entails(vocab, prefix + premise_formulas, goal,
                                     want_model=False)
            if verdict.kind != "entailed":
                return False
        if report.premises:
            premise_formulas = [by_origin[f"premise:{p.premise_id}"] for p in report.premises]
            if driver.check_sat(vocab, premise_formulas).status != "sat":
                return False
        return True
    finally:
        if own_driver:
            driver.close()
