#!/usr/bin/env python3
"""Regenerates the golden fixture files and case JSONLs in this directory.

Each fixture file records the port responses for one case, keyed
"port/a{attempt}/s{step}/r{round}". Run from anywhere:

    python3 tests/data/gen_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent


def assertions(*pairs: tuple[str, str]) -> str:
    lines = []
    for gloss, form in pairs:
        lines.append(f"; {gloss}")
        lines.append(f"(assert {form})")
    return "```assertions\n" + "\n".join(lines) + "\n```"


def declarations(*pairs: tuple[str, str]) -> str:
    lines = []
    for gloss, form in pairs:
        lines.append(f"; {gloss}")
        lines.append(form)
    return "```declarations\n" + "\n".join(lines) + "\n```"


def refused(reason: str) -> str:
    return "```refused\n" + reason + "\n```"


def candidates(*entries: dict) -> str:
    return "```json\n" + json.dumps(list(entries), indent=2) + "\n```"


def candidate(nl: str, source: str, script_pairs: list[tuple[str, str, bool]],
              span=None) -> dict:
    # script_pairs: (gloss, smt form, is_declaration)
    lines = []
    for gloss, form, is_decl in script_pairs:
        lines.append(f"; {gloss}")
        lines.append(form if is_decl else f"(assert {form})")
    return {"nl": nl, "source": source, "script": "\n".join(lines), "span": span}


def verdicts(*entries: tuple[str, bool, str]) -> str:
    return "```json\n" + json.dumps(
        [{"dimension": d, "pass": p, "rationale": r} for d, p, r in entries], indent=2
    ) + "\n```"


def revision(steps: list[str], answer: str) -> str:
    return "```json\n" + json.dumps({"steps": steps, "answer": answer}, indent=2) + "\n```"


def write_fixture(case_id: str, responses: dict):
    path = HERE / "fixtures" / f"{case_id}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps({"case_id": case_id, "responses": responses}, indent=2,
                   ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def write_cases(name: str, cases: list[dict]):
    path = HERE / "cases" / f"{name}.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        "".join(json.dumps(c, ensure_ascii=False) + "\n" for c in cases),
        encoding="utf-8",
    )


# --------------------------------------------------------------------------
# Charlie: the benefits-qualification walkthrough
# --------------------------------------------------------------------------

CHARLIE_STEPS = [
    "Charlie was born in 2005 and lives with his parent Bob",
    "Charlie is at most 18 years old in 2023",
    "A child who is 18 or younger and lives with a parent qualifies",
    "Therefore, Charlie qualifies for benefits in 2023",
]

CHARLIE_CASE = {
    "case_id": "charlie",
    "question": "Does Charlie qualify for benefits in 2023?",
    "context": "Charlie was born in 2005 and lives with Bob.",
    "document": "A child qualifies for benefits if they are under 21 and live with their parent.",
    "cot": CHARLIE_STEPS,
    "answer": "Yes",
    "gold": "Yes",
}

CHARLIE_S1_DECLS = declarations(
    ("represents a person", "(declare-sort Person 0)"),
    ("specific person Charlie", "(declare-const charlie Person)"),
    ("specific person Bob", "(declare-const bob Person)"),
    ("birth year of a person", "(declare-fun birth_year (Person) Int)"),
    ("whether person lives with another person", "(declare-fun lives_with (Person Person) Bool)"),
    ("whether the first person is a parent of the second", "(declare-fun parent (Person Person) Bool)"),
)

CHARLIE_F1 = ("(and (= (birth_year charlie) 2005) (lives_with charlie bob) "
              "(parent bob charlie))")

CHARLIE_S2_DECLS = declarations(
    ("current year for calculation", "(declare-const current_year Int)"),
    ("age of a person in a given year", "(declare-fun age_in_year (Person Int) Int)"),
)

CHARLIE_F2 = "(<= (age_in_year charlie 2023) 18)"

CHARLIE_P2 = "(forall ((x Person) (y Int)) (<= (age_in_year x y) (- y (birth_year x))))"

CHARLIE_S3_DECLS = declarations(
    ("whether a person qualifies for benefits", "(declare-fun qualifies (Person) Bool)"),
)

CHARLIE_F3 = ("(forall ((x Person)) (=> (and (<= (age_in_year x 2023) 18) "
              "(exists ((y Person)) (and (lives_with x y) (parent y x)))) (qualifies x)))")

CHARLIE_P3 = ("(forall ((x Person)) (=> (and (< (age_in_year x 2023) 21) "
              "(exists ((y Person)) (and (lives_with x y) (parent y x)))) (qualifies x)))")


def charlie_steps_1_to_3(attempt: int = 0) -> dict:
    a = f"a{attempt}"
    return {
        f"autoformalizer/{a}/s1/r1": CHARLIE_S1_DECLS,
        f"autoformalizer/{a}/s1/r2": assertions(
            ("Charlie was born in 2005 and lives with his parent Bob", CHARLIE_F1),
        ),
        f"premise_generator/{a}/s1/r1": candidates(
            candidate(
                "Charlie was born in 2005 and lives with his parent Bob",
                "context",
                [("stated in the conversation context", CHARLIE_F1, False)],
                span=[0, 44],
            ),
        ),
        f"premise_judge/{a}/s1/r1": verdicts(
            ("grounded_contextual", True, "restates the context sentence"),
        ),
        f"autoformalizer/{a}/s2/r1": CHARLIE_S2_DECLS,
        f"autoformalizer/{a}/s2/r2": assertions(
            ("Charlie is at most 18 years old in 2023", CHARLIE_F2),
        ),
        f"premise_generator/{a}/s2/r1": candidates(
            candidate(
                "Someone's age is at most the current year minus their birth year",
                "commonsense",
                [("age never exceeds elapsed years since birth", CHARLIE_P2, False)],
            ),
        ),
        f"premise_judge/{a}/s2/r1": verdicts(
            ("acceptable_commonsense", True, "ages cannot exceed elapsed years"),
        ),
        f"autoformalizer/{a}/s3/r1": CHARLIE_S3_DECLS,
        f"autoformalizer/{a}/s3/r2": assertions(
            ("a child 18 or younger living with a parent qualifies", CHARLIE_F3),
        ),
        f"premise_generator/{a}/s3/r1": candidates(
            candidate(
                "A child qualifies for benefits if they are under 21 and live with their parent",
                "context",
                [("benefits rule from the source document", CHARLIE_P3, False)],
                span=[0, 80],
            ),
        ),
        f"premise_judge/{a}/s3/r1": verdicts(
            ("grounded_contextual", True, "quoted from the source document"),
        ),
    }


def gen_charlie():
    responses = charlie_steps_1_to_3()
    responses["autoformalizer/a0/s4/r1"] = assertions(
        ("therefore Charlie qualifies for benefits in 2023", "(qualifies charlie)"),
    )
    write_fixture("charlie", responses)

    # mutation: negated conclusion -> contradiction at step 4
    neg = charlie_steps_1_to_3()
    neg["autoformalizer/a0/s4/r1"] = assertions(
        ("Charlie does not qualify for benefits in 2023", "(not (qualifies charlie))"),
    )
    write_fixture("charlie-neg4", neg)

    # mutation: premise generator finds nothing at step 3 -> ungrounded
    ung = charlie_steps_1_to_3()
    ung["premise_generator/a0/s3/r1"] = candidates()
    del ung["premise_judge/a0/s3/r1"]
    ung["autoformalizer/a0/s4/r1"] = assertions(
        ("therefore Charlie qualifies for benefits in 2023", "(qualifies charlie)"),
    )
    write_fixture("charlie-ungrounded3", ung)

    neg_case = dict(CHARLIE_CASE, case_id="charlie-neg4",
                    cot=CHARLIE_STEPS[:3] + ["Charlie does not qualify for benefits in 2023"],
                    answer="No")
    ung_case = dict(CHARLIE_CASE, case_id="charlie-ungrounded3")
    write_cases("charlie", [CHARLIE_CASE])
    write_cases("charlie_mutations", [neg_case, ung_case])


# --------------------------------------------------------------------------
# ProofWriter: the mouse/tiger/rabbit rulebase, ungrounded closed-world claim
# --------------------------------------------------------------------------

MOUSE_DOCUMENT = (
    "The dog does not eat the rabbit. The mouse eats the tiger. The mouse is "
    "green. The rabbit does not chase the tiger. The rabbit eats the dog. The "
    "rabbit is young. The tiger is green. If something visits the mouse then "
    "the mouse is big. If something eats the tiger then the tiger visits the "
    "mouse. If the dog is young and the dog does not visit the mouse then the "
    "mouse does not visit the rabbit. If something is green and it chases the "
    "rabbit then the rabbit does not eat the mouse. If something is green then "
    "it visits the dog. If something visits the rabbit and the rabbit is young "
    "then it is round. If something is round and it visits the dog then it "
    "chases the tiger. If something is big then it visits the rabbit."
)

MOUSE_STEPS = [
    "The mouse has three direct properties: the mouse eats the tiger, the mouse is green, and there is a rule stating that if something visits the mouse then the mouse is big",
    "Since the mouse eats the tiger and no other eating relationships exist except this explicitly stated, and there is a rule stating that if something eats the tiger then the tiger visits the mouse, we can conclude that the tiger visits the mouse",
    "Since the tiger visits the mouse, and there is a rule stating that if something visits the mouse then the mouse is big, we can conclude that the mouse is big",
    "Since the mouse is big, and there is a rule stating that if something is big then it visits the rabbit, we can conclude that the mouse visits the rabbit",
    "The statement 'The mouse visits the rabbit' is true based on the logical chain of the mouse being big and the rule about big things visiting the rabbit",
]

MOUSE_REVISED_STEPS = [
    "From the reference information, we know three direct facts about the mouse: the mouse eats the tiger, the mouse is green, and there is a rule stating that if something visits the mouse then the mouse is big.",
    "According to the reference information rule 'If something eats the tiger then the tiger visits the mouse', and since we know the mouse eats the tiger, we can conclude that the tiger visits the mouse.",
    "Since we have established that the tiger visits the mouse, and we know from the reference information that 'If something visits the mouse then the mouse is big', we can conclude that the mouse is big.",
    "The reference information states 'If something is big then it visits the rabbit'. Since we have established that the mouse is big, applying this rule means that the mouse visits the rabbit.",
    "Therefore, based on the logical chain starting from the mouse eating the tiger, leading to the tiger visiting the mouse, making the mouse big, and ending with the rule about big things visiting the rabbit, we can conclude that the statement 'The mouse visits the rabbit' is true.",
]

MOUSE_CASE = {
    "case_id": "proofwriter-mouse",
    "question": "Based on the above information, is the following statement true, false, or unknown? The mouse visits the rabbit.",
    "document": MOUSE_DOCUMENT,
    "cot": MOUSE_STEPS,
    "answer": "True",
    "gold": "True",
}

MOUSE_S1_DECLS = declarations(
    ("represents an animal entity", "(declare-sort Animal 0)"),
    ("constant representing the mouse", "(declare-const mouse Animal)"),
    ("constant representing the tiger", "(declare-const tiger Animal)"),
    ("true if one animal eats another", "(declare-fun animal_eats (Animal Animal) Bool)"),
    ("true if an animal is green", "(declare-fun animal_is_green (Animal) Bool)"),
    ("true if an animal is big", "(declare-fun animal_is_big (Animal) Bool)"),
    ("true if one animal visits another", "(declare-fun animal_visits (Animal Animal) Bool)"),
)

VISIT_RULE = "(forall ((a Animal)) (=> (animal_visits a mouse) (animal_is_big mouse)))"
EATS_RULE = "(forall ((a Animal)) (=> (animal_eats a tiger) (animal_visits tiger mouse)))"
BIG_RULE = "(forall ((a Animal)) (=> (animal_is_big a) (animal_visits a rabbit)))"
CLOSED_WORLD = ("(forall ((a Animal) (b Animal)) (= (animal_eats a b) "
                "(and (= a mouse) (= b tiger))))")


def mouse_step1(attempt: int) -> dict:
    a = f"a{attempt}"
    return {
        f"autoformalizer/{a}/s1/r1": MOUSE_S1_DECLS,
        f"autoformalizer/{a}/s1/r2": assertions(
            ("the mouse eats the tiger", "(animal_eats mouse tiger)"),
            ("the mouse is green", "(animal_is_green mouse)"),
            ("if something visits the mouse then the mouse is big", VISIT_RULE),
        ),
        f"premise_generator/{a}/s1/r1": candidates(
            candidate("The mouse is green", "context",
                      [("stated in the rulebase", "(animal_is_green mouse)", False)],
                      span=[63, 82]),
            candidate("The mouse and tiger are different animals", "commonsense",
                      [("distinct named animals", "(not (= mouse tiger))", False)]),
            candidate("The mouse eats the tiger", "context",
                      [("stated in the rulebase", "(animal_eats mouse tiger)", False)],
                      span=[32, 57]),
            candidate("If something visits the mouse then the mouse is big", "context",
                      [("rule from the rulebase", VISIT_RULE, False)],
                      span=[160, 213]),
        ),
        f"premise_judge/{a}/s1/r1": verdicts(
            ("grounded_contextual", True, "sentence appears in the rulebase"),
        ),
        f"premise_judge/{a}/s1/r2": verdicts(
            ("acceptable_commonsense", True, "named animals are distinct individuals"),
        ),
        f"premise_judge/{a}/s1/r3": verdicts(
            ("grounded_contextual", True, "sentence appears in the rulebase"),
        ),
        f"premise_judge/{a}/s1/r4": verdicts(
            ("grounded_contextual", True, "rule appears in the rulebase"),
        ),
    }


def gen_mouse():
    responses = mouse_step1(0)
    responses.update({
        "autoformalizer/a0/s2/r1": assertions(
            ("the mouse eats the tiger", "(animal_eats mouse tiger)"),
            ("no other eating relationships exist except this explicitly stated", CLOSED_WORLD),
            ("if the eats-tiger rule applies then the tiger visits the mouse",
             f"(=> (and (animal_eats mouse tiger) {EATS_RULE}) (animal_visits tiger mouse))"),
        ),
        "premise_generator/a0/s2/r1": candidates(
            candidate("If something eats the tiger then the tiger visits the mouse",
                      "context",
                      [("rule from the rulebase", EATS_RULE, False)],
                      span=[214, 275]),
        ),
        "premise_judge/a0/s2/r1": verdicts(
            ("grounded_contextual", True, "rule appears in the rulebase"),
        ),
        "autoformalizer/a0/s3/r1": assertions(
            ("if the tiger visits the mouse and the visiting rule holds then the mouse is big",
             f"(=> (and (animal_visits tiger mouse) {VISIT_RULE}) (animal_is_big mouse))"),
        ),
        "autoformalizer/a0/s4/r1": declarations(
            ("constant representing the rabbit", "(declare-const rabbit Animal)"),
        ),
        "autoformalizer/a0/s4/r2": assertions(
            ("if the mouse is big and the big rule holds then the mouse visits the rabbit",
             f"(=> (and (animal_is_big mouse) {BIG_RULE}) (animal_visits mouse rabbit))"),
        ),
        "autoformalizer/a0/s5/r1": assertions(
            ("the chain rule still holds",
             f"(=> (and (animal_is_big mouse) {BIG_RULE}) (animal_visits mouse rabbit))"),
            ("the mouse visits the rabbit", "(animal_visits mouse rabbit)"),
        ),
        "premise_generator/a0/s5/r1": candidates(
            candidate("If something is big then it visits the rabbit", "context",
                      [("rule from the rulebase", BIG_RULE, False)],
                      span=[769, 816]),
        ),
        "premise_judge/a0/s5/r1": verdicts(
            ("grounded_contextual", True, "rule appears in the rulebase"),
        ),
        "reflector/a0/s0/r1": revision(MOUSE_REVISED_STEPS, "True"),
    })
    # post-reflection attempt: every step grounded in explicit rules
    responses.update(mouse_step1(1))
    responses.update({
        "autoformalizer/a1/s2/r1": assertions(
            ("if something eats the tiger then the tiger visits the mouse", EATS_RULE),
            ("since the mouse eats the tiger the tiger visits the mouse",
             "(=> (animal_eats mouse tiger) (animal_visits tiger mouse))"),
        ),
        "premise_generator/a1/s2/r1": candidates(
            candidate("If something eats the tiger then the tiger visits the mouse",
                      "context",
                      [("rule from the rulebase", EATS_RULE, False)],
                      span=[214, 275]),
        ),
        "premise_judge/a1/s2/r1": verdicts(
            ("grounded_contextual", True, "rule appears in the rulebase"),
        ),
        "autoformalizer/a1/s3/r1": assertions(
            ("if the tiger visits the mouse then the mouse is big",
             "(=> (animal_visits tiger mouse) (animal_is_big mouse))"),
        ),
        "autoformalizer/a1/s4/r1": declarations(
            ("constant representing the rabbit", "(declare-const rabbit Animal)"),
        ),
        "autoformalizer/a1/s4/r2": assertions(
            ("if something is big then it visits the rabbit", BIG_RULE),
            ("since the mouse is big it visits the rabbit",
             "(=> (animal_is_big mouse) (animal_visits mouse rabbit))"),
        ),
        "premise_generator/a1/s4/r1": candidates(
            candidate("If something is big then it visits the rabbit", "context",
                      [("rule from the rulebase", BIG_RULE, False)],
                      span=[769, 816]),
        ),
        "premise_judge/a1/s4/r1": verdicts(
            ("grounded_contextual", True, "rule appears in the rulebase"),
        ),
        "autoformalizer/a1/s5/r1": assertions(
            ("mouse eats tiger leads to tiger visiting mouse",
             "(=> (animal_eats mouse tiger) (animal_visits tiger mouse))"),
            ("tiger visiting mouse makes the mouse big",
             "(=> (animal_visits tiger mouse) (animal_is_big mouse))"),
            ("the mouse being big makes it visit the rabbit",
             "(=> (animal_is_big mouse) (animal_visits mouse rabbit))"),
            ("the mouse visits the rabbit", "(animal_visits mouse rabbit)"),
        ),
    })
    write_fixture("proofwriter-mouse", responses)


# --------------------------------------------------------------------------
# BioASQ: connexin hemichannels, contradiction on molecular weight
# --------------------------------------------------------------------------

BIOASQ_CONTEXT = (
    "The permeability of Cx43 channels to small molecules and macromolecules "
    "makes them highly attractive targets for delivering drugs directly into "
    "the cytoplasm. Cancer cells overexpressing Cx43 may be more permeable and "
    "sensitive to chemotherapeutics. In this context, certain channels lead to "
    "transitory plasma membrane permeability changes, such as pannexin, "
    "connexin hemichannels that are channels in membranes that pass molecules, "
    "TRPV1-4 and P2X7, which allow for the non-selective passage of molecules "
    "up to 1,000 Da. Gap junction channels, composed of connexin proteins, "
    "provide a mechanism for direct transfer of small molecules across "
    "membranes, and recent evidence suggests that the transfer of larger, "
    "polymer-like molecules such as microRNAs may be possible. Collectively, "
    "these results reveal that polymeric macromolecules can be delivered to "
    "cells via gap junctions, suggesting that the gap junction route can be "
    "used for the delivery of macro polymeric therapeutic molecules, which "
    "provides evidence for drug delivery potential."
)

BIOASQ_STEPS = [
    "Connexin hemichannels are channels in cell membranes that can allow molecules to pass through and are part of gap junction channels.",
    "Connexin hemichannels allow for the non-selective passage of molecules up to 1,000 Da.",
    "The gap junction route can transport macro polymer therapeutic molecules, which is evidence for drug delivery potential.",
    "Therefore, Connexin hemi channels are also permeable to therapeutic macromolecules, makes them highly attractive targets for delivering drugs.",
]

BIOASQ_REVISED_STEPS = [
    "Connexin hemichannels are channels in cell membranes that can allow molecules to pass through and are part of gap junction channels.",
    "Connexin hemichannels allow for the non-selective passage of molecules up to 1,000 Da.",
    "Cx43 channels are permeable to both small molecules and macromolecules, makes them highly attractive targets for delivering drugs.",
    "Since Cx43 is a connexin hemi channel and supports drug delivery, we infer that connexin hemi channels can be used for drug delivery.",
]

BIOASQ_CASE = {
    "case_id": "bioasq-connexin",
    "question": "Can Connexin hemi channels be used for drug delivery?",
    "context": BIOASQ_CONTEXT,
    "cot": BIOASQ_STEPS,
    "answer": "Yes",
    "gold": "Yes",
}

BIOASQ_S1_DECLS = declarations(
    ("represents a molecule", "(declare-sort Molecule 0)"),
    ("represents a channel", "(declare-sort Channel 0)"),
    ("whether a channel is a connexin hemichannel",
     "(declare-fun is_connexin_hemichannel (Channel) Bool)"),
    ("whether a channel is a gap junction channel",
     "(declare-fun is_gap_junction_channel (Channel) Bool)"),
    ("whether a channel is located in a cell membrane",
     "(declare-fun is_in_cell_membrane (Channel) Bool)"),
    ("whether a molecule can enter through a channel",
     "(declare-fun can_enter_via_channel (Molecule Channel) Bool)"),
    ("whether one channel is part of another channel",
     "(declare-fun part_of (Channel Channel) Bool)"),
)

HEMI_MEMBRANE_RULE = (
    "(forall ((c Channel)) (=> (is_connexin_hemichannel c) "
    "(and (is_in_cell_membrane c) (exists ((m Molecule)) (can_enter_via_channel m c)))))"
)
HEMI_PARTOF_RULE = (
    "(forall ((h Channel)) (=> (is_connexin_hemichannel h) "
    "(exists ((g Channel)) (and (is_gap_junction_channel g) (part_of h g)))))"
)
WEIGHT_LIMIT_RULE = (
    "(forall ((m Molecule) (c Channel)) (=> (and (is_connexin_hemichannel c) "
    "(can_enter_via_channel m c)) (<= (molecular_weight m) 1000.0)))"
)
GAP_DELIVERY_RULE = (
    "(forall ((c Channel) (m Molecule)) (=> (and (is_gap_junction_channel c) "
    "(is_macro_polymer_therapeutic m)) (and (can_enter_via_channel m c) "
    "(=> (can_enter_via_channel m c) (has_drug_delivery_potential c)))))"
)
MACRO_WEIGHT_RULE = (
    "(forall ((m Molecule)) (=> (is_macro_polymer_therapeutic m) "
    "(> (molecular_weight m) 1000.0)))"
)


def bioasq_steps_1_2(attempt: int) -> dict:
    a = f"a{attempt}"
    return {
        f"autoformalizer/{a}/s1/r1": BIOASQ_S1_DECLS,
        f"autoformalizer/{a}/s1/r2": assertions(
            ("connexin hemichannels are membrane channels that pass molecules",
             HEMI_MEMBRANE_RULE),
            ("connexin hemichannels are part of gap junction channels",
             HEMI_PARTOF_RULE),
        ),
        f"premise_generator/{a}/s1/r1": candidates(
            candidate(
                "Connexin hemichannels are channels in membranes that pass molecules",
                "context",
                [("from the context passage", HEMI_MEMBRANE_RULE, False)],
                span=[330, 404],
            ),
            candidate(
                "Connexin hemichannels are part of gap junction channels",
                "context",
                [("gap junction channels are composed of connexin proteins",
                  HEMI_PARTOF_RULE, False)],
                span=[489, 560],
            ),
        ),
        f"premise_judge/{a}/s1/r1": verdicts(
            ("grounded_contextual", True, "stated in the context passage"),
        ),
        f"premise_judge/{a}/s1/r2": verdicts(
            ("grounded_contextual", True, "follows from the composition sentence"),
        ),
        f"autoformalizer/{a}/s2/r1": declarations(
            ("molecular weight of a molecule in daltons",
             "(declare-fun molecular_weight (Molecule) Real)"),
        ),
        f"autoformalizer/{a}/s2/r2": assertions(
            ("molecules entering a connexin hemichannel weigh at most 1000 Da",
             WEIGHT_LIMIT_RULE),
        ),
        f"premise_generator/{a}/s2/r1": candidates(
            candidate(
                "Connexin hemichannels allow for the non-selective passage of molecules up to 1,000 Da",
                "context",
                [("weight limit from the context passage", WEIGHT_LIMIT_RULE, False)],
                span=[405, 488],
            ),
        ),
        f"premise_judge/{a}/s2/r1": verdicts(
            ("grounded_contextual", True, "weight limit stated in the context"),
        ),
    }


def gen_bioasq():
    responses = bioasq_steps_1_2(0)
    responses.update({
        "autoformalizer/a0/s3/r1": declarations(
            ("whether a molecule is a macro polymer therapeutic molecule",
             "(declare-fun is_macro_polymer_therapeutic (Molecule) Bool)"),
            ("whether a channel has potential for drug delivery",
             "(declare-fun has_drug_delivery_potential (Channel) Bool)"),
        ),
        "autoformalizer/a0/s3/r2": assertions(
            ("gap junction channels transport macro polymer therapeutics, evidencing delivery potential",
             GAP_DELIVERY_RULE),
        ),
        "premise_generator/a0/s3/r1": candidates(
            candidate(
                "The ability to deliver large polymeric therapeutic macromolecules via the gap junction route provides evidence for drug delivery potential",
                "context",
                [("delivery evidence from the context passage", GAP_DELIVERY_RULE, False)],
                span=[700, 1020],
            ),
            candidate(
                "Any macro polymeric therapeutic molecule has a molecular weight greater than 1,000 Da",
                "commonsense",
                [("polymeric therapeutics exceed 1000 Da", MACRO_WEIGHT_RULE, False)],
            ),
        ),
        "premise_judge/a0/s3/r1": verdicts(
            ("grounded_contextual", True, "stated in the closing sentence"),
        ),
        "premise_judge/a0/s3/r2": verdicts(
            ("acceptable_commonsense", True, "macromolecules exceed the 1 kDa cutoff"),
        ),
        "autoformalizer/a0/s4/r1": assertions(
            ("some therapeutic macromolecule passes a connexin hemichannel",
             "(exists ((c Channel) (m Molecule)) (and (is_connexin_hemichannel c) "
             "(is_macro_polymer_therapeutic m) (can_enter_via_channel m c)))"),
            ("permeability to therapeutics makes hemichannels delivery targets",
             "(forall ((c Channel) (m Molecule)) (=> (and (is_connexin_hemichannel c) "
             "(is_macro_polymer_therapeutic m) (can_enter_via_channel m c)) "
             "(has_drug_delivery_potential c)))"),
        ),
        "reflector/a0/s0/r1": revision(BIOASQ_REVISED_STEPS, "Yes"),
    })
    # post-reflection attempt
    responses.update(bioasq_steps_1_2(1))
    cx43_rule = (
        "(forall ((c Channel) (m Molecule)) (=> (and (is_cx43 c) "
        "(or (is_small_molecule m) (is_macromolecule m))) "
        "(and (can_enter_via_channel m c) (=> (can_enter_via_channel m c) "
        "(can_deliver_drug c)))))"
    )
    macro_rule = ("(forall ((m Molecule)) (=> (is_macromolecule m) "
                  "(> (molecular_weight m) 1000.0)))")
    small_rule = ("(forall ((m Molecule)) (=> (is_small_molecule m) "
                  "(<= (molecular_weight m) 1000.0)))")
    subtype_rule = "(forall ((c Channel)) (=> (is_cx43 c) (is_connexin_hemichannel c)))"
    responses.update({
        "autoformalizer/a1/s3/r1": declarations(
            ("whether a channel is specifically connexin 43 (Cx43)",
             "(declare-fun is_cx43 (Channel) Bool)"),
            ("whether a molecule is a small molecule",
             "(declare-fun is_small_molecule (Molecule) Bool)"),
            ("whether a molecule is a macromolecule",
             "(declare-fun is_macromolecule (Molecule) Bool)"),
            ("whether a channel can deliver drugs",
             "(declare-fun can_deliver_drug (Channel) Bool)"),
        ),
        "autoformalizer/a1/s3/r2": assertions(
            ("Cx43 channels pass small molecules and macromolecules, enabling drug delivery",
             cx43_rule),
        ),
        "premise_generator/a1/s3/r1": candidates(
            candidate(
                "The permeability of Cx43 channels to small molecules and macromolecules makes them highly attractive targets for delivering drugs",
                "context",
                [("opening sentence of the context", cx43_rule, False)],
                span=[0, 170],
            ),
            candidate(
                "Any macromolecule has a molecular weight greater than 1,000 Da",
                "commonsense",
                [("macromolecules exceed 1000 Da", macro_rule, False)],
            ),
            candidate(
                "Any small molecule has a molecular weight of at most 1,000 Da",
                "commonsense",
                [("small molecules stay under 1000 Da", small_rule, False)],
            ),
        ),
        "premise_judge/a1/s3/r1": verdicts(
            ("grounded_contextual", True, "opening sentence of the context"),
        ),
        "premise_judge/a1/s3/r2": verdicts(
            ("acceptable_commonsense", True, "standard molecular weight cutoff"),
        ),
        "premise_judge/a1/s3/r3": verdicts(
            ("acceptable_commonsense", True, "standard molecular weight cutoff"),
        ),
        "autoformalizer/a1/s4/r1": assertions(
            ("Cx43 is a type of connexin hemichannel", subtype_rule),
            ("some Cx43 channel supports drug delivery",
             "(exists ((c Channel)) (and (is_cx43 c) (can_deliver_drug c)))"),
            ("a delivering Cx43 channel means some connexin hemichannel delivers drugs",
             "(forall ((c Channel)) (=> (and (is_cx43 c) (can_deliver_drug c)) "
             "(exists ((h Channel)) (and (is_connexin_hemichannel h) (can_deliver_drug h)))))"),
        ),
        "premise_generator/a1/s4/r1": candidates(
            candidate(
                "Cx43 channels are a type of connexin hemichannel",
                "commonsense",
                [("Cx43 is a connexin isoform forming hemichannels", subtype_rule, False)],
            ),
            candidate(
                "The context presents Cx43 channels as attractive drug delivery targets, so such a channel exists and can deliver drugs",
                "context",
                [("a specific Cx43 channel discussed in the context",
                  "(declare-const cx43_channel Channel)", True),
                 ("the discussed Cx43 channel delivers drugs",
                  "(and (is_cx43 cx43_channel) (can_deliver_drug cx43_channel))", False)],
                span=[0, 170],
            ),
        ),
        "premise_judge/a1/s4/r1": verdicts(
            ("acceptable_commonsense", True, "Cx43 forms connexin hemichannels"),
        ),
        "premise_judge/a1/s4/r2": verdicts(
            ("grounded_contextual", True, "the opening sentence discusses Cx43 delivery"),
        ),
    })
    write_fixture("bioasq-connexin", responses)


# --------------------------------------------------------------------------
# SARA: statutory reasoning, untranslatable hedging step
# --------------------------------------------------------------------------

SARA_STEPS = [
    "Section 3306(c)(1) of the statute addresses agricultural labor",
    "The work performed by Bob for Alice is specifically agricultural labor",
    "The basic scope of Section 3306(c)(1) covers all agricultural labor",
    "While Alice is an American employer and there might be jurisdictional implications, the statute fragment does not provide information about geographical limitations",
    "Bob's employment falls under the basic scope of Section 3306(c)(1)",
]

SARA_REVISED_STEPS = [
    "Section 3306(c)(1) explicitly applies to agricultural labor as shown by the statute text 'agricultural labor'.",
    "Bob performed agricultural labor.",
    "Since Bob's work qualifies as agricultural labor, and Section 3306(c)(1) covers agricultural labor, Bob's employment falls under the basic scope of Section 3306(c)(1).",
]

SARA_CASE = {
    "case_id": "sara-3306",
    "question": "Determine whether the following statement is entailed under the statute: Section 3306(c)(1) applies to Alice employing Bob for the year 2017. Reply with either: Entailment, Contradiction.",
    "context": "Alice has paid $3200 to Bob for agricultural labor done from Feb 1st, 2017 to Sep 2nd, 2017. Alice is an American employer.",
    "document": "Section 3306(c)(1) applies to agricultural labor.",
    "cot": SARA_STEPS,
    "answer": "Entailment",
    "gold": "Entailment",
}

COVERAGE_RULE = ("(forall ((p Person)) (=> (performs_agricultural_labor p) "
                 "(covered_by_section_3306c1 p)))")


def gen_sara():
    responses = {
        "autoformalizer/a0/s1/r1": declarations(
            ("represents a section of statute", "(declare-sort StatuteSection 0)"),
            ("specific section 3306(c)(1)", "(declare-const section_3306c1 StatuteSection)"),
            ("whether a section deals with agricultural labor",
             "(declare-fun deals_with_agricultural_labor (StatuteSection) Bool)"),
        ),
        "autoformalizer/a0/s1/r2": assertions(
            ("section 3306(c)(1) addresses agricultural labor",
             "(deals_with_agricultural_labor section_3306c1)"),
        ),
        "premise_generator/a0/s1/r1": candidates(
            candidate("Section 3306(c)(1) applies to agricultural labor", "context",
                      [("the statute text",
                        "(deals_with_agricultural_labor section_3306c1)", False)],
                      span=[0, 50]),
        ),
        "premise_judge/a0/s1/r1": verdicts(
            ("grounded_contextual", True, "the statute sentence itself"),
        ),
        "autoformalizer/a0/s2/r1": declarations(
            ("represents a person", "(declare-sort Person 0)"),
            ("represents a type of labor", "(declare-sort LaborType 0)"),
            ("represents Alice", "(declare-const alice Person)"),
            ("represents Bob", "(declare-const bob Person)"),
            ("specific labor type: agricultural labor",
             "(declare-const agricultural_labor LaborType)"),
            ("whether a person performs agricultural labor",
             "(declare-fun performs_agricultural_labor (Person) Bool)"),
            ("whether a person employs another person",
             "(declare-fun employs (Person Person) Bool)"),
            ("payment for labor: employer worker laborType amount startDate endDate",
             "(declare-fun paid (Person Person LaborType Int Int Int) Bool)"),
        ),
        "autoformalizer/a0/s2/r2": assertions(
            ("Bob performs agricultural labor for Alice",
             "(and (performs_agricultural_labor bob) (employs alice bob))"),
        ),
        "premise_generator/a0/s2/r1": candidates(
            candidate(
                "Alice employed Bob to perform agricultural labor from February 1st to September 2nd, 2017, as evidenced by Alice's payment of $3200 for this work",
                "context",
                [("payment and employment facts, dates encoded as YYYYMMDD",
                  "(and (employs alice bob) (performs_agricultural_labor bob) "
                  "(paid alice bob agricultural_labor 3200 20170201 20170902))", False)],
                span=[0, 93],
            ),
        ),
        "premise_judge/a0/s2/r1": verdicts(
            ("grounded_contextual", True, "stated in the case description"),
        ),
        "autoformalizer/a0/s3/r1": declarations(
            ("whether a person's work is covered by section 3306(c)(1)",
             "(declare-fun covered_by_section_3306c1 (Person) Bool)"),
        ),
        "autoformalizer/a0/s3/r2": assertions(
            ("section 3306(c)(1) addresses agricultural labor",
             "(deals_with_agricultural_labor section_3306c1)"),
            ("anyone performing agricultural labor is covered by section 3306(c)(1)",
             COVERAGE_RULE),
        ),
        "premise_generator/a0/s3/r1": candidates(
            candidate(
                "Anyone performing agricultural labor is covered by Section 3306(c)(1)",
                "commonsense",
                [("a section addressing a labor category covers those performing it",
                  COVERAGE_RULE, False)],
            ),
        ),
        "premise_judge/a0/s3/r1": verdicts(
            ("acceptable_commonsense", True, "scope sections cover the labor they address"),
        ),
        "autoformalizer/a0/s4/r1": refused(
            "the phrase 'there might be jurisdictional implications' expresses a "
            "possibility rather than a definitive statement and cannot be rendered "
            "in the supported fragment"
        ),
        "autoformalizer/a0/s5/r1": assertions(
            ("Bob's employment falls under section 3306(c)(1)",
             "(covered_by_section_3306c1 bob)"),
        ),
        "reflector/a0/s0/r1": revision(SARA_REVISED_STEPS, "Entailment"),
    }
    addresses_fact = "(section_addresses_labor section_3306c1 labor_agricultural)"
    covered_rule = ("(forall ((p Person)) (=> (performed_labor p labor_agricultural) "
                    "(employment_covered p section_3306c1)))")
    responses.update({
        "autoformalizer/a1/s1/r1": declarations(
            ("represents a statute section", "(declare-sort StatuteSection 0)"),
            ("represents a type of labor", "(declare-sort LaborType 0)"),
            ("represents a person", "(declare-sort Person 0)"),
            ("specific statute section 3306(c)(1)",
             "(declare-const section_3306c1 StatuteSection)"),
            ("specific labor type: agricultural labor",
             "(declare-const labor_agricultural LaborType)"),
            ("whether a section addresses a labor type",
             "(declare-fun section_addresses_labor (StatuteSection LaborType) Bool)"),
            ("whether a person performed a labor type",
             "(declare-fun performed_labor (Person LaborType) Bool)"),
            ("whether a person's employment is covered by a statute section",
             "(declare-fun employment_covered (Person StatuteSection) Bool)"),
        ),
        "autoformalizer/a1/s1/r2": assertions(
            ("section 3306(c)(1) addresses agricultural labor", addresses_fact),
            ("anyone who performed agricultural labor is covered", covered_rule),
        ),
        "premise_generator/a1/s1/r1": candidates(
            candidate("Section 3306(c)(1) explicitly applies to agricultural labor",
                      "context",
                      [("the statute text", addresses_fact, False)],
                      span=[0, 50]),
            candidate("Anyone performing agricultural labor is covered by Section 3306(c)(1)",
                      "commonsense",
                      [("scope sections cover the labor they address", covered_rule, False)]),
        ),
        "premise_judge/a1/s1/r1": verdicts(
            ("grounded_contextual", True, "the statute sentence itself"),
        ),
        "premise_judge/a1/s1/r2": verdicts(
            ("acceptable_commonsense", True, "scope sections cover the labor they address"),
        ),
        "autoformalizer/a1/s2/r1": declarations(
            ("represents Bob", "(declare-const bob Person)"),
            ("represents Alice", "(declare-const alice Person)"),
            ("payment for labor: employer worker laborType amount startDate endDate",
             "(declare-fun paid (Person Person LaborType Int Int Int) Bool)"),
        ),
        "autoformalizer/a1/s2/r2": assertions(
            ("Bob performed agricultural labor",
             "(performed_labor bob labor_agricultural)"),
        ),
        "premise_generator/a1/s2/r1": candidates(
            candidate(
                "Alice paid Bob $3200 for agricultural labor done from Feb 1st, 2017 to Sep 2nd, 2017",
                "context",
                [("payment and labor facts, dates encoded as YYYYMMDD",
                  "(and (performed_labor bob labor_agricultural) "
                  "(paid alice bob labor_agricultural 3200 20170201 20170902))", False)],
                span=[0, 93],
            ),
        ),
        "premise_judge/a1/s2/r1": verdicts(
            ("grounded_contextual", True, "stated in the case description"),
        ),
        "autoformalizer/a1/s3/r1": assertions(
            ("Bob performing agricultural labor under the coverage rule means he is covered",
             f"(=> (and (performed_labor bob labor_agricultural) {covered_rule}) "
             "(employment_covered bob section_3306c1))"),
        ),
    })
    write_fixture("sara-3306", responses)
    write_cases("appendix", [MOUSE_CASE, BIOASQ_CASE, SARA_CASE])


def gen_gold():
    gold = {c["case_id"]: c["gold"] for c in
            [CHARLIE_CASE, MOUSE_CASE, BIOASQ_CASE, SARA_CASE]}
    gold["charlie-neg4"] = "Yes"
    gold["charlie-ungrounded3"] = "Yes"
    (HERE / "gold.json").write_text(json.dumps(gold, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    gen_charlie()
    gen_mouse()
    gen_bioasq()
    gen_sara()
    gen_gold()
    print(f"fixtures written under {HERE}")
