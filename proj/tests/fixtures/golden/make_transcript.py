# Copyright 2026 The instructgen Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the hand-scripted mock transcript for the golden pipeline run.

Every keyword stage gets one fixed reply. Generation and filtering replies
are scripted for every job the 12-keyword pool can produce, so the run never
depends on which jobs the sampler picks. The filter outcome of each job is
chosen from a small menu keyed on a CRC of the job key and written to
expected_outcomes.json next to the transcript.

Usage: python3 make_transcript.py  (run from this directory)
"""

import itertools
import json
import zlib

SEED = "coupon rate, par value, maturity, yield to maturity, bond price, discount rate"
EXPAND = {
    "expand/1": "Prerequisite Concepts: present value\nAdvanced Concepts: modified duration",
    "expand/2": "Prerequisite Concepts: interest rate\nAdvanced Concepts: convexity",
}
RETRIEVE = "yield curve, credit spread, Bond Price"

KEYWORDS = sorted([
    "coupon_rate", "par_value", "maturity", "yield_to_maturity", "bond_price", "discount_rate",
    "present_value", "modified_duration", "interest_rate", "convexity", "yield_curve", "credit_spread",
])
LEVELS = ["Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"]
RELATIONAL = ["Understand", "Apply", "Analyze", "Evaluate"]

SINGLE_TEMPLATES = {
    "Remember": "Define the term {a} as used in bond markets.",
    "Understand": "Explain how {a} affects the price of a plain bond.",
    "Apply": "Calculate the {a} for a 5-year bond paying a 4% annual coupon.",
    "Analyze": "Compare {a} across two bonds with different maturities.",
    "Evaluate": "Assess whether {a} is a reliable guide for an investor.",
    "Create": "Design a short exercise that tests {a}.",
}
PAIR_TEMPLATES = {
    "Understand": "Explain the link between {a} and {b}.",
    "Apply": "Calculate the {b} implied by a given {a}.",
    "Analyze": "Analyze how {a} and {b} interact when rates rise.",
    "Evaluate": "Evaluate a claim that {a} matters more than {b}.",
}


def words(canonical):
    return canonical.replace("_", " ")


def jobs():
    for kw in KEYWORDS:
        for level in LEVELS:
            yield f"single/{kw}/{level}", SINGLE_TEMPLATES[level].format(a=words(kw))
    for a, b in itertools.combinations(KEYWORDS, 2):
        for level in RELATIONAL:
            yield f"pair/{a}/{b}/{level}", PAIR_TEMPLATES[level].format(a=words(a), b=words(b))


def reply(label):
    return f"Reason: Price and yield move in opposite directions.\nAnswer: {label}"


JUNK = "I am not sure how to answer this."

# (samples, kept, answer, consensus_fraction)
MENU = [
    ([reply("B")] * 5, True, "B", 1.0),
    ([reply("C"), reply("C"), reply("A"), reply("C"), JUNK], True, "C", 0.6),
    ([reply("A"), reply("D"), reply("A"), reply("D"), reply("B")], False, "A", 0.4),
    ([JUNK] * 5, False, None, 1.0),
    ([reply("D"), reply("D"), reply("D"), reply("D"), reply("A")], True, "D", 0.8),
    ([reply("A"), JUNK, reply("A"), reply("A"), JUNK], True, "A", 0.6),
    ([reply("B"), reply("C"), reply("D"), reply("A"), JUNK], False, "A", 0.2),
]


def record(tag, samples):
    return {"tag": tag, "prompt_hash": "", "prompt": "", "samples": samples, "attempts": 1, "ts": 0}


def main():
    lines = [record("seed/0", [SEED])]
    lines += [record(tag, [text]) for tag, text in EXPAND.items()]
    lines.append(record("retrieve/1", [RETRIEVE]))
    outcomes = {}
    for key, instruction in jobs():
        h = zlib.crc32(key.encode())
        # about one job in eleven comes back as an empty completion
        if h % 11 == 0:
            lines.append(record("gen/" + key, ['""']))
            outcomes[key] = {"generated": False}
            continue
        lines.append(record("gen/" + key, ["Question: " + instruction]))
        samples, kept, answer, fraction = MENU[h % len(MENU)]
        lines.append(record("filter/" + key, samples))
        outcomes[key] = {"generated": True, "instruction": instruction, "kept": kept, "answer": answer,
                         "consensus_fraction": fraction, "response": next(s for s in samples if
                                                                          answer is None or s == reply(answer))}
    with open("transcript.jsonl", "w", encoding="utf-8") as f:
        for r in lines:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    with open("expected_outcomes.json", "w", encoding="utf-8") as f:
        json.dump(outcomes, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
