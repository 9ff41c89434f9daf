#!/usr/bin/env python3
"""Regenerates tests/fixtures/records50.jsonl.

The fixture is a 50-record paired dataset with a deterministic mix of
axiom situations: records where RAG confirms a correct answer (A1),
keeps a wrong one (A2), fixes a wrong one (A3), breaks a correct one
(A4), and irrelevant-context records with unchanged answers (A5).
Logprobs are synthetic but valid (finite, non-positive, base e).
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "records50.jsonl"

CITIES = [
    "Paris", "Berlin", "Madrid", "Rome", "Lisbon", "Vienna", "Prague",
    "Warsaw", "Athens", "Dublin", "Oslo", "Helsinki", "Bern", "Brussels",
    "Amsterdam", "Copenhagen", "Stockholm", "Budapest", "Bucharest",
    "Sofia", "Zagreb", "Riga", "Vilnius", "Tallinn", "Ljubljana",
]
WRONG = [
    "Lyon", "Munich", "Barcelona", "Milan", "Porto", "Graz", "Brno",
    "Krakow", "Patras", "Cork", "Bergen", "Turku", "Geneva", "Antwerp",
    "Rotterdam", "Aarhus", "Gothenburg", "Debrecen", "Cluj", "Plovdiv",
    "Split", "Daugavpils", "Kaunas", "Tartu", "Maribor",
]


def response(rng, text, n_tokens=None):
    tokens = text.split()
    if n_tokens:
        tokens = (tokens * n_tokens)[:n_tokens]
    logprobs = [round(-rng.uniform(0.05, 1.5), 6) for _ in tokens]
    return {"text": text, "tokens": tokens, "logprobs": logprobs}


def bundle(rng, most_likely, sample_pool, b=5):
    samples = [response(rng, rng.choice(sample_pool)) for _ in range(b)]
    return {
        "most_likely": response(rng, most_likely),
        "samples": samples,
        "temperature": 1.0,
    }


def main():
    rng = random.Random(20240817)
    lines = [json.dumps({
        "schema_version": 1,
        "logprob_base": "e",
        "notes": "synthetic 50-record paired fixture",
    })]

    # cycle of scenarios: a1, a2, a3, a4, a5
    scenarios = (["a1"] * 14 + ["a2"] * 10 + ["a3"] * 10 + ["a4"] * 8 + ["a5"] * 8)
    assert len(scenarios) == 50

    for i, scenario in enumerate(scenarios):
        gold = CITIES[i % len(CITIES)]
        wrong = WRONG[i % len(WRONG)]
        question = f"What is the answer for item {i:02d}?"
        relevance = "irrelevant" if scenario == "a5" else "relevant"
        if scenario == "a1":
            r1, r2 = gold, gold
        elif scenario == "a2":
            r1, r2 = wrong, wrong
        elif scenario == "a3":
            r1, r2 = wrong, gold
        elif scenario == "a4":
            r1, r2 = gold, wrong
        else:  # a5: unchanged answer, irrelevant context
            r1 = r2 = gold if i % 2 == 0 else wrong

        pool1 = [r1, wrong if r1 == gold else gold, f"maybe {r1}"]
        pool2 = [r2, r2, f"maybe {r2}"] if relevance == "relevant" else pool1
        rec = {
            "id": f"q{i:03d}",
            "question": question,
            "gold_answers": [gold, gold.lower()],
            "context": {
                "doc_id": f"d{i:03d}",
                "text": (f"Background trivia unrelated to item {i:02d}."
                         if relevance == "irrelevant"
                         else f"The answer for item {i:02d} is {r2}."),
                "relevance": relevance,
            },
            "no_rag": bundle(rng, r1, pool1),
            "rag": bundle(rng, r2, pool2),
        }
        lines.append(json.dumps(rec))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} records to {OUT}")


if __name__ == "__main__":
    main()
