"""Seeded synthetic corpora in the JSON-lines document format."""

from __future__ import annotations

import json
import random

from mathmoi.pmml import MathTree, to_xml

from strategies import random_tree

WORDS = ("zeta function riemann eigenvalue matrix operator polynomial orthogonal jacobi "
         "energy mass relativity integral series convergence prime number theorem bound "
         "hilbert space spectrum kernel differential equation boundary value").split()


def synthetic_records(n_docs: int, formulae_per_doc: int, seed: int = 0, max_depth: int = 6) -> list[dict]:
    rng = random.Random(seed)
    out = []
    for i in range(n_docs):
        formulae = []
        for _ in range(formulae_per_doc):
            root = random_tree(rng, max_depth, adversarial=False, max_children=4, leaf_bias=0.3)
            formulae.append(to_xml(MathTree(root)))
        text = " ".join(rng.choice(WORDS) for _ in range(rng.randint(5, 30)))
        out.append({"id": f"doc{i:06d}", "text": text, "formulae": formulae})
    return out


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
