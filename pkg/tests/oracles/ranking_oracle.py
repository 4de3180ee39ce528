"""Brute-force scores for the T1 toy corpus, from the hand-counted tables only.

Nothing here imports mathmoi: the term frequencies and complexities below are
copied from T1_WORKSHEET.md, and every score is evaluated straight from its
defining formula.  Run as a script to print the full table.
"""

import math

K = 1.2
B = 0.95

X = "mi:x"
Y = "mi:y"
F = "mi:f"
X_PLUS_1 = "mrow(mi:x,mo:+,mn:1)"
X_SQUARED = "msup(mi:x,mn:2)"
X_PLUS_Y = "mrow(mi:x,mo:+,mi:y)"
PAREN_X = "mrow(mo:\\(,mi:x,mo:\\))"
F_OF_X = "mrow(mi:f,mo:fa,mrow(mo:\\(,mi:x,mo:\\)))"

COMPLEXITY = {X: 1, Y: 1, F: 1, X_PLUS_1: 2, X_SQUARED: 2, X_PLUS_Y: 2, PAREN_X: 2, F_OF_X: 3}

TF = {
    "d1": {X: 2, X_PLUS_1: 1},
    "d2": {X: 1, X_SQUARED: 1, Y: 1},
    "d3": {X: 2, Y: 1, X_PLUS_Y: 1, F: 1, F_OF_X: 1, PAREN_X: 1},
}


def n_docs():
    return len(TF)


def df(t):
    return sum(1 for d in TF if t in TF[d])


def length(d):
    return sum(TF[d].values())


def avg_dl():
    return sum(length(d) for d in TF) / n_docs()


def avg_c():
    occ = [(COMPLEXITY[t], n) for d in TF for t, n in TF[d].items()]
    return sum(c * n for c, n in occ) / sum(n for _, n in occ)


def idf(t):
    return math.log((n_docs() - df(t) + 0.5) / (df(t) + 0.5))


def itf(t, d):
    tf = TF[d][t]
    return math.log((length(d) - tf + 0.5) / (tf + 0.5))


def bm25(t, d):
    tf = TF[d][t]
    return (K + 1) * idf(t) * tf / (tf + K * (1 - B + B * length(d) / avg_dl()))


def max_tf_same_complexity(t, d):
    return max(n for u, n in TF[d].items() if COMPLEXITY[u] == COMPLEXITY[t])


def s(t, d):
    tf = TF[d][t]
    denom = max_tf_same_complexity(t, d) + K * (1 - B + B * avg_dl() / (length(d) * avg_c()))
    return (K + 1) * idf(t) * itf(t, d) * tf / denom


def tfidf(t, d):
    return TF[d][t] / length(d) * idf(t)


def mbm25(t, docs=None):
    docs = sorted(docs or TF)
    best = max(s(t, d) for d in docs if t in TF[d])
    best_doc = min(d for d in docs if t in TF[d] and s(t, d) == best)
    return best, best_doc


def pairs():
    return [(t, d) for d in sorted(TF) for t in sorted(TF[d])]


if __name__ == "__main__":
    print(f"N={n_docs()} avgDL={avg_dl():.12f} avgC={avg_c():.12f}")
    for t in sorted(COMPLEXITY):
        print(f"{t:45s} df={df(t)} idf={idf(t): .12f} mBM25={mbm25(t)[0]: .12f} ({mbm25(t)[1]})")
    for t, d in pairs():
        print(f"{d} {t:45s} tf={TF[d][t]} itf={itf(t, d): .12f} bm25={bm25(t, d): .12f} "
              f"s={s(t, d): .12f} tfidf={tfidf(t, d): .12f}")
