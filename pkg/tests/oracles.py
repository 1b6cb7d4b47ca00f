"""Independent reference implementations used only by the tests."""

import math


def tokens(text):
    out, cur = [], []
    for ch in text.lower():
        if ch.isalnum():
            cur.append(ch)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def brute_bm25(query, docs, k1=1.2, b=0.75):
    """Textbook Okapi BM25 with the non-negative idf ln(1 + (N - n + .5) / (n + .5))."""
    toks = [tokens(d) for d in docs]
    n_docs = len(docs)
    avgdl = sum(len(t) for t in toks) / n_docs
    scores = []
    for t in toks:
        parts = []
        for q in tokens(query):
            f = t.count(q)
            if f == 0:
                continue
            n_q = sum(1 for other in toks if q in other)
            idf = math.log(1 + (n_docs - n_q + 0.5) / (n_q + 0.5))
            denom = f + k1 * (1 - b + b * len(t) / avgdl)
            parts.append(idf * (f * (k1 + 1)) / denom)
        scores.append(math.fsum(parts))
    return scores


def brute_order(query, docs):
    scores = brute_bm25(query, docs)
    return sorted(range(len(docs)), key=lambda i: (-scores[i], i))


def stance_rule(triple):
    """Strict majority of three labels, else not-enough-evidence."""
    for label in set(triple):
        if triple.count(label) >= 2:
            return label
    return "not_enough_evidence"


VOCAB = ["vaccine", "claim", "fake", "report", "pogba", "macron", "tax", "oil", "nigeria",
         "study", "data", "source", "the", "a", "of", "Climate", "U.S.", "x1", "élan", "co2"]


def random_corpus(rng, max_passages=20, max_query_terms=8):
    """Small random passages and a query over a shared vocabulary."""
    n = rng.randint(1, max_passages)
    docs = [" ".join(rng.choice(VOCAB) for _ in range(rng.randint(0, 30))) for _ in range(n)]
    query = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, max_query_terms)))
    return query, docs
