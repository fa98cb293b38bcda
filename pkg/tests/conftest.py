"""Shared synthetic corpora.

Everything here is generated from explicit seeds so test runs are
repeatable; nothing depends on wall-clock state or external files.
"""

import json

import numpy as np
import pytest

from occuprof.corpus import Label, TokenizedDocument

BLOCK_A = tuple(f"alpha{i}" for i in range(5))
BLOCK_B = tuple(f"beta{i}" for i in range(5))

IT_TERMS = tuple(f"itword{i}" for i in range(30))
NON_IT_TERMS = tuple(f"nonword{i}" for i in range(30))
SHARED_TERMS = tuple(f"common{i}" for i in range(20))


def two_block_documents(n_docs: int = 2000, doc_len: int = 50, seed: int = 11):
    """Docs drawn entirely from one of two disjoint term blocks.

    Co-occurrence only ever happens inside a block, which forces embedding
    geometry to separate the blocks.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for i in range(n_docs):
        block = BLOCK_A if i % 2 == 0 else BLOCK_B
        tokens = rng.choice(block, size=doc_len)
        docs.append(TokenizedDocument(f"u{i}", tuple(tokens)))
    return docs


def planted_tweets(rng: np.random.Generator, label: Label, n_tweets: int, tweet_len: int):
    """Tweets whose term distribution is conditioned on the label."""
    own = IT_TERMS if label is Label.IT else NON_IT_TERMS
    tweets = []
    for _ in range(n_tweets):
        words = [
            str(rng.choice(own)) if rng.random() < 0.6 else str(rng.choice(SHARED_TERMS))
            for _ in range(tweet_len)
        ]
        tweets.append(" ".join(words))
    return tweets


def planted_timelines(n_users: int, n_tweets: int, seed: int, labeled: bool = True):
    """Alternating IT / NON_IT users with planted vocabularies."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_users):
        label = Label.IT if i % 2 == 0 else Label.NON_IT
        rows.append(
            {
                "user_id": f"user{i}",
                "label": label.value if labeled else None,
                "tweets": planted_tweets(rng, label, n_tweets, tweet_len=8),
            }
        )
    return rows


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return str(path)


@pytest.fixture(scope="session")
def planted_labeled_file(tmp_path_factory):
    base = tmp_path_factory.mktemp("planted")
    rows = planted_timelines(n_users=400, n_tweets=50, seed=101, labeled=True)
    return write_jsonl(base / "labeled.jsonl", rows)


@pytest.fixture(scope="session")
def planted_pool_file(tmp_path_factory):
    base = tmp_path_factory.mktemp("pool")
    rows = planted_timelines(n_users=200, n_tweets=50, seed=202, labeled=False)
    return write_jsonl(base / "pool.jsonl", rows)
