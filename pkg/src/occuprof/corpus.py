"""Timeline ingestion, tweet tokenization, and vocabulary construction."""

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

MENTION_TOKEN = "<mention>"

_URL_PREFIXES = ("http://", "https://")


class Label(Enum):
    IT = "IT"
    NON_IT = "NON_IT"


@dataclass(frozen=True)
class RawTimeline:
    """One user's tweet list; label is None for the unlabeled pretraining pool."""

    user_id: str
    tweets: tuple[str, ...]
    label: Label | None = None


@dataclass(frozen=True)
class TokenizedDocument:
    user_id: str
    tokens: tuple[str, ...]
    label: Label | None = None


def _strip_edge_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Normalize one tweet into lowercase terms.

    Splits on whitespace, drops URL tokens, collapses @-mentions to
    MENTION_TOKEN, strips the leading '#' from hashtags, and trims
    non-alphanumeric characters from both ends of every token.  The
    result re-tokenizes to itself.
    """
    out: list[str] = []
    for raw in text.lower().split():
        if raw == MENTION_TOKEN:
            out.append(raw)
            continue
        if raw.startswith(_URL_PREFIXES):
            continue
        if raw.startswith("@"):
            out.append(MENTION_TOKEN)
            continue
        token = _strip_edge_punctuation(raw.lstrip("#"))
        # edge-stripping can expose a URL (".http://x"); recheck so output is stable
        if not token or token.startswith(_URL_PREFIXES):
            continue
        out.append(token)
    return out


def concat_timeline(raw: RawTimeline) -> TokenizedDocument:
    """Tokenize every tweet and join them, in timeline order, into one document."""
    tokens: list[str] = []
    for tweet in raw.tweets:
        tokens.extend(tokenize(tweet))
    return TokenizedDocument(user_id=raw.user_id, tokens=tuple(tokens), label=raw.label)


class Vocabulary:
    """Term-to-ordinal map ordered by (frequency desc, term asc).

    `terms` is kept in ordinal order as (term, corpus_frequency) pairs.
    Instances are immutable by convention and safe to share.
    """

    def __init__(self, terms: Iterable[tuple[str, int]], min_count: int = 1):
        self.terms: tuple[tuple[str, int], ...] = tuple((t, int(f)) for t, f in terms)
        self.index: dict[str, int] = {t: i for i, (t, _) in enumerate(self.terms)}
        self.min_count = min_count
        if len(self.index) != len(self.terms):
            raise ValueError("duplicate terms in vocabulary")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    def ordinal(self, term: str) -> int:
        return self.index[term]

    def term(self, ordinal: int) -> str:
        return self.terms[ordinal][0]

    def frequency(self, term: str) -> int:
        return self.terms[self.index[term]][1]

    @property
    def total_count(self) -> int:
        """Total number of retained token occurrences."""
        return sum(f for _, f in self.terms)


def build_vocabulary(docs: Iterable[TokenizedDocument], min_count: int) -> Vocabulary:
    """Count every token across `docs` and retain terms seen at least `min_count` times."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(doc.tokens)
    kept = [(t, f) for t, f in counts.items() if f >= min_count]
    if not kept:
        raise ValueError("empty vocabulary")
    kept.sort(key=lambda tf: (-tf[1], tf[0]))
    return Vocabulary(kept, min_count=min_count)


def top_k_terms(vocab: Vocabulary, k: int) -> Vocabulary:
    """Restrict `vocab` to its k highest-frequency terms, re-indexed densely."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Vocabulary(vocab.terms[:k], min_count=vocab.min_count)


def read_timelines(path: str) -> Iterator[RawTimeline]:
    """Stream RawTimeline records from a JSONL file.

    Each line holds {"user_id": str, "label": "IT"|"NON_IT"|null,
    "tweets": [str, ...]}.  Any malformed line aborts with its line number.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ValueError(f"{path}:{lineno}: expected a JSON object")
            user_id = obj.get("user_id")
            if not isinstance(user_id, str) or not user_id:
                raise ValueError(f"{path}:{lineno}: user_id must be a non-empty string")
            tweets = obj.get("tweets")
            if not isinstance(tweets, list) or any(not isinstance(t, str) for t in tweets):
                raise ValueError(f"{path}:{lineno}: tweets must be a list of strings")
            raw_label = obj.get("label")
            if raw_label is None:
                label = None
            else:
                try:
                    label = Label(raw_label)
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: label must be \"IT\", \"NON_IT\", or null"
                    ) from None
            yield RawTimeline(user_id=user_id, tweets=tuple(tweets), label=label)


def read_documents(path: str) -> list[TokenizedDocument]:
    """Read a timeline JSONL file and concatenate each user into one document."""
    return [concat_timeline(raw) for raw in read_timelines(path)]


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    """Write one `term<TAB>frequency` line per term, in ordinal order."""
    with open(path, "w", encoding="utf-8") as fh:
        for term, freq in vocab.terms:
            fh.write(f"{term}\t{freq}\n")


def load_vocabulary(path: str) -> Vocabulary:
    """Read a vocabulary file, preserving the file's ordinal order."""
    pairs: list[tuple[str, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'term<TAB>frequency'")
            try:
                pairs.append((parts[0], int(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: frequency must be an integer") from None
    if not pairs:
        raise ValueError("empty vocabulary")
    return Vocabulary(pairs, min_count=1)
