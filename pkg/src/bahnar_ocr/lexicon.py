"""The Bahnar n-gram frequency dictionary and its text atomization rules.

Text is normalized to composed (NFC) form and segmented into grapheme
clusters: a base character plus any trailing combining marks. Each grapheme
carries a weight (1 plus its combining-mark count, overridable from a weight
table), so a single-diacritic letter counts as two characters and a
double-diacritic letter as three. Word length keys in the dictionary use this
weighted count, while n-gram windows run over graphemes.
"""

from __future__ import annotations

import json
import unicodedata
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, IO, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import EmptyVocabularyWarning, InvalidClusterLengthError, ParseError, VersionError

LEXICON_FORMAT_VERSION = 1
MIN_CLUSTER = 2
MAX_CLUSTER = 4

# Algorithm-defined punctuation, replaced by whitespace during tokenization.
STRIPPED_CHARS = ",_-\"“”();:."


def segment_graphemes(text: str) -> List[str]:
    """Split NFC-normalized text into base-plus-marks grapheme clusters."""
    out: List[str] = []
    for ch in unicodedata.normalize("NFC", text):
        if out and unicodedata.combining(ch):
            out[-1] += ch
        else:
            out.append(ch)
    return out


def default_weight(grapheme: str) -> int:
    """1 plus the number of combining marks in the grapheme's decomposition."""
    decomposed = unicodedata.normalize("NFD", grapheme)
    marks = sum(1 for ch in decomposed if unicodedata.combining(ch))
    if marks == len(decomposed):  # degenerate: bare combining marks, no base
        return max(1, marks)
    return 1 + marks


@dataclass(frozen=True)
class WeightTable:
    """Grapheme weights; unlisted graphemes fall back to the default rule."""

    overrides: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        norm = {
            unicodedata.normalize("NFC", g): int(w) for g, w in dict(self.overrides).items()
        }
        for g, w in norm.items():
            if w < 1:
                raise ValueError(f"weight for {g!r} must be >= 1, got {w}")
        object.__setattr__(self, "overrides", norm)

    def weight(self, grapheme: str) -> int:
        return self.overrides.get(grapheme, default_weight(grapheme))

    @classmethod
    def load(cls, source: Union[str, Path, IO[str]]) -> "WeightTable":
        """Read a "grapheme<TAB>weight" per line table; blank and # lines skip."""
        text = _read_text(source)
        overrides: Dict[str, int] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"weight table line {lineno}: expected grapheme<TAB>weight")
            try:
                overrides[parts[0]] = int(parts[1])
            except ValueError as exc:
                raise ParseError(f"weight table line {lineno}: bad weight {parts[1]!r}") from exc
        return cls(overrides)


@dataclass(frozen=True)
class Atomization:
    """A token broken into graphemes together with its weighted length."""

    graphemes: Tuple[str, ...]
    weighted_length: int


def atomize(text: str, weights: Optional[WeightTable] = None) -> Atomization:
    weights = weights or WeightTable()
    graphemes = tuple(segment_graphemes(text))
    return Atomization(
        graphemes=graphemes,
        weighted_length=sum(weights.weight(g) for g in graphemes),
    )


@dataclass(frozen=True)
class VocabStack:
    """Validated single words, in ingestion order."""

    words: Tuple[str, ...]


def normalize_entry(raw: str, weights: Optional[WeightTable] = None) -> VocabStack:
    """Tokenize one vocabulary entry into validated words.

    The stripped punctuation set becomes whitespace, tokens split on
    whitespace, and single-grapheme tokens of weight 1 are discarded (a
    lone diacritic-bearing letter like a two-character token survives).
    """
    weights = weights or WeightTable()
    text = unicodedata.normalize("NFC", raw)
    cleaned = "".join(" " if ch in STRIPPED_CHARS else ch for ch in text)
    words = []
    for token in cleaned.split():
        atom = atomize(token, weights)
        if len(atom.graphemes) == 1 and atom.weighted_length == 1:
            continue
        words.append("".join(atom.graphemes))
    return VocabStack(words=tuple(words))


@dataclass
class Lexicon:
    """Cluster frequency dictionary: cluster -> (word weighted length -> count)."""

    clusters: Dict[str, Dict[int, int]] = field(default_factory=dict)
    weights: WeightTable = field(default_factory=WeightTable)
    word_count: int = 0

    def prob(self, cluster: str, n: int) -> int:
        """Count of ``cluster`` among ingested words of weighted length ``n``.

        Raises:
            InvalidClusterLengthError: cluster is not 2-4 graphemes long.
        """
        cluster = unicodedata.normalize("NFC", cluster)
        length = len(segment_graphemes(cluster))
        if not MIN_CLUSTER <= length <= MAX_CLUSTER:
            raise InvalidClusterLengthError(
                f"cluster must have {MIN_CLUSTER}-{MAX_CLUSTER} graphemes, got {length}"
            )
        return self.clusters.get(cluster, {}).get(n, 0)

    def _ingest(self, word: str) -> None:
        atom = atomize(word, self.weights)
        graphemes = atom.graphemes
        n = atom.weighted_length
        for size in range(MIN_CLUSTER, MAX_CLUSTER + 1):
            for start in range(len(graphemes) - size + 1):
                cluster = "".join(graphemes[start : start + size])
                by_len = self.clusters.setdefault(cluster, {})
                by_len[n] = by_len.get(n, 0) + 1
        self.word_count += 1


def build(stack: VocabStack, weights: Optional[WeightTable] = None) -> Lexicon:
    """Construct the frequency dictionary from a validated vocabulary.

    Every contiguous grapheme window of length 2-4 in every word increments
    the count for that cluster under the word's weighted length. Duplicate
    words count each time.
    """
    lex = Lexicon(weights=weights or WeightTable())
    for word in stack.words:
        lex._ingest(word)
    if lex.word_count == 0:
        warnings.warn("no validated words ingested", EmptyVocabularyWarning, stacklevel=2)
    return lex


def prob(lex: Lexicon, cluster: str, n: int) -> int:
    return lex.prob(cluster, n)


def save(lex: Lexicon, destination: Union[str, Path, IO[str]]) -> None:
    """Serialize as versioned UTF-8 JSON with sorted keys (diff-friendly)."""
    payload = {
        "version": LEXICON_FORMAT_VERSION,
        "word_count": lex.word_count,
        "weights": {g: w for g, w in sorted(lex.weights.overrides.items())},
        "clusters": {
            cluster: {str(n): count for n, count in sorted(by_len.items())}
            for cluster, by_len in sorted(lex.clusters.items())
        },
    }
    text = json.dumps(payload, ensure_ascii=False, indent=1, sort_keys=False)
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text + "\n", encoding="utf-8")
    else:
        destination.write(text + "\n")


def load(source: Union[str, Path, IO[str]]) -> Lexicon:
    """Parse a lexicon file written by :func:`save`.

    Raises:
        ParseError: malformed JSON or wrong structure, with position info.
        VersionError: the file declares an unsupported version.
    """
    text = _read_text(source)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"lexicon file: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(payload, dict):
        raise ParseError("lexicon file: top level must be a JSON object")
    version = payload.get("version")
    if version != LEXICON_FORMAT_VERSION:
        raise VersionError(f"unsupported lexicon version {version!r}, expected {LEXICON_FORMAT_VERSION}")
    try:
        weights = WeightTable({g: int(w) for g, w in payload.get("weights", {}).items()})
        clusters = {
            str(cluster): {int(n): int(count) for n, count in by_len.items()}
            for cluster, by_len in payload.get("clusters", {}).items()
        }
        word_count = int(payload.get("word_count", 0))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"lexicon file: malformed payload ({exc})") from exc
    for cluster, by_len in clusters.items():
        for n, count in by_len.items():
            if count < 1:
                raise ParseError(f"lexicon file: non-positive count for {cluster!r} at length {n}")
    return Lexicon(clusters=clusters, weights=weights, word_count=word_count)


def _read_text(source: Union[str, Path, IO[str]]) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    return source.read()
