"""Two-level OCR text correction over lexicon frequency queries.

A word is first run through the general-case character map (unconditional
replacements of characters that cannot occur in Bahnar), then a window slides
over its graphemes. At each position the longest window (4, then 3, then 2
graphemes) whose frequency for the word's length falls below the threshold is
handed to the single-substitution search, written back in place, and the scan
moves on by one grapheme. The length key n is fixed once from the whole word
and never recomputed, and the inner window loop always stops after the first
below-threshold window, whether or not a replacement was found.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import ParseError
from .lexicon import Lexicon, WeightTable, atomize, segment_graphemes

_WHITESPACE_RUNS = re.compile(r"(\s+)")


@dataclass(frozen=True)
class GeneralCharMap:
    """Unconditional grapheme replacements; applying twice changes nothing."""

    mapping: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        norm = {}
        for src, dst in dict(self.mapping).items():
            src = unicodedata.normalize("NFC", src)
            dst = unicodedata.normalize("NFC", dst)
            norm[src] = dst
        for dst in norm.values():
            if dst in norm:
                raise ValueError(f"mapping target {dst!r} is itself a mapping source")
        object.__setattr__(self, "mapping", norm)

    @classmethod
    def load(cls, source: Union[str, Path, IO[str]]) -> "GeneralCharMap":
        """Read a "source<TAB>target" per line map; blank and # lines skip."""
        text = _read_text(source)
        mapping = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ParseError(f"general map line {lineno}: expected source<TAB>target")
            mapping[parts[0]] = parts[1]
        return cls(mapping)


@dataclass(frozen=True)
class Alphabet:
    """Candidate graphemes for substitution, in fixed iteration order."""

    graphemes: Tuple[str, ...]

    def __post_init__(self) -> None:
        norm = tuple(unicodedata.normalize("NFC", g) for g in self.graphemes)
        if not norm:
            raise ValueError("alphabet must not be empty")
        if len(set(norm)) != len(norm):
            raise ValueError("alphabet contains duplicate graphemes")
        object.__setattr__(self, "graphemes", norm)

    @classmethod
    def load(cls, source: Union[str, Path, IO[str]]) -> "Alphabet":
        """Read one grapheme per line; order is significant, # lines skip."""
        text = _read_text(source)
        graphemes = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            graphemes.append(line)
        return cls(tuple(graphemes))


@dataclass(frozen=True)
class CorrectionConfig:
    thres: int = 5
    max_window: int = 4
    min_window: int = 2

    def __post_init__(self) -> None:
        if self.thres < 1:
            raise ValueError("thres must be >= 1")
        if not 1 <= self.min_window <= self.max_window:
            raise ValueError("window bounds must satisfy 1 <= min_window <= max_window")


def apply_general_map(word: str, char_map: Optional[GeneralCharMap]) -> str:
    """Replace mapped graphemes left to right in a single pass."""
    if char_map is None or not char_map.mapping:
        return unicodedata.normalize("NFC", word)
    return "".join(char_map.mapping.get(g, g) for g in segment_graphemes(word))


def correct_subword(
    sub: str,
    n: int,
    lex: Lexicon,
    abc: Alphabet,
    cfg: CorrectionConfig,
) -> str:
    """Best single-grapheme substitution for a flagged window.

    Tries every position (ascending) against every alphabet grapheme (in
    alphabet order), keeping the candidate with the strictly highest count
    for word length ``n``; ties keep the earlier candidate. If even the best
    stays below the threshold, the window comes back unchanged.
    """
    graphemes = segment_graphemes(sub)
    original = "".join(graphemes)
    best = original
    max_prob = lex.prob(original, n)
    for pos in range(len(graphemes)):
        kept = graphemes[pos]
        for candidate_g in abc.graphemes:
            if candidate_g == kept:
                continue
            graphemes[pos] = candidate_g
            candidate = "".join(graphemes)
            current = lex.prob(candidate, n)
            if current > max_prob:
                max_prob = current
                best = candidate
        graphemes[pos] = kept
    if max_prob < cfg.thres:
        return original
    return best


def correct_word(
    word: str,
    lex: Lexicon,
    abc: Alphabet,
    cfg: CorrectionConfig,
    char_map: Optional[GeneralCharMap] = None,
    weights: Optional[WeightTable] = None,
) -> str:
    """Sliding-window error detection and correction for one token.

    After the general map, n is set to the word's weighted length.
    Windows of 4, 3, then 2 graphemes are tested at each position; the
    first one scoring below ``cfg.thres`` is replaced via
    :func:`correct_subword` and the scan advances one grapheme. Words
    shorter than ``cfg.min_window`` graphemes return after the map alone.
    """
    weights = weights if weights is not None else lex.weights
    mapped = apply_general_map(word, char_map)
    graphemes = segment_graphemes(mapped)
    count = len(graphemes)
    if count < cfg.min_window:
        return mapped
    n = atomize(mapped, weights).weighted_length

    i = 0
    while i < count:
        j = min(cfg.max_window, count - i)
        while j >= cfg.min_window:
            window = "".join(graphemes[i : i + j])
            if lex.prob(window, n) < cfg.thres:
                replacement = correct_subword(window, n, lex, abc, cfg)
                graphemes[i : i + j] = segment_graphemes(replacement)
                count = len(graphemes)
                break  # longest flagged window wins; move to the next position
            j -= 1
        i += 1
    return "".join(graphemes)


def correct_text(
    text: str,
    lex: Lexicon,
    abc: Alphabet,
    cfg: CorrectionConfig,
    char_map: Optional[GeneralCharMap] = None,
) -> str:
    """Correct each whitespace-delimited token, preserving whitespace runs."""
    parts = _WHITESPACE_RUNS.split(text)
    out: List[str] = []
    for part in parts:
        if not part or part.isspace():
            out.append(part)
        else:
            out.append(correct_word(part, lex, abc, cfg, char_map))
    return "".join(out)


def _read_text(source: Union[str, Path, IO[str]]) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    return source.read()
