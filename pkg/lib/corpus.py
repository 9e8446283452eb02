#!/usr/bin/env python3
"""
Self-test Corpus

Reference arrangements with their expected counts and homology, plus the
expectations for the three calibration curves. Loaded from the packaged
data/corpus.json.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger(__name__)

CORPUS_PATH = Path(__file__).parent / "data" / "corpus.json"


@dataclass
class CorpusEntry:
    """One arrangement and what the pipeline must report for it."""

    name: str
    lines: List[List[str]]
    expected: Dict[str, Any]
    description: str = ""
    manifold: str = ""
    provenance: Dict[str, str] = field(default_factory=dict)

    def document(self) -> Dict[str, Any]:
        return {"name": self.name, "lines": self.lines}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "manifold": self.manifold,
            "lines": self.lines,
            "expected": self.expected,
            "provenance": self.provenance,
        }


@dataclass
class Corpus:
    entries: List[CorpusEntry]
    calibration: Dict[str, Dict[str, Any]]

    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def get(self, name: str) -> CorpusEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(f"No corpus entry named {name}")


def load_corpus(path: Optional[Union[str, Path]] = None) -> Corpus:
    path = Path(path) if path else CORPUS_PATH
    data = json.loads(path.read_text())
    entries = [
        CorpusEntry(
            name=item["name"],
            lines=item["lines"],
            expected=item["expected"],
            description=item.get("description", ""),
            manifold=item.get("manifold", ""),
            provenance=item.get("provenance", {}),
        )
        for item in data["entries"]
    ]
    logger.debug(f"Loaded {len(entries)} corpus entries from {path}")
    return Corpus(entries=entries, calibration=data.get("calibration", {}))
