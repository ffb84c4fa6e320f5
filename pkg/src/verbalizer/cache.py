"""
Verbalization cache keyed by canonical walk key.
"""
import json
import threading
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Iterator

from src.exceptions import CacheConflictError, ParseError


class VerbalizationMethod(str, Enum):
    LLM = "llm"
    TEMPLATE = "template"


@dataclass(frozen=True)
class VerbalizedWalk:
    walk_key: str
    text: str
    method: VerbalizationMethod

    def __post_init__(self):
        if not self.text:
            raise ValueError("verbalized text must be non-empty")


class VerbalizationCache(Mapping):
    """
    Thread-safe walk_key -> VerbalizedWalk store.

    Inserting a different value for an existing key is rejected.
    """

    def __init__(self, entries: Iterable[VerbalizedWalk] = ()):
        self._entries: Dict[str, VerbalizedWalk] = {}
        self._lock = threading.Lock()
        for entry in entries:
            self.put(entry)

    def __getitem__(self, key: str) -> VerbalizedWalk:
        return self._entries[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, VerbalizationCache):
            return self._entries == other._entries
        return NotImplemented

    def __repr__(self) -> str:
        return f"VerbalizationCache(entries={len(self)})"

    def put(self, entry: VerbalizedWalk) -> None:
        with self._lock:
            existing = self._entries.get(entry.walk_key)
            if existing is not None and existing != entry:
                raise CacheConflictError(f"conflicting verbalization for walk {entry.walk_key}")
            self._entries[entry.walk_key] = entry

    def retain(self, keys: Iterable[str]) -> int:
        """Drop entries whose key is not in ``keys``; returns how many were dropped."""
        keep = set(keys)
        with self._lock:
            stale = [key for key in self._entries if key not in keep]
            for key in stale:
                del self._entries[key]
        return len(stale)

    def copy(self) -> "VerbalizationCache":
        return VerbalizationCache(self._entries.values())

    def texts_for(self, keys: Iterable[str]) -> Dict[str, str]:
        return {key: self._entries[key].text for key in keys if key in self._entries}

    def dump(self) -> str:
        """JSON lines (walk_key, method, text), sorted by walk_key."""
        lines = [
            json.dumps(
                {"walk_key": key, "method": entry.method.value, "text": entry.text},
                ensure_ascii=False,
                separators=(",", ":"),
            )
            for key, entry in sorted(self._entries.items())
        ]
        return "".join(line + "\n" for line in lines)

    @classmethod
    def load(cls, text: str) -> "VerbalizationCache":
        cache = cls()
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                cache.put(
                    VerbalizedWalk(
                        record["walk_key"], record["text"], VerbalizationMethod(record["method"])
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"invalid verbalization record: {exc}", number) from exc
        return cache
