"""
Bounded least-recently-used cache for solved profiles.
"""

from collections import OrderedDict
from typing import Generic, Hashable, TypeVar

from src.exceptions import ValidationError

V = TypeVar("V")


class BoundedCache(Generic[V]):
    """
    Mapping that keeps at most ``maxsize`` entries.

    Reads and writes mark an entry as most recently used; inserting past
    ``maxsize`` drops the least recently used one.
    """

    def __init__(self, maxsize: int = 128):
        if maxsize < 1:
            raise ValidationError(f"maxsize must be at least 1, got {maxsize}")
        self.maxsize = maxsize
        self._entries: "OrderedDict[Hashable, V]" = OrderedDict()

    def __contains__(self, key: Hashable) -> bool:
        return key in self._entries

    def __getitem__(self, key: Hashable) -> V:
        value = self._entries[key]
        self._entries.move_to_end(key)
        return value

    def __setitem__(self, key: Hashable, value: V) -> None:
        self._entries[key] = value
        self._entries.move_to_end(key)
        while len(self._entries) > self.maxsize:
            self._entries.popitem(last=False)

    def __len__(self) -> int:
        return len(self._entries)

    def clear(self) -> None:
        self._entries.clear()
