"""Tumbling, epoch-aligned time windows."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .interactions import Interaction

WindowId = int


@dataclass(frozen=True)
class WindowConfig:
    gamma_minutes: int = 15

    def __post_init__(self):
        if isinstance(self.gamma_minutes, bool) or not isinstance(self.gamma_minutes, int):
            raise ValueError(f"gamma_minutes must be an integer, got {self.gamma_minutes!r}")
        if self.gamma_minutes <= 0:
            raise ValueError(f"gamma_minutes must be positive, got {self.gamma_minutes}")

    @property
    def seconds(self) -> int:
        return self.gamma_minutes * 60

    def bounds(self, window: WindowId) -> tuple[int, int]:
        """Half-open ``[start, end)`` epoch-second range of a window."""
        return window * self.seconds, (window + 1) * self.seconds


def window_of(t: int, cfg: WindowConfig) -> WindowId:
    if t < 0:
        raise ValueError(f"timestamp must be non-negative, got {t}")
    return t // cfg.seconds


def partition(
    interactions: Iterable[Interaction], cfg: WindowConfig
) -> dict[WindowId, list[Interaction]]:
    """Bucket interactions by window.

    Input order does not matter.  Keys come out ascending and each bucket is
    sorted by (timestamp, source_post, kind, key); empty windows are absent.
    """
    buckets: dict[WindowId, list[Interaction]] = {}
    for it in sorted(interactions, key=Interaction.sort_key):
        buckets.setdefault(window_of(it.timestamp, cfg), []).append(it)
    return dict(sorted(buckets.items()))
