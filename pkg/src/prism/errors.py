"""Shared error base for the gallery engine.

Every domain error carries a stable ``code`` (what went wrong) and a
``category`` used by the HTTP layer to pick a status class:
``validation`` -> 400, ``missing`` -> 404, ``conflict`` -> 409.
"""

from __future__ import annotations


class PrismError(Exception):
    code = "Internal"
    category = "conflict"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)

    @property
    def message(self) -> str:
        return str(self)
