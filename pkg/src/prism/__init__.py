"""Headless virtual-exhibition engine.

A grid-map gallery with per-artwork comment threads, a guestbook, a
consolidated comment summary, and a script-driven exhibition guide,
exposed over HTTP and a curator CLI.
"""

__version__ = "0.1.0"
