"""Flat ``key = value`` text files: CLI configs and checkpoint manifests.

One assignment per line; blank lines and ``#`` comments are ignored. Values
are returned as raw strings, typed by the consumer.
"""

from __future__ import annotations

import os

from .errors import ValidationError


def read_kv_file(path) -> dict[str, str]:
    if not os.path.exists(path):
        raise ValidationError(f"no such file {path}")
    out: dict[str, str] = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key in out:
                raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value.strip()
    return out
