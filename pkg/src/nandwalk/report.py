"""Report serialization: key: value text blocks and JSON sidecars.

Reports are deterministic (keys in insertion order, floats via repr) so
identical runs produce byte-identical output; wall-clock timings are
only included when explicitly requested.
"""

from __future__ import annotations

import json


def format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    return str(value)


def to_text(doc: dict) -> str:
    """Flat key: value lines; nested dicts become dotted keys."""
    lines: list[str] = []

    def walk(prefix: str, node):
        for k, v in node.items():
            key = f"{prefix}{k}"
            if isinstance(v, dict):
                walk(key + ".", v)
            else:
                lines.append(f"{key}: {format_value(v)}")

    walk("", doc)
    return "\n".join(lines) + "\n"


def write_json(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
