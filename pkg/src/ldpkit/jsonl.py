"""Line-delimited JSON helpers."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{n}: invalid JSON ({exc.msg})") from None
    return out


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_jsonl(records: Iterable, path) -> int:
    """Write records (dicts or objects with ``to_dict``); returns the count."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            if hasattr(rec, "to_dict"):
                rec = rec.to_dict()
            f.write(dumps(rec) + "\n")
            n += 1
    return n
