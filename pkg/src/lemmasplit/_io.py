"""Atomic file output: write to temporaries, then rename into place."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Mapping


def atomic_write_many(files: Mapping[Path, str]) -> None:
    """Write every file or none of them.

    All contents are written to temporaries in the target directories first;
    renames only start once every temporary is complete.
    """
    staged: list[tuple[str, Path]] = []
    try:
        for path, text in files.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def atomic_write(path: str | Path, text: str) -> None:
    atomic_write_many({Path(path): text})
