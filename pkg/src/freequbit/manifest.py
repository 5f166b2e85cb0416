"""Run manifests and atomic file output."""

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field


def config_digest(data: bytes) -> str:
    """SHA-256 of the raw config bytes (platform independent)."""
    return hashlib.sha256(data).hexdigest()


def write_atomic(path, text):
    """Write ``text`` via a temporary file in the same directory and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class RunManifest:
    command: str
    config_digest: str
    seed: int
    version: str
    outputs: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))
