"""Key file reading, writing and generation."""
from __future__ import annotations

import secrets
from dataclasses import dataclass
from pathlib import Path

from sparse_ots.core.errors import ArgumentError, ConfigurationError
from sparse_ots.keystream.lfsr import Key, KeystreamSource, LfsrSpec


@dataclass(slots=True)
class KeyFile:
    """Parsed key file: generator structure, secret state and stream position.

    ``emitted`` carries the keystream symbols already used so the period
    check spans every encryption made with this key, not just one process.
    """

    spec: LfsrSpec
    key: Key
    position: int = 0
    emitted: int = 0

    def open_source(self) -> KeystreamSource:
        """Source positioned at the recorded raw-bit offset."""
        source = KeystreamSource(self.spec, self.key)
        source.skip_raw(self.position)
        source.keystream_count = self.emitted
        return source


def generate_key(degree: int, taps: tuple[int, ...] | None = None) -> KeyFile:
    """Sample a nonzero initial state from OS randomness."""
    spec = LfsrSpec(degree, taps) if taps else LfsrSpec.primitive(degree)
    state = 0
    while state == 0:
        state = secrets.randbits(degree)
    return KeyFile(spec=spec, key=Key(degree=degree, state=state))


def write_key_file(path: Path, key_file: KeyFile) -> None:
    """Write ``degree=``, ``taps=``, ``state=``, plus ``position=``/``emitted=`` once used."""
    lines = [
        f"degree={key_file.spec.degree}",
        f"taps={','.join(str(t) for t in key_file.spec.taps)}",
        f"state={key_file.key.hex()}",
    ]
    if key_file.position:
        lines.append(f"position={key_file.position}")
    if key_file.emitted:
        lines.append(f"emitted={key_file.emitted}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_key_file(path: Path) -> KeyFile:
    """Parse a key file.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigurationError: If a field is missing or malformed
    """
    if not path.exists():
        raise FileNotFoundError(f"Key file not found: {path}")

    fields: dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"Malformed key file line: {line!r}")
        fields[name.strip().lower()] = value.strip()

    missing = [f for f in ("degree", "taps", "state") if f not in fields]
    if missing:
        raise ConfigurationError(f"Key file {path} lacks {', '.join(missing)}")

    try:
        degree = int(fields["degree"])
        taps = tuple(int(t) for t in fields["taps"].split(",") if t.strip())
        position = int(fields.get("position", "0"))
        # Self-shrinking keeps one symbol per four raw bits on average.
        emitted = int(fields.get("emitted", str(position // 4)))
    except ValueError as e:
        raise ConfigurationError(f"Key file {path}: {e}") from e
    if position < 0 or emitted < 0:
        raise ArgumentError(f"Negative stream position or symbol count in {path}")

    spec = LfsrSpec(degree=degree, taps=taps)
    return KeyFile(
        spec=spec,
        key=Key.from_hex(fields["state"], degree),
        position=position,
        emitted=emitted,
    )
