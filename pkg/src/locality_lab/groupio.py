"""Reading group files.

A group file is a list of ``key: value`` lines::

    # comment
    name: S4
    degree: 4
    gens: (1 2 3 4);(1 2)
    prime: 2

``name``, ``degree`` and ``gens`` are required; ``prime`` is an optional
default for the command line.  Points are 1-based.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from locality_lab.groups import Perm, PermGroup


class GroupFileError(ValueError):
    pass


@dataclass
class GroupRecord:
    name: str
    degree: int
    gens: list
    prime: int | None = None

    def build(self) -> PermGroup:
        return PermGroup(self.gens, self.degree, self.name)


_KEYS = {"name", "degree", "gens", "prime"}


def parse_group_text(text: str) -> GroupRecord:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise GroupFileError(f"line {lineno}: expected 'key: value'")
        key, value = (s.strip() for s in line.split(":", 1))
        if key not in _KEYS:
            raise GroupFileError(f"line {lineno}: unknown key {key!r}")
        if key in fields:
            raise GroupFileError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value
    for key in ("name", "degree", "gens"):
        if key not in fields:
            raise GroupFileError(f"missing required key {key!r}")
    name = fields["name"]
    if not name or any(c.isspace() for c in name):
        raise GroupFileError("name must be a single token")
    try:
        degree = int(fields["degree"])
    except ValueError:
        raise GroupFileError("degree must be an integer") from None
    if not 1 <= degree <= 16:
        raise GroupFileError("degree must lie between 1 and 16")
    gens = []
    for chunk in fields["gens"].split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            gens.append(Perm.from_cycles(chunk, degree))
        except ValueError as exc:
            raise GroupFileError(f"bad generator {chunk!r}: {exc}") from None
    if not gens:
        gens.append(Perm.identity(degree))
    prime = None
    if "prime" in fields:
        try:
            prime = int(fields["prime"])
        except ValueError:
            raise GroupFileError("prime must be an integer") from None
    return GroupRecord(name, degree, gens, prime)


def read_group_file(path) -> GroupRecord:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GroupFileError(f"cannot read {path}: {exc}") from None
    return parse_group_text(text)


BATTERY = ("s4", "a4", "sl23", "d8", "q8", "s3")
EXTRA = ("c2xs3", "gl32")


def builtin_record(key: str) -> GroupRecord:
    text = resources.files("locality_lab.data").joinpath(f"{key}.grp").read_text()
    return parse_group_text(text)


def builtin_path(key: str) -> Path:
    return Path(str(resources.files("locality_lab.data").joinpath(f"{key}.grp")))


def builtin_group(key: str) -> PermGroup:
    return builtin_record(key).build()
