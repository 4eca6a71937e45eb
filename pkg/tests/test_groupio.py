import pytest

from locality_lab.groupio import (
    BATTERY,
    EXTRA,
    GroupFileError,
    builtin_record,
    parse_group_text,
    read_group_file,
)


def test_parse_minimal():
    rec = parse_group_text("name: C3\ndegree: 3\ngens: (1 2 3)\n")
    assert rec.name == "C3" and rec.degree == 3 and rec.prime is None
    assert rec.build().n == 3


def test_comments_and_prime():
    text = "# the symmetric group\nname: S3  # inline\ndegree: 3\ngens: (1 2 3);(1 2)\nprime: 3\n"
    rec = parse_group_text(text)
    assert rec.prime == 3 and rec.build().n == 6


@pytest.mark.parametrize("text", [
    "degree: 3\ngens: (1 2)\n",
    "name: X\ngens: (1 2)\n",
    "name: X\ndegree: 3\n",
    "name: X\ndegree: three\ngens: (1 2)\n",
    "name: X\ndegree: 40\ngens: (1 2)\n",
    "name: X\ndegree: 3\ngens: (1 4)\n",
    "name: X\ndegree: 3\ngens: (1 2)\ncolour: red\n",
    "name: X\nname: Y\ndegree: 3\ngens: (1 2)\n",
    "name: two words\ndegree: 3\ngens: (1 2)\n",
    "name X\n",
])
def test_parse_errors(text):
    with pytest.raises(GroupFileError):
        parse_group_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(GroupFileError):
        read_group_file(tmp_path / "nope.grp")


def test_builtins_load():
    orders = {"s4": 24, "a4": 12, "sl23": 24, "d8": 8, "q8": 8, "s3": 6, "c2xs3": 12, "gl32": 168}
    for key in BATTERY + EXTRA:
        assert builtin_record(key).build().n == orders[key]
