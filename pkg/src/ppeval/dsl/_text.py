from __future__ import annotations

from typing import Iterator

from ..errors import DslError


def content_lines(text: str) -> Iterator[tuple[int, int, str]]:
    """Yield ``(line_no, column_of_first_char, stripped_text)`` for non-blank lines.

    ``#`` starts a comment that runs to end of line.
    """
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if stripped:
            yield no, len(body) - len(stripped) + 1, stripped


def split_keyword(line: str) -> tuple[str, str]:
    head, _, rest = line.partition(" ")
    return head, rest.strip()


def expect_name(token: str, what: str, line: int, col: int) -> str:
    from ..formula import NAME_RE

    if not NAME_RE.fullmatch(token):
        raise DslError(f"invalid {what} {token!r}", line, col)
    return token
