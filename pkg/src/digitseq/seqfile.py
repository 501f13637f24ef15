"""Reader for sequence-definition files.

Format::

    [sequence]
    q = 2
    beta = 2
    kind = table          # or a builtin kind plus its parameters

    [g]
    00 = 0
    01 = 0
    10 = 0
    11 = 1

    [initial]             # optional, kind = table only; missing entries are 0
    1 = 0

Builtin parameters: ``delta`` (beta-delta), ``d`` (b-d), ``B`` as a
comma-separated word list (occurrence), ``poly`` and ``k`` (digit-polynomial),
``beta`` plus a [g] section (block-additive, block-additive-finite).
"""

from __future__ import annotations

from pathlib import Path

from .errors import UsageError
from .sequences import KINDS, SequenceDef, builtin_sequence, from_table
from .words import Word


class SeqDefError(UsageError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


_SECTIONS = ("sequence", "g", "initial")


def _read_sections(text: str, path: str | None):
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise SeqDefError(f"malformed section header {raw.strip()!r}", lineno, path)
            current = line[1:-1].strip().lower()
            if current not in _SECTIONS:
                raise SeqDefError(f"unknown section [{current}]", lineno, path)
            if current in sections:
                raise SeqDefError(f"duplicate section [{current}]", lineno, path)
            sections[current] = {}
            continue
        if current is None:
            raise SeqDefError("key outside any section", lineno, path)
        if "=" not in line:
            raise SeqDefError(f"expected 'key = value', got {line!r}", lineno, path)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in sections[current]:
            raise SeqDefError(f"duplicate key {key!r} in [{current}]", lineno, path)
        sections[current][key] = (value, lineno)
    return sections


def _int(value: str, lineno: int, path, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise SeqDefError(f"{what} must be an integer, got {value!r}", lineno, path) from None


def _word(key: str, q: int, beta: int, lineno: int, path) -> Word:
    parts = key.split(",") if "," in key else list(key)
    try:
        letters = [int(p) for p in parts]
    except ValueError:
        raise SeqDefError(f"cannot read word {key!r}", lineno, path) from None
    if any(not 0 <= x < q for x in letters):
        raise SeqDefError(f"letter out of range in word {key!r} (q = {q})", lineno, path)
    if len(letters) != beta:
        raise SeqDefError(f"word {key!r} has length {len(letters)}, expected {beta}", lineno, path)
    return Word(tuple(letters), q)


def parse_seqdef_text(text: str, path: str | None = None) -> SequenceDef:
    sections = _read_sections(text, path)
    if "sequence" not in sections:
        raise SeqDefError("missing [sequence] section", None, path)
    head = dict(sections["sequence"])
    kind_v = head.pop("kind", ("table", None))
    kind = kind_v[0]
    if kind not in KINDS:
        raise SeqDefError(f"unknown kind {kind!r}", kind_v[1], path)
    q = _int(*head.pop("q", ("2", None)), path, "q")
    if q < 2:
        raise SeqDefError("q must be >= 2", None, path)
    beta_entry = head.pop("beta", None)
    beta = _int(*beta_entry, path, "beta") if beta_entry else None

    g_entries = {}
    if "g" in sections:
        if beta is None:
            raise SeqDefError("[g] needs beta in [sequence]", None, path)
        for key, (value, lineno) in sections["g"].items():
            w = _word(key, q, beta, lineno, path)
            g_entries[w] = _int(value, lineno, path, f"g({key})")
    initial = {}
    if "initial" in sections:
        if kind != "table":
            line = min(ln for _, ln in sections["initial"].values()) if sections["initial"] else None
            raise SeqDefError(f"[initial] is only allowed for kind = table (builtins fill it)", line, path)
        for key, (value, lineno) in sections["initial"].items():
            n = _int(key, lineno, path, "initial index")
            if beta is not None and not 0 <= n < q ** (beta - 1):
                raise SeqDefError(f"initial index {n} outside [0, {q ** (beta - 1)})", lineno, path)
            initial[n] = _int(value, lineno, path, f"initial[{n}]")

    def take(name):
        if name not in head:
            raise SeqDefError(f"kind {kind} needs parameter {name!r}", None, path)
        return head.pop(name)

    if kind == "table":
        if beta is None:
            raise SeqDefError("kind table needs beta", None, path)
        missing = q**beta - len(g_entries)
        if missing:
            have = {w.value for w in g_entries}
            absent = [str(Word.from_int(v, q, beta)) for v in range(q**beta) if v not in have]
            raise SeqDefError(
                f"[g] is missing {missing} of {q ** beta} entries: {', '.join(absent[:8])}",
                None, path,
            )
        seq = from_table(q, beta, g_entries, initial)
    elif kind in ("block-additive", "block-additive-finite"):
        if beta is None:
            raise SeqDefError(f"kind {kind} needs beta", None, path)
        table = [0] * q**beta
        for w, v in g_entries.items():
            table[w.value] = v
        try:
            seq = builtin_sequence(kind, q, beta=beta, g=table)
        except UsageError as exc:
            raise SeqDefError(str(exc), None, path) from None
    else:
        if g_entries:
            raise SeqDefError(f"[g] is not used by kind {kind}", None, path)
        params = {}
        if kind == "beta-delta":
            params["delta"] = _int(*take("delta"), path, "delta")
        elif kind == "b-d":
            params["d"] = _int(*take("d"), path, "d")
        elif kind == "occurrence":
            value, lineno = take("B")
            words = [s.strip() for s in value.split(",") if s.strip()] if q <= 10 else \
                [s.strip() for s in value.split(";") if s.strip()]
            lengths = {len(w.split(",")) if "," in w else len(w) for w in words}
            if len(lengths) != 1:
                raise SeqDefError("occurrence words must share one length", lineno, path)
            blen = lengths.pop()
            params["B"] = [_word(w, q, blen, lineno, path) for w in words]
        elif kind == "digit-polynomial":
            poly, _ = take("poly")
            params["k"] = _int(*take("k"), path, "k")
            params["poly"] = poly
        try:
            seq = builtin_sequence(kind, q, **params)
        except UsageError as exc:
            raise SeqDefError(str(exc), None, path) from None
        if beta is not None and beta != seq.beta:
            raise SeqDefError(f"beta = {beta} conflicts with kind {kind} (beta = {seq.beta})",
                              beta_entry[1], path)
    if head:
        key, (_, lineno) = next(iter(head.items()))
        raise SeqDefError(f"unknown parameter {key!r} for kind {kind}", lineno, path)
    return seq


def parse_seqdef(path: str | Path) -> SequenceDef:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SeqDefError(f"cannot read {path}: {exc.strerror}") from None
    return parse_seqdef_text(text, str(path))


def format_seqdef(seq: SequenceDef) -> str:
    """Explicit kind = table rendering of any sequence."""
    lines = ["[sequence]", f"q = {seq.q}", f"beta = {seq.beta}", "kind = table", "", "[g]"]
    lines += [f"{w} = {v}" for w, v in seq.g_word_table().items()]
    nonzero = [(n, v) for n, v in enumerate(seq.initial) if v]
    if nonzero:
        lines += ["", "[initial]"] + [f"{n} = {v}" for n, v in nonzero]
    return "\n".join(lines) + "\n"
