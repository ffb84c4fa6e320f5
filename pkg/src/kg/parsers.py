"""
Readers and writers for triple files.

Supported inputs:
    - an N-Triples subset: IRIs in angle brackets and plain literals, no
      blank nodes, language tags or datatypes;
    - ``head|relation|tail`` or TAB-separated triple files (MetaQA ``kb.txt``).
"""
import re
from pathlib import Path
from typing import Iterator, List, Tuple, Union
from urllib.parse import quote, unquote

import structlog

from src.exceptions import ParseError, UnsupportedFeatureError
from src.kg.graph import Graph, GraphUpdate, UpdateKind

logger = structlog.get_logger(__name__)

RELATION_NAMESPACE = "http://kg.local/relation/"

_IRI = re.compile(r'<([^<>"{}|^`\\\x00-\x20]*)>')
_LITERAL = re.compile(r'"((?:[^"\\\n\r]|\\.)*)"')
_BLANK = re.compile(r"_:\S+")
_WS = re.compile(r"[ \t]+")
_END = re.compile(r"[ \t]*\.[ \t]*(?:#.*)?$")
_ESCAPE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")
_SIMPLE_ESCAPES = {
    "t": "\t",
    "n": "\n",
    "r": "\r",
    "b": "\b",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _data_lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line:
            yield number, line


def _local_name(iri: str) -> str:
    cut = max(iri.rfind("/"), iri.rfind("#"))
    local = iri[cut + 1:] if cut >= 0 else iri
    return unquote(local or iri)


def _unescape(body: str, line: int) -> str:
    def replace(match: re.Match) -> str:
        code = match.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        if code in _SIMPLE_ESCAPES:
            return _SIMPLE_ESCAPES[code]
        raise ParseError(f"invalid escape sequence \\{code}", line)

    return _ESCAPE.sub(replace, body)


def _read_term(line: str, pos: int, number: int, predicate: bool = False) -> Tuple[str, int]:
    if _BLANK.match(line, pos):
        raise UnsupportedFeatureError("blank nodes are not supported", number)
    iri = _IRI.match(line, pos)
    if iri:
        return _local_name(iri.group(1)), iri.end()
    literal = None if predicate else _LITERAL.match(line, pos)
    if literal:
        end = literal.end()
        if line.startswith("^^", end) or line.startswith("@", end):
            raise UnsupportedFeatureError(
                "typed and language-tagged literals are not supported", number
            )
        return _unescape(literal.group(1), number), end
    expected = "IRI" if predicate else "IRI or literal"
    raise ParseError(f"expected {expected} at column {pos + 1}", number)


def _skip_ws(line: str, pos: int, number: int) -> int:
    match = _WS.match(line, pos)
    if not match:
        raise ParseError(f"expected whitespace at column {pos + 1}", number)
    return match.end()


def parse_ntriples(text: str) -> Graph:
    """
    Parse an N-Triples document into a Graph.

    Node labels are IRI local names (after the last ``/`` or ``#``,
    percent-decoded) or the literal value.

    Raises:
        ParseError: Malformed line, with its 1-based line number.
        UnsupportedFeatureError: Blank nodes or typed/tagged literals.
    """
    graph = Graph()
    for number, line in _data_lines(text):
        if line.startswith("#"):
            continue
        subject, pos = _read_term(line, 0, number)
        pos = _skip_ws(line, pos, number)
        relation, pos = _read_term(line, pos, number, predicate=True)
        pos = _skip_ws(line, pos, number)
        obj, pos = _read_term(line, pos, number)
        if not _END.match(line, pos):
            raise ParseError("expected terminating '.'", number)
        graph.add_edge(subject, relation, obj)
    logger.debug("ntriples_parsed", nodes=graph.num_nodes, edges=graph.num_edges)
    return graph


def _detect_separator(line: str, number: int) -> str:
    if "\t" in line:
        return "\t"
    if "|" in line:
        return "|"
    raise ParseError("no '|' or TAB separator found", number)


def parse_tsv(text: str) -> Graph:
    """
    Parse ``head|relation|tail`` or TAB-separated triples.

    The separator is chosen once, from the first data line.

    Raises:
        ParseError: Line without exactly three non-empty fields.
    """
    graph = Graph()
    separator = None
    for number, line in _data_lines(text):
        if separator is None:
            separator = _detect_separator(line, number)
        fields = [f.strip() for f in line.split(separator)]
        if len(fields) != 3 or not all(fields):
            raise ParseError(
                f"expected 3 fields separated by {separator!r}, got {len(fields)}", number
            )
        graph.add_edge(*fields)
    logger.debug(
        "triples_parsed", nodes=graph.num_nodes, edges=graph.num_edges, separator=separator
    )
    return graph


def read_text_file(path: Union[str, Path]) -> str:
    """
    Read a UTF-8 input file.

    Raises:
        ParseError: The bytes are not valid UTF-8; ``line`` is where decoding failed.
    """
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        raise ParseError(f"{path}: invalid UTF-8 ({exc.reason})", line) from exc


def load_graph(path: Union[str, Path]) -> Graph:
    """Read a graph file; ``.nt`` is N-Triples, anything else pipe/TAB triples."""
    path = Path(path)
    text = read_text_file(path)
    if path.suffix.lower() == ".nt":
        return parse_ntriples(text)
    return parse_tsv(text)


def serialize_tsv(g: Graph) -> str:
    """Canonical TAB-separated form, lines sorted by head, relation, tail."""
    return "".join(f"{h}\t{r}\t{t}\n" for h, r, t in sorted(g.edges))


def _escape_literal(value: str) -> str:
    return (
        value.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def serialize_ntriples(g: Graph) -> str:
    """N-Triples with nodes as plain literals and relations as IRIs."""
    lines = []
    for head, relation, tail in sorted(g.edges):
        predicate = RELATION_NAMESPACE + quote(relation, safe="")
        lines.append(f'"{_escape_literal(head)}" <{predicate}> "{_escape_literal(tail)}" .\n')
    return "".join(lines)


_UPDATE_ARITY = {
    UpdateKind.ADD_EDGE: 3,
    UpdateKind.REMOVE_EDGE: 3,
    UpdateKind.ADD_NODE: 1,
    UpdateKind.REMOVE_NODE: 1,
}


def parse_updates(text: str) -> List[GraphUpdate]:
    """
    Parse an update file: one TAB-separated update per line.

    ``add_edge h r t``, ``remove_edge h r t``, ``add_node v``, ``remove_node v``;
    lines starting with ``#`` are comments.
    """
    updates = []
    for number, line in _data_lines(text):
        if line.startswith("#"):
            continue
        kind_name, *fields = line.split("\t")
        try:
            kind = UpdateKind(kind_name.strip())
        except ValueError:
            raise ParseError(f"unknown update kind {kind_name!r}", number) from None
        fields = [f.strip() for f in fields]
        if len(fields) != _UPDATE_ARITY[kind] or not all(fields):
            raise ParseError(f"{kind.value} expects {_UPDATE_ARITY[kind]} fields", number)
        payload = tuple(fields) if len(fields) == 3 else fields[0]
        updates.append(GraphUpdate(kind, payload))
    return updates


def load_updates(path: Union[str, Path]) -> List[GraphUpdate]:
    return parse_updates(read_text_file(path))
