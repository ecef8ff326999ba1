"""Versioned text serialization of trained models.

The format is line oriented and fully deterministic: sections appear in a
fixed order, categories and nodes are emitted in category-id order, nodes
depth-first, bands ascending, and every float is written in its shortest
round-trip decimal form.  Two identical models therefore serialize to
byte-identical files.  The grammar and a worked example live in
docs/model_format.md.
"""

from __future__ import annotations

import numpy as np

from .bands import Band, BandGraph
from .core import UnitClassifier
from .dataset import ColumnStats
from .errors import IntegrityError, ModelFormatError, VersionError
from .forest import ClassifierNode, Forest, iter_nodes
from .model import Model, Provenance

FORMAT_NAME = "batchband model-format"
FORMAT_VERSION = 1


def save(model: Model, sink) -> None:
    """Write a trained model to a binary stream as deterministic utf-8 text."""
    _check_model(model)
    sink.write(dumps(model).encode("utf-8"))


def load(source) -> Model:
    """Read a model back from a binary stream, verifying every invariant."""
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return loads(data)


def dumps(model: Model) -> str:
    _check_model(model)
    f = _fmt_float
    lines = [f"{FORMAT_NAME} {FORMAT_VERSION}"]
    p = model.provenance
    lines.append(f"provenance {p.rows} {p.columns} {p.source}")
    lines.append(f"scheme {model.scheme}")
    lines.append(f"categories {len(model.categories)}")
    for i, name in enumerate(model.categories):
        lines.append(f"category {i} {name}")
    lines.append(f"stats {len(model.stats)}")
    for j, st in enumerate(model.stats):
        lines.append(f"column {j} {f(st.min)} {f(st.max)}")
    encoder_lines = []
    for j, enc in enumerate(model.encoders):
        if enc is None:
            continue
        for token, code in sorted(enc.items(), key=lambda kv: kv[1]):
            encoder_lines.append(f"encoder {j} {code} {token}")
    lines.append(f"encoders {len(encoder_lines)}")
    lines.extend(encoder_lines)

    nodes = list(iter_nodes(model.forest))
    if len(nodes) != model.forest.node_count:
        raise IntegrityError(
            f"forest reports {model.forest.node_count} nodes but holds {len(nodes)}"
        )
    lines.append(f"forest {len(nodes)}")
    for node in nodes:
        u = node.unit
        lines.append(f"node {node.depth} {u.category} {f(u.desired)} {f(u.residual)}")
        lines.append("means " + " ".join(f(v) for v in u.means))
        lines.append("offsets " + " ".join(f(v) for v in u.offsets))

    if model.graph is not None:
        g = model.graph
        links = sorted(g.links)
        lines.append(f"bands {f(g.epsilon)} {g.n_bands} {len(links)}")
        for j, bands in enumerate(g.columns):
            for b in bands:
                cats = ",".join(str(c) for c in sorted(b.categories))
                lines.append(f"band {j} {f(b.low)} {f(b.high)} {cats}")
        for j, a, b in links:
            lines.append(f"link {j} {a} {b}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Model:
    cur = _Cursor(text)
    header = cur.next("header")
    parts = header.rsplit(" ", 1)
    if len(parts) != 2 or parts[0] != FORMAT_NAME:
        raise ModelFormatError("not a batchband model file")
    if parts[1] != str(FORMAT_VERSION):
        raise VersionError(f"unsupported model format version {parts[1]}")

    prov = cur.fields("provenance", "provenance", 3, rest=True)
    provenance = Provenance(source=prov[2], rows=_int(prov[0], "provenance"), columns=_int(prov[1], "provenance"))
    scheme = cur.fields("scheme", "scheme", 1)[0]
    if scheme not in ("spread", "centred"):
        raise ModelFormatError(f"unknown scheme {scheme!r} in scheme section")

    n_categories = _int(cur.fields("categories", "categories", 1)[0], "categories")
    categories = []
    for i in range(n_categories):
        idx, name = cur.fields("category", "categories", 2, rest=True)
        if _int(idx, "categories") != i:
            raise ModelFormatError("category ids out of order in categories section")
        categories.append(name)

    n_stats = _int(cur.fields("stats", "stats", 1)[0], "stats")
    stats = []
    for j in range(n_stats):
        jj, lo, hi = cur.fields("column", "stats", 3)
        if _int(jj, "stats") != j:
            raise ModelFormatError("column ids out of order in stats section")
        stats.append(ColumnStats(_float(lo, "stats"), _float(hi, "stats")))

    n_encoders = _int(cur.fields("encoders", "encoders", 1)[0], "encoders")
    encoders: list[dict[str, int] | None] = [None] * n_stats
    for _ in range(n_encoders):
        jj, code, token = cur.fields("encoder", "encoders", 3, rest=True)
        j = _int(jj, "encoders")
        if not 0 <= j < n_stats:
            raise ModelFormatError("encoder column out of range in encoders section")
        if encoders[j] is None:
            encoders[j] = {}
        encoders[j][token] = _int(code, "encoders")

    n_nodes = _int(cur.fields("forest", "forest", 1)[0], "forest")
    if n_nodes < 1:
        raise ModelFormatError("forest section declares no nodes")
    roots: dict[int, ClassifierNode] = {}
    parents: list[ClassifierNode] = []
    node_count = 0
    deepest = 0
    n_columns = None
    for _ in range(n_nodes):
        d, cat, desired, residual = cur.fields("node", "forest", 4)
        depth = _int(d, "forest")
        category = _int(cat, "forest")
        means = _float_list(cur.fields("means", "forest", 0, rest=True)[0], "forest")
        offsets = _float_list(cur.fields("offsets", "forest", 0, rest=True)[0], "forest")
        unit = UnitClassifier(
            category=category,
            means=means,
            offsets=offsets,
            desired=_float(desired, "forest"),
            residual=_float(residual, "forest"),
        )
        node = ClassifierNode(unit=unit, depth=depth)
        if n_columns is None:
            n_columns = means.shape[0]
        _verify_unit(unit, n_columns)
        while parents and parents[-1].depth >= depth:
            parents.pop()
        if depth == 0:
            if category in roots:
                raise IntegrityError(f"duplicate root for category {category}")
            roots[category] = node
        else:
            if not parents or parents[-1].depth != depth - 1:
                raise IntegrityError(
                    f"node of category {category} at depth {depth} does not follow a parent at depth {depth - 1}"
                )
            parent = parents[-1]
            if category in parent.children:
                raise IntegrityError(f"duplicate child category {category}")
            parent.children[category] = node
        parents.append(node)
        node_count += 1
        deepest = max(deepest, depth)

    graph = None
    line = cur.next("bands")
    if line.startswith("bands "):
        _, eps_s, n_bands_s, n_links_s = _split_exact(line, 4, "bands")
        epsilon = _float(eps_s, "bands")
        n_bands = _int(n_bands_s, "bands")
        n_links = _int(n_links_s, "bands")
        per_column: dict[int, list[Band]] = {}
        for _ in range(n_bands):
            jj, lo, hi, cats = cur.fields("band", "bands", 4)
            j = _int(jj, "bands")
            band = Band(
                column=j,
                low=_float(lo, "bands"),
                high=_float(hi, "bands"),
                categories=frozenset(_int(c, "bands") for c in cats.split(",")),
            )
            per_column.setdefault(j, []).append(band)
        links = set()
        for _ in range(n_links):
            jj, a, b = cur.fields("link", "bands", 3)
            links.add((_int(jj, "bands"), _int(a, "bands"), _int(b, "bands")))
        columns = tuple(
            tuple(per_column.get(j, ())) for j in range(n_stats)
        )
        graph = BandGraph(columns=columns, links=frozenset(links), epsilon=epsilon)
        _verify_graph(graph, n_categories)
        line = cur.next("end")
    if line != "end":
        raise ModelFormatError(f"expected end marker, found {line!r}")

    forest = Forest(
        roots=roots,
        desired_scheme=scheme,
        node_count=node_count,
        max_depth=deepest,
        n_columns=n_columns or 0,
    )
    model = Model(
        forest=forest,
        graph=graph,
        stats=tuple(stats),
        encoders=tuple(encoders),
        categories=tuple(categories),
        scheme=scheme,
        provenance=provenance,
    )
    _check_model(model)
    if n_stats != (n_columns or 0):
        raise IntegrityError(
            f"stats describe {n_stats} columns but units carry {n_columns}"
        )
    return model


# ---------------------------------------------------------------
# verification
# ---------------------------------------------------------------

def _check_model(model: Model) -> None:
    if model.forest is None or not model.forest.roots:
        raise IntegrityError("model has no trained forest")
    for st in model.stats:
        if st.min > st.max:
            raise IntegrityError("column stats with min > max")


def _verify_unit(unit: UnitClassifier, n_columns: int) -> None:
    if unit.means.shape != unit.offsets.shape:
        raise IntegrityError("unit means and offsets differ in length")
    if unit.means.shape[0] != n_columns:
        raise IntegrityError("unit column count differs across nodes")
    recomputed = abs(float(np.mean(unit.means + unit.offsets)) - unit.desired)
    if recomputed != unit.residual:
        raise IntegrityError(
            f"stored residual {unit.residual!r} does not match recomputed {recomputed!r}"
        )


def _verify_graph(graph: BandGraph, n_categories: int) -> None:
    for bands in graph.columns:
        prev_high = None
        for b in bands:
            if b.low > b.high:
                raise IntegrityError("band with low > high")
            if prev_high is not None and b.low <= prev_high:
                raise IntegrityError("bands overlap or are out of order")
            if not b.categories or any(
                not 0 <= c < n_categories for c in b.categories
            ):
                raise IntegrityError("band references an unknown category")
            prev_high = b.high
    for j, a, b in graph.links:
        if not 0 <= j < graph.n_columns - 1:
            raise IntegrityError("link between non-adjacent columns")
        if a >= len(graph.columns[j]) or b >= len(graph.columns[j + 1]):
            raise IntegrityError("link references a missing band")


# ---------------------------------------------------------------
# low-level text helpers
# ---------------------------------------------------------------

def _fmt_float(x) -> str:
    return repr(float(x))


class _Cursor:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, section: str) -> str:
        if self.pos >= len(self.lines):
            raise ModelFormatError(f"file ends inside the {section} section")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def fields(self, keyword: str, section: str, n: int, rest: bool = False):
        line = self.next(section)
        if not line.startswith(keyword + " "):
            raise ModelFormatError(
                f"expected a {keyword} line in the {section} section, found {line!r}"
            )
        body = line[len(keyword) + 1 :]
        if n == 0 and rest:
            return (body,)
        if rest:
            parts = body.split(" ", n - 1)
        else:
            parts = body.split(" ")
        if len(parts) != n:
            raise ModelFormatError(
                f"malformed {keyword} line in the {section} section: {line!r}"
            )
        return tuple(parts)


def _split_exact(line: str, n: int, section: str):
    parts = line.split(" ")
    if len(parts) != n:
        raise ModelFormatError(f"malformed header in the {section} section: {line!r}")
    return parts


def _int(s: str, section: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ModelFormatError(f"expected an integer in the {section} section, found {s!r}") from None


def _float(s: str, section: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ModelFormatError(f"expected a number in the {section} section, found {s!r}") from None


def _float_list(s: str, section: str) -> np.ndarray:
    return np.array([_float(v, section) for v in s.split(" ") if v != ""], dtype=np.float64)
