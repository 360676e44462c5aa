"""Dendrogram exports: Graphviz DOT digraphs and FreeMind mind maps.

Both formats label nodes with the topic's most frequent words and shade them
by relative frequency on a log scale: frequent topics toward blue, rare ones
toward a light red.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET

from ..grouping import Dendrogram

__all__ = ["dot_export", "freemind_export", "frequency_tint"]

_LOW_RGB = (244, 204, 204)
_HIGH_RGB = (109, 158, 235)


def frequency_tint(f: int, f_min: int, f_max: int) -> str:
    """Hex color for a topic of frequency f, interpolated on a log scale."""
    if f_max <= f_min:
        rel = 1.0
    else:
        rel = (math.log(f) - math.log(f_min)) / (math.log(f_max) - math.log(f_min))
    rel = min(1.0, max(0.0, rel))
    rgb = tuple(round(lo + rel * (hi - lo)) for lo, hi in zip(_LOW_RGB, _HIGH_RGB))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _visible_nodes(dendrogram: Dendrogram, max_depth: int) -> list[tuple[int, int, bool]]:
    """(node_id, depth, expanded) in a stable preorder from the root."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    out = []
    stack = [(dendrogram.root_id, 0)]
    while stack:
        node_id, depth = stack.pop()
        kids = dendrogram.children(node_id)
        expanded = kids is not None and depth < max_depth
        out.append((node_id, depth, expanded))
        if expanded:
            stack.append((kids[1], depth + 1))
            stack.append((kids[0], depth + 1))
    return out


def _tints(dendrogram: Dendrogram, nodes) -> dict[int, str]:
    fs = {node_id: dendrogram.node_f(node_id) for node_id, _, _ in nodes}
    f_min, f_max = min(fs.values()), max(fs.values())
    return {i: frequency_tint(f, f_min, f_max) for i, f in fs.items()}


def dot_export(dendrogram: Dendrogram, max_depth: int = 6, top: int = 5) -> str:
    """Graphviz digraph of the tree down to ``max_depth`` levels below the root."""
    nodes = _visible_nodes(dendrogram, max_depth)
    tint = _tints(dendrogram, nodes)
    lines = [
        "digraph topics {",
        "  rankdir=TB;",
        '  node [shape=box, style="filled,rounded", fontname="Helvetica"];',
    ]
    for node_id, _, expanded in nodes:
        label = "\\n".join(w.replace("\\", "\\\\").replace('"', '\\"')
                           for w in dendrogram.top_words(node_id, top))
        lines.append(f'  n{node_id} [label="{label}", fillcolor="{tint[node_id]}"];')
    for node_id, _, expanded in nodes:
        if expanded:
            left, right = dendrogram.children(node_id)
            lines.append(f"  n{node_id} -> n{left};")
            lines.append(f"  n{node_id} -> n{right};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def freemind_export(dendrogram: Dendrogram, max_depth: int = 6, top: int = 5) -> str:
    """FreeMind .mm document: nested <node> elements from the root."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    nodes = _visible_nodes(dendrogram, max_depth)
    tint = _tints(dendrogram, nodes)

    def build(node_id: int, depth: int, parent: ET.Element) -> None:
        elem = ET.SubElement(parent, "node")
        elem.set("TEXT", " ".join(dendrogram.top_words(node_id, top)))
        elem.set("BACKGROUND_COLOR", tint[node_id])
        kids = dendrogram.children(node_id)
        if kids is not None and depth < max_depth:
            build(kids[0], depth + 1, elem)
            build(kids[1], depth + 1, elem)

    root = ET.Element("map", {"version": "1.0.1"})
    build(dendrogram.root_id, 0, root)
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"
