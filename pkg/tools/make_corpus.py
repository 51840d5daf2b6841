"""Regenerate the bundled named graphs (needs networkx; not a runtime dependency)."""

import json
import pathlib

import networkx as nx

from flexcolor.graph import RotationSystem, degeneracy, format_flexgraph, is_plane_embedding, parse_flexgraph
from flexcolor.corpus import configuration_corpus
from flexcolor.family import BUILTIN_FAMILIES, builtin_family
from flexcolor.reducibility import format_flexconfig, parse_flexconfig

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "flexcolor" / "data"

NAMED = {
    "triangle": (lambda: nx.cycle_graph(3), "3-cycle"),
    "c5": (lambda: nx.cycle_graph(5), "5-cycle"),
    "cube": (nx.cubical_graph, "cube (3-regular, 8 vertices)"),
    "octahedron": (nx.octahedral_graph, "octahedron (4-regular, 6 vertices)"),
    "dodecahedron": (nx.dodecahedral_graph, "dodecahedron (3-regular, 20 vertices)"),
    "icosahedron": (nx.icosahedral_graph, "icosahedron (5-regular, 12 vertices)"),
    "truncated_cube": (nx.truncated_cube_graph, "truncated cube (3-regular, 24 vertices)"),
    "icosidodecahedron": (lambda: nx.line_graph(nx.dodecahedral_graph()), "icosidodecahedron, line graph of the dodecahedron"),
    "petersen": (nx.petersen_graph, "Petersen graph (not planar; rotation is arbitrary)"),
}


def to_flexgraph(g):
    g = nx.convert_node_labels_to_integers(g, ordering="sorted")
    planar, emb = nx.check_planarity(g)
    if planar:
        rot = {v: list(emb.neighbors_cw_order(v)) for v in sorted(g)}
    else:
        rot = {v: sorted(g[v]) for v in sorted(g)}
    return rot, planar


def main():
    index = {}
    for name, (make, note) in NAMED.items():
        rot, planar = to_flexgraph(make())
        lines = ["flexgraph v1"] + [f"v {v}: " + " ".join(map(str, ns)) for v, ns in rot.items()]
        text = "\n".join(lines) + "\n"
        graph, rotation = parse_flexgraph(text)
        assert format_flexgraph(graph, rotation) == text
        if planar:
            assert is_plane_embedding(graph, rotation)
        (OUT / "graphs" / f"{name}.flexgraph").write_text(text)
        index[name] = {
            "file": f"{name}.flexgraph",
            "provenance": note,
            "planar_embedding": planar,
            "vertices": len(graph),
            "edges": graph.num_edges,
            "degeneracy": degeneracy(graph)[0],
            "free_of": [f for f in BUILTIN_FAMILIES if f != "empty" and builtin_family(f).is_free(graph)],
        }
    (OUT / "graphs.json").write_text(json.dumps(index, indent=2, sort_keys=True) + "\n")
    (OUT / "configs").mkdir(exist_ok=True)
    for entry in configuration_corpus():
        text = format_flexconfig(entry.config)
        assert parse_flexconfig(text) == entry.config
        (OUT / "configs" / f"{entry.name}.flexconfig").write_text(text)


if __name__ == "__main__":
    main()
