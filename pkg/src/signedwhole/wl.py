"""Weisfeiler-Lehman relabeling: unsigned, sign-neutral (sg2vn) and balance-aware (sg2vsb).

Composite strings use two explicit separators so distinct structures never
collide: ``,`` after the root label, ``.`` between neighbor tokens and ``|``
between neighbor blocks. ``compact_notation`` strips them back to the compact
display form (``"3,1.2.2"`` -> ``"3,122"``).

Degree-initialized variants (unsigned, sg2vsb) use the degree itself as the
iteration-0 label: a non-negative integer is already an injective code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .graph import SignedGraph, Sign

VARIANTS = ("unsigned", "sg2vn", "sg2vsb")


class LabelDictionary:
    """Injective map from composite strings to compact integer labels.

    Ids are issued in first-seen order starting at ``base``. Keys passed in
    by the relabeling functions carry their iteration index, so labels of
    different iterations never share an entry.
    """

    def __init__(self, base: int = 1):
        self.base = base
        self.next_id = base
        self.map: dict[str, int] = {}

    def __call__(self, key: str) -> int:
        label = self.map.get(key)
        if label is None:
            label = self.map[key] = self.next_id
            self.next_id += 1
        return label

    def __len__(self):
        return len(self.map)

    def __contains__(self, key):
        return key in self.map

    def canonical_order(self) -> dict[int, int]:
        """Old-id -> new-id remapping that sorts entries by key string."""
        return {self.map[k]: self.base + i for i, k in enumerate(sorted(self.map))}


def _key(t: int, composite: str) -> str:
    return f"{t}#{composite}"


def _join(labels: Iterable[int]) -> str:
    return ".".join(str(x) for x in sorted(labels))


def compact_notation(composite: str) -> str:
    return composite.replace(".", "").replace("|", ",")


# -- unsigned (Graph2vec) ---------------------------------------------------

def wl_init_unsigned(g: SignedGraph, dictionary: LabelDictionary | None = None) -> list[int]:
    return [g.degree(u) for u in range(g.n)]


def wl_iterate_unsigned(g: SignedGraph, labels: list[int], dictionary: LabelDictionary,
                        t: int = 1) -> tuple[list[int], list[str]]:
    if len(labels) != g.n:
        raise ValueError("labels must cover all vertices")
    composites = [f"{labels[u]},{_join(labels[v] for v in g.neighborhood(u))}" for u in range(g.n)]
    return [dictionary(_key(t, c)) for c in composites], composites


# -- sign-neutral ------------------------------------------------------------

def sg2vn_init_composites(g: SignedGraph) -> list[str]:
    kp, kn = g.degrees()
    return [f"({kn[u]};{kp[u]})" for u in range(g.n)]


def sg2vn_init(g: SignedGraph, dictionary: LabelDictionary) -> list[int]:
    """Compress the (negative degree; positive degree) pair of every vertex."""
    return [dictionary(_key(0, c)) for c in sg2vn_init_composites(g)]


def sg2vn_iterate(g: SignedGraph, labels: list[int], dictionary: LabelDictionary,
                  t: int = 1) -> tuple[list[int], list[str]]:
    if len(labels) != g.n:
        raise ValueError("labels must cover all vertices")
    composites = []
    for u in range(g.n):
        # (label, sign) with + before - at equal label
        tokens = sorted((labels[v], 0 if g.sign(u, v) is Sign.POSITIVE else 1) for v in g.neighborhood(u))
        body = ".".join(("+" if s == 0 else "-") + str(lab) for lab, s in tokens)
        composites.append(f"{labels[u]},{body}")
    return [dictionary(_key(t, c)) for c in composites], composites


# -- balance-aware -----------------------------------------------------------

def sg2vsb_init(g: SignedGraph, dictionary: LabelDictionary | None = None) -> tuple[list[int], list[int]]:
    kp, kn = g.degrees()
    return [int(x) for x in kp], [int(x) for x in kn]


def sg2vsb_iterate(g: SignedGraph, dual: tuple[list[int], list[int]], dictionary: LabelDictionary,
                   t: int = 1) -> tuple[tuple[list[int], list[int]], tuple[list[str], list[str]]]:
    lp, ln = dual
    if len(lp) != g.n or len(ln) != g.n:
        raise ValueError("dual labels must cover all vertices")
    pos_c, neg_c = [], []
    for u in range(g.n):
        np_, nn_ = g.neighborhood(u, "positive"), g.neighborhood(u, "negative")
        pos_c.append(f"{lp[u]},{_join(lp[v] for v in np_)}|{_join(ln[v] for v in nn_)}")
        neg_c.append(f"{ln[u]},{_join(ln[v] for v in np_)}|{_join(lp[v] for v in nn_)}")
    new_p = [dictionary(_key(t, c)) for c in pos_c]
    new_n = [dictionary(_key(t, c)) for c in neg_c]
    return (new_p, new_n), (pos_c, neg_c)


def sg2vsb_finalize(dual: tuple[list[int], list[int]], dictionary: LabelDictionary,
                    t: int = 0) -> tuple[list[int], list[str]]:
    lp, ln = dual
    composites = [f"({a},{b})" for a, b in zip(lp, ln)]
    return [dictionary(_key(t, c)) for c in composites], composites


# -- full traces -------------------------------------------------------------

@dataclass
class LabelTrace:
    variant: str
    labels: list[list[int]] = field(default_factory=list)
    composites: list[list[str]] = field(default_factory=list)
    pos_labels: list[list[int]] = field(default_factory=list)
    neg_labels: list[list[int]] = field(default_factory=list)
    pos_composites: list[list[str]] = field(default_factory=list)
    neg_composites: list[list[str]] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.labels) - 1


def relabel(g: SignedGraph, variant: str, iterations: int, dictionary: LabelDictionary) -> LabelTrace:
    """Run ``iterations`` rounds of the chosen relabeling.

    ``trace.labels[t]`` holds the per-vertex labels used as rooted-subgraph
    names at iteration ``t`` (the fused pair labels for sg2vsb).
    """
    tr = LabelTrace(variant)
    if variant == "unsigned":
        labels = wl_init_unsigned(g, dictionary)
        tr.labels.append(labels)
        tr.composites.append([str(x) for x in labels])
        for t in range(1, iterations + 1):
            labels, comp = wl_iterate_unsigned(g, labels, dictionary, t)
            tr.labels.append(labels)
            tr.composites.append(comp)
    elif variant == "sg2vn":
        labels = sg2vn_init(g, dictionary)
        tr.labels.append(labels)
        tr.composites.append(sg2vn_init_composites(g))
        for t in range(1, iterations + 1):
            labels, comp = sg2vn_iterate(g, labels, dictionary, t)
            tr.labels.append(labels)
            tr.composites.append(comp)
    elif variant == "sg2vsb":
        dual = sg2vsb_init(g, dictionary)
        comps = ([str(x) for x in dual[0]], [str(x) for x in dual[1]])
        for t in range(0, iterations + 1):
            if t > 0:
                dual, comps = sg2vsb_iterate(g, dual, dictionary, t)
            fused, fcomp = sg2vsb_finalize(dual, dictionary, t)
            tr.pos_labels.append(dual[0])
            tr.neg_labels.append(dual[1])
            tr.pos_composites.append(comps[0])
            tr.neg_composites.append(comps[1])
            tr.labels.append(fused)
            tr.composites.append(fcomp)
    else:
        raise ValueError(f"unknown WL variant {variant!r}")
    return tr


def dump_trace(trace: LabelTrace, out: TextIO, graph_id: str = "g") -> None:
    """Write ``vertex<TAB>composite<TAB>compact-label`` lines per iteration.

    For sg2vsb each vertex gets a ``+`` line, a ``-`` line and a fused line.
    """
    for t in range(len(trace.labels)):
        out.write(f"# graph {graph_id} iteration {t}\n")
        for u in range(len(trace.labels[t])):
            if trace.variant == "sg2vsb":
                out.write(f"{u}+\t{trace.pos_composites[t][u]}\t{trace.pos_labels[t][u]}\n")
                out.write(f"{u}-\t{trace.neg_composites[t][u]}\t{trace.neg_labels[t][u]}\n")
            out.write(f"{u}\t{trace.composites[t][u]}\t{trace.labels[t][u]}\n")
