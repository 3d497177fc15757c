import numpy as np

from xorcrowd.model import AnswerSet, Phase, Query, TripartiteGraph


def build_graph(m, w, items, phases=None):
    """Graph from a list of (labels, worker) pairs, ids by position."""
    queries = []
    for i, (labels, worker) in enumerate(items):
        labels = tuple(labels)
        phase = Phase(phases[i]) if phases is not None else Phase.UNPARTITIONED
        queries.append(
            Query(id=i, degree=len(labels), labels=labels, worker=worker, phase=phase)
        )
    return TripartiteGraph(m, w, queries)


def answers(values):
    return AnswerSet(np.asarray(values, dtype=np.int8))
