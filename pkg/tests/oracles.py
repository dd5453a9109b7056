"""Independent reference computations used by several test modules."""

import random

LEAF = object()


def nested_grouping(rows):
    """Group ``(file_id, values)`` by the full value tuple into nested dicts."""
    root = {}
    for file_id, values in rows:
        node = root
        for v in values:
            node = node.setdefault(v, {})
        node.setdefault(LEAF, []).append(file_id)
    return _canon_dict(root)


def _canon_dict(node):
    children = sorted((k, _canon_dict(v)) for k, v in node.items() if k is not LEAF)
    return tuple(children), tuple(sorted(node.get(LEAF, [])))


def canon_tree(vdir):
    """Tree shape with siblings sorted, comparable to ``nested_grouping``."""
    children = sorted((d.name, canon_tree(d)) for d in vdir.dirs)
    return tuple(children), tuple(sorted(vdir.files))


def depth_of(vdir):
    return 1 + max((depth_of(d) for d in vdir.dirs), default=0)


def random_matrix(rng: random.Random, n_files, h, alphabet="abc", unset=0.1):
    """Random ``{file_id: [value or None] * h}``."""
    return {
        i: [None if rng.random() < unset else rng.choice(alphabet) for _ in range(h)]
        for i in range(1, n_files + 1)
    }
