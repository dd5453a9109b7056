"""Random catalog construction shared by persistence and acceptance tests."""

import random

from vfield import Catalog, DuplicateError, PlacementError, TreeError

VALUES = ["1830", "1842", "Пушкин", "Гоголь", "a b", "x,y", "é"]


def random_catalog(rng: random.Random, root) -> Catalog:
    cat = Catalog.init(root)
    for n in range(rng.randint(0, 20)):
        cat.add_file(rng.randbytes(rng.randint(0, 16)), f"f{n}.{rng.choice('ab')}")
    for file_id in rng.sample(sorted(cat.field.entries), k=min(2, len(cat.field))):
        if rng.random() < 0.3:
            cat.remove_file(file_id)
    free = sorted(cat.field.entries)
    rng.shuffle(free)
    trees_left = 4
    for s in range(rng.randint(0, 3)):
        section = cat.create_section(f"раздел {s}")
        for _ in range(rng.randint(0, len(free))):
            cat.assign_file(section.name, free.pop())
        for a in range(rng.randint(0, 3)):
            section.define_attribute(f"attr{a}")
        for file_id in section.file_ids:
            for attr in section.schema:
                section.set_value(file_id, attr, rng.choice(VALUES + [None]))
        for t in range(rng.randint(0, trees_left)):
            trees_left -= 1
            if section.schema and rng.random() < 0.5:
                attrs = rng.sample(section.schema, rng.randint(1, len(section.schema)))
                missing = rng.choice(["skip", "bucket"])
                section.build_auto(f"auto{t}", attrs, missing=missing)
            else:
                random_manual_edits(rng, section.create_tree(f"manual{t}"), section.file_ids, 15)
    return cat


def random_manual_edits(rng, tree, members, n_ops):
    """Apply random manual operations, ignoring the ones the tree refuses."""
    for _ in range(n_ops):
        paths = [p for p, _ in tree.walk()]
        op = rng.choice(["mkdir", "mkdir", "link", "link", "unlink", "rmdir", "move"])
        try:
            if op == "mkdir":
                tree.mkdir(rng.choice(paths), rng.choice("abc"))
            elif op == "link" and members:
                tree.link(rng.choice(paths), rng.choice(members))
            elif op == "unlink":
                placed = [(p, f) for p, refs in tree.walk() for f in refs]
                if placed:
                    tree.unlink(*rng.choice(placed))
            elif op == "rmdir" and len(paths) > 1:
                tree.rmdir(rng.choice(paths[1:]))
            elif op == "move" and len(paths) > 1:
                tree.move_dir(rng.choice(paths[1:]), rng.choice(paths))
        except (DuplicateError, PlacementError, TreeError):
            pass
