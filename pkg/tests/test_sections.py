import random

import pytest
from hypothesis import given, settings, strategies as st

from vfield import (
    Catalog,
    DuplicateError,
    InvalidNameError,
    InvalidValueError,
    MembershipError,
    NotFoundError,
)

YEAR, AUTHOR = "год издания", "автор"


@pytest.fixture
def books(catalog):
    for i in range(4):
        catalog.add_file(f"book {i}".encode(), f"book{i}.pdf")
    catalog.create_section("books")
    for i in range(1, 5):
        catalog.assign_file("books", i)
    catalog.define_attribute("books", YEAR)
    catalog.define_attribute("books", AUTHOR)
    table = {1: ("1830", "Пушкин"), 2: ("1831", "Пушкин"), 3: ("1830", "Гоголь"), 4: ("1842", "Гоголь")}
    for file_id, (year, author) in table.items():
        catalog.set_value("books", file_id, YEAR, year)
        catalog.set_value("books", file_id, AUTHOR, author)
    return catalog


def test_create_section(catalog):
    section = catalog.create_section("books")
    assert section.file_ids == [] and section.schema == [] and section.trees == {}
    assert catalog.matrix("books").shape == (0, 0)
    with pytest.raises(DuplicateError):
        catalog.create_section("books")


def test_many_independent_sections(catalog):
    names = [f"s{i}" for i in range(12)]
    for name in names:
        catalog.create_section(name)
    catalog.define_attribute("s3", "x")
    assert list(catalog.sections) == names
    assert [len(catalog.section(n).schema) for n in names].count(1) == 1


def test_assign_creates_unset_row(catalog):
    catalog.add_file(b"a", "a")
    catalog.create_section("books")
    catalog.define_attribute("books", "k")
    catalog.assign_file("books", 1)
    assert catalog.matrix("books").cells == ((None,),)


def test_sections_are_disjoint(catalog):
    catalog.add_file(b"a", "a")
    catalog.create_section("books")
    catalog.create_section("music")
    catalog.assign_file("books", 1)
    with pytest.raises(MembershipError) as info:
        catalog.assign_file("music", 1)
    assert info.value.section == "books"
    with pytest.raises(MembershipError):
        catalog.assign_file("books", 1)
    with pytest.raises(NotFoundError):
        catalog.assign_file("books", 2)


def test_seven_rows(catalog):
    catalog.create_section("s")
    for i in range(7):
        catalog.add_file(bytes([i]), f"f{i}")
        catalog.assign_file("s", i + 1)
    assert catalog.matrix("s").shape == (7, 0)


def test_define_attribute(books):
    assert books.section("books").schema == [YEAR, AUTHOR]
    with pytest.raises(DuplicateError):
        books.define_attribute("books", AUTHOR)
    with pytest.raises(InvalidNameError):
        books.define_attribute("books", "a/b")


def test_define_keeps_existing_cells(books):
    before = books.matrix("books")
    books.define_attribute("books", "жанр")
    after = books.matrix("books")
    assert after.shape == (4, 3)
    assert [row[:2] for row in after.cells] == list(before.cells)
    assert after.column("жанр") == [None] * 4


def test_n_by_k_unset(catalog):
    catalog.create_section("s")
    for i in range(5):
        catalog.add_file(bytes([i]), f"f{i}")
        catalog.assign_file("s", i + 1)
    for k in range(3):
        catalog.define_attribute("s", f"a{k}")
    m = catalog.matrix("s")
    assert m.shape == (5, 3)
    assert all(v is None for row in m.cells for v in row)


def test_set_and_clear(books):
    books.set_value("books", 1, AUTHOR, "Лермонтов")
    assert books.matrix("books").cell(1, AUTHOR) == "Лермонтов"
    books.set_value("books", 1, AUTHOR, None)
    assert books.matrix("books").cell(1, AUTHOR) is None


def test_set_errors(books):
    with pytest.raises(InvalidValueError):
        books.set_value("books", 1, AUTHOR, "a/b")
    with pytest.raises(NotFoundError):
        books.set_value("books", 1, "жанр", "x")
    with pytest.raises(MembershipError):
        books.set_value("books", 99, AUTHOR, "x")


def test_values_case_sensitive(books):
    books.set_value("books", 1, AUTHOR, "пушкин")
    assert books.matrix("books").cell(1, AUTHOR) != books.matrix("books").cell(2, AUTHOR)


def test_fill_from_random_table(catalog):
    rng = random.Random(11)
    n, k = 9, 4
    catalog.create_section("s")
    for i in range(n):
        catalog.add_file(bytes([i]), f"f{i}")
        catalog.assign_file("s", i + 1)
    attrs = [f"a{j}" for j in range(k)]
    for a in attrs:
        catalog.define_attribute("s", a)
    table = {(i, a): rng.choice(["x", "y", "z", None]) for i in range(1, n + 1) for a in attrs}
    for (i, a), v in table.items():
        catalog.set_value("s", i, a, v)
    m = catalog.matrix("s")
    assert all(m.cell(i, a) == v for (i, a), v in table.items())


def test_matrix_is_a_snapshot(books):
    m = books.matrix("books")
    books.set_value("books", 1, AUTHOR, "Лермонтов")
    assert m.cell(1, AUTHOR) == "Пушкин"


def test_project_column_order(books):
    a = books.project("books", [YEAR, AUTHOR])
    b = books.project("books", [AUTHOR, YEAR])
    assert a.file_ids == b.file_ids
    assert [row[::-1] for row in a.cells] == list(b.cells)


def test_identity_projection(books):
    section = books.section("books")
    assert books.project("books", section.schema) == books.matrix("books")


def test_project_errors(books):
    with pytest.raises(ValueError):
        books.project("books", [])
    with pytest.raises(DuplicateError):
        books.project("books", [YEAR, YEAR])
    with pytest.raises(NotFoundError):
        books.project("books", ["жанр"])
    with pytest.raises(MembershipError):
        books.project("books", [YEAR], [1, 42])


def test_random_projection_matches_filter(books):
    rng = random.Random(5)
    full = books.matrix("books")
    for _ in range(50):
        attrs = rng.sample(list(full.attributes), rng.randint(1, 2))
        files = rng.sample(list(full.file_ids), rng.randint(0, 4))
        m = books.project("books", attrs, files)
        expected = [
            [full.cells[full.file_ids.index(f)][full.attributes.index(a)] for a in attrs]
            for f in files
        ]
        assert [list(r) for r in m.cells] == expected
        assert m.shape == (len(files), len(attrs))


@settings(max_examples=40, deadline=None)
@given(m=st.integers(0, 20), a=st.integers(0, 20), data=st.data())
def test_matrix_rectangular(tmp_path_factory, m, a, data):
    cat = Catalog.init(tmp_path_factory.mktemp("c"))
    cat.create_section("s")
    # interleave assignments and definitions in a random order
    steps = data.draw(st.permutations(["f"] * m + ["a"] * a))
    files = attrs = 0
    for step in steps:
        if step == "f":
            files += 1
            cat.add_file(str(files).encode(), f"f{files}")
            cat.assign_file("s", files)
        else:
            attrs += 1
            cat.define_attribute("s", f"a{attrs}")
    matrix = cat.matrix("s")
    assert matrix.shape == (m, a)
    assert all(len(row) == a for row in matrix.cells)
