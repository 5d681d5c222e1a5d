"""Exact sparse linear algebra over the rationals.

Rows are dicts {column_key: Fraction}.  Column keys are arbitrary hashable
values ordered by a caller-supplied sort key; pivots always sit on the
smallest column of their row, so reduced bases are deterministic.
"""

from __future__ import annotations

from fractions import Fraction


def reduce_rows(rows, col_key):
    """Forward elimination with full back-substitution (RREF pivot rows).

    Returns {pivot_column: row} where every row has coefficient 1 on its
    pivot and no other pivot columns.
    """
    pivots = {}
    for row in rows:
        row = {c: Fraction(v) for c, v in row.items() if v}
        while row:
            c = min(row, key=col_key)
            prow = pivots.get(c)
            if prow is None:
                inv = 1 / row[c]
                pivots[c] = {cc: vv * inv for cc, vv in row.items()}
                break
            factor = row[c]
            for cc, vv in prow.items():
                s = row.get(cc, 0) - factor * vv
                if s:
                    row[cc] = s
                else:
                    row.pop(cc, None)
    # substitute later pivots out of earlier rows (descending pass)
    for c in sorted(pivots, key=col_key, reverse=True):
        row = pivots[c]
        extra = [cc for cc in row if cc != c and cc in pivots]
        for cc in extra:
            factor = row.pop(cc)
            for c3, v3 in pivots[cc].items():
                if c3 == cc:
                    continue
                s = row.get(c3, 0) - factor * v3
                if s:
                    row[c3] = s
                else:
                    row.pop(c3, None)
    return pivots


def nullspace(rows, columns, col_key=None):
    """Basis of the solution space of the homogeneous system rows . x = 0.

    `columns` lists every unknown (including ones no row touches).  Returns
    one dict per free column, in column order.
    """
    col_key = col_key or (lambda c: c)
    order = sorted(columns, key=col_key)
    index = {c: i for i, c in enumerate(order)}
    pivots = reduce_rows(rows, lambda c: index[c])
    basis = []
    for f in order:
        if f in pivots:
            continue
        vec = {f: Fraction(1)}
        for c, row in pivots.items():
            v = row.get(f)
            if v:
                vec[c] = -v
        basis.append(vec)
    return basis


def rank(rows, col_key=None):
    col_key = col_key or (lambda c: c)
    return len(reduce_rows(rows, col_key))


def split_components(rows, columns):
    """Partition a homogeneous system into independent subsystems.

    Returns a list of (rows, columns) pairs; columns touched by no row come
    back as singleton systems with an empty row list.
    """
    parent = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for c in columns:
        parent.setdefault(c, c)
    for row in rows:
        cols = [c for c in row]
        for c in cols:
            parent.setdefault(c, c)
        for c in cols[1:]:
            union(cols[0], c)

    groups = {}
    for c in columns:
        groups.setdefault(find(c), ([], []))[1].append(c)
    for row in rows:
        if not row:
            continue
        root = find(next(iter(row)))
        groups.setdefault(root, ([], []))[0].append(row)
    return list(groups.values())


def nullspace_split(rows, columns, col_key=None):
    """nullspace() computed per connected component (same result, faster)."""
    basis = []
    for sub_rows, sub_cols in split_components(rows, columns):
        basis.extend(nullspace(sub_rows, sub_cols, col_key))
    key = col_key or (lambda c: c)
    return sorted(basis, key=lambda v: min(map(key, v)))
