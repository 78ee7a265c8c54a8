"""The three tilting tables as cell strings, and a reader for them.

A cell reads as a shift if it carries ``[1]``, as a triangle if it has
arrows, and otherwise names an object.  A bare object equal to the one
in the same row a column earlier is unchanged; any other bare object is
the new object of a triangle the table does not write out.
"""

ARROW = "->"


def _obj(cell: str) -> str:
    if ARROW in cell:
        return cell.split(ARROW)[1]
    return cell


def decode(table: list) -> list:
    """Outcome classes per step: a list of {row name: class} dicts.

    Each row is its name, the initial object, then one cell per step.
    """
    out = []
    for c in range(2, len(table[0])):
        col = {}
        for row in table:
            r, cell = row[0], row[c]
            if ARROW in cell:
                col[r] = "triangle"
            elif "[1]" in cell:
                col[r] = "shift"
            elif cell == _obj(row[c - 1]):
                col[r] = "unchanged"
            else:
                col[r] = "triangle"
        out.append(col)
    return out


def _s(j: int) -> str:
    return "S" if j == 0 else f"S{j}"


def type_two_table(m: int) -> list:
    """The type II table for m auxiliary arcs: rows X, S, S1..Sm, T."""
    rows = {"X": ["X"], "T": ["T"]}
    rows.update({_s(j): [_s(j)] for j in range(m + 1)})
    # after the flip at S
    rows["X"].append(f"S{ARROW}X'{ARROW}X")
    rows["S"].append("S[1]")
    for j in range(1, m + 1):
        rows[_s(j)].append(f"S{ARROW}S1'{ARROW}S1" if j == 1 else _s(j))
    rows["T"].append("T")
    for k in range(1, m + 1):
        rows["X"].append("X'")
        for j in range(m + 1):
            if j < k - 1:
                cell = _s(j + 1)
            elif j == k - 1:
                cell = f"S1'{ARROW}S1{ARROW}S[1]" if k == 1 else _s(k)
            elif j == k:
                cell = f"S{k}'[1]"
            elif j == k + 1:
                cell = f"S{k}'{ARROW}S{j}'{ARROW}S{j}"
            else:
                cell = _s(j)
            rows[_s(j)].append(cell)
        rows["T"].append(f"S{m}'{ARROW}T'{ARROW}T" if k == m else "T")
    order = ["X"] + [_s(j) for j in range(m + 1)] + ["T"]
    return [[r] + rows[r] for r in order]


TYPE_THREE_TWO_ARCS = [
    ["S", "S", "S[1]", f"S1'{ARROW}S1{ARROW}S[1]", "S1"],
    ["S1", "S1", f"S{ARROW}S1'{ARROW}S1", "S1'[1]", "S2"],
    ["S2", "S2", "S2", f"S1'{ARROW}S2'{ARROW}S2", "S2'[1]"],
    ["X", "X", f"S{ARROW}X'{ARROW}X", "X'", f"S2'{ARROW}X''{ARROW}X'"],
]

TYPE_THREE_ONE_ARC = [
    ["S", "S", "S[1]", f"S1'{ARROW}S1{ARROW}S[1]"],
    ["S1", "S1", f"S{ARROW}S1'{ARROW}S1", "S1'[1]"],
    ["X", "X", f"S{ARROW}X'{ARROW}X", f"S1'{ARROW}X''{ARROW}X"],
]


def type_two_names(m: int) -> dict:
    """Table row -> arc name in the type II fixtures."""
    out = {"S": "g", "X": "X", "T": "x"}
    out.update({f"S{j}": f"h{j}" for j in range(1, m + 1)})
    return out


NAMES_TWO_ARCS = {"S": "g", "S1": "a2", "S2": "a1", "X": "X"}
NAMES_ONE_ARC = {"S": "g", "S1": "a1", "X": "X"}
