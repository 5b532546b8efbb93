"""Small pixel fixtures shared by the tests."""
import numpy as np

from sheafbranch import BinaryImage, Window, build_filtration

# A grows a hole at level 2, I appears at 3, at level 4 I is bridged to A
# and the hole is filled.
AI_LEVELS = [
    [".#.#...",
     "#...#..",
     "#####..",
     "#...#..",
     "#...#.."],
    [".###...",
     "#...#..",
     "#####..",
     "#...#..",
     "#...#.."],
    [".###..#",
     "#...#.#",
     "#####.#",
     "#...#.#",
     "#...#.#"],
    [".###..#",
     "#####.#",
     "#######",
     "#...#.#",
     "#...#.#"],
]


def ai_filtration():
    return build_filtration([BinaryImage.from_strings(rows) for rows in AI_LEVELS])


def ai_parts():
    """Level 3 split into the A and the I, plus level 4."""
    level3 = BinaryImage.from_strings(AI_LEVELS[2]).black
    a = frozenset(p for p in level3 if p[0] <= 4)
    i = frozenset(p for p in level3 if p[0] == 6)
    return a, i, BinaryImage.from_strings(AI_LEVELS[3]).black


def asterisk(n=9):
    """Eight arms meeting at the centre of an n x n image (n odd)."""
    a = np.zeros((n, n), dtype=bool)
    c = n // 2
    for i in range(n):
        a[c, i] = a[i, c] = a[i, i] = a[i, n - 1 - i] = True
    return BinaryImage.from_array(a)


# a horizontal bar; the window trims its middle, leaving two arms outside
TWO_ARMS = BinaryImage.from_strings(
    ["...........",
     "...........",
     "###########",
     "...........",
     "..........."]
)
TWO_ARMS_WINDOW = Window(3, 0, 7, 4)

RING = frozenset((x, y) for x in range(3) for y in range(3)) - {(1, 1)}
BLOCK = frozenset((x, y) for x in range(3) for y in range(3))
