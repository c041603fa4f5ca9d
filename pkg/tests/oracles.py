"""Independent reference implementations used as test oracles.

Nothing here imports qca_forge: each oracle is written from first
principles (integer arithmetic, popcounts, Coulomb's law) so that a bug in
the package cannot also hide in its own check.
"""

import itertools
import math

from scipy import constants


def popcount_majority(*bits):
    return int(sum(bits) * 2 > len(bits))


def all_assignments(n):
    """MSB-first assignments in ascending integer order."""
    return list(itertools.product((0, 1), repeat=n))


def full_adder_rows():
    """(Cout, Sum) for every (a, b, c) from integer addition."""
    out = []
    for a, b, c in all_assignments(3):
        t = a + b + c
        out.append((t >> 1, t & 1))
    return out


def ripple_rows(width, subtract_column=False):
    """Rows of s[w-1..0] + chain for inputs a[w-1..0], b[w-1..0], c0[, sel]."""
    n = 2 * width + 1 + int(subtract_column)
    rows = []
    for idx in range(1 << n):
        bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
        a = int("".join(map(str, bits[:width])), 2)
        b = int("".join(map(str, bits[width:2 * width])), 2)
        c = bits[2 * width]
        sel = bits[2 * width + 1] if subtract_column else 0
        if sel:
            t = a - b - c
            chain = 1 if t < 0 else 0
        else:
            t = a + b + c
            chain = t >> width
        t %= 1 << width
        rows.append(tuple((t >> i) & 1 for i in reversed(range(width))) + (chain,))
    return rows


def is_injective(rows):
    return len(set(map(tuple, rows))) == len(rows)


def colliding_classes(rows):
    groups = {}
    for i, r in enumerate(rows):
        groups.setdefault(tuple(r), []).append(i)
    return sorted(tuple(g) for g in groups.values() if len(g) > 1)


# ------------------------------------------------------------ electrostatics

def dots(x, y, z=0.0, offset=4.5, rotated=False):
    """Four dot positions (nm) with the charge sign each carries when P = +1."""
    if rotated:
        r = offset * math.sqrt(2)
        pos = [(x, y + r), (x, y - r), (x - r, y), (x + r, y)]
    else:
        pos = [(x + offset, y + offset), (x - offset, y - offset),
               (x - offset, y + offset), (x + offset, y - offset)]
    return [(px, py, z, s) for (px, py), s in zip(pos, (1, 1, -1, -1))]


def coulomb_pair_energy(cell_a, cell_b, eps_r=12.9):
    """Interaction energy of two P=+1 cells, charge e/2 per dot, in joules."""
    k = 1.0 / (4 * math.pi * constants.epsilon_0 * eps_r)
    q = constants.e / 2
    total = 0.0
    for (x1, y1, z1, s1) in cell_a:
        for (x2, y2, z2, s2) in cell_b:
            r = math.dist((x1, y1, z1), (x2, y2, z2)) * 1e-9
            total += k * (s1 * q) * (s2 * q) / r
    return total


def brute_kink_energy(a, b, **kw):
    """E(opposite) - E(equal).  Flipping one cell negates every charge product."""
    same = coulomb_pair_energy(a, b, **kw)
    return -same - same
