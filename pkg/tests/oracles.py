"""Self-contained brute-force oracles for the tiny-instance constants.

Everything here is deliberately independent of the main package: words are
tuples of ints, fields are literal tables, and every quantity is computed
straight from its definition by full enumeration.  Running the module prints
the frozen fixture table used by the acceptance tests.

    python tests/oracles.py
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import prod

# GF(2): elements {0,1}, add = xor, mul = and.
GF2_MUL = ((0, 0), (0, 1))

# GF(4) with modulus x^2 + x + 1: elements {0, 1, w=2, w^2=3}.
# Hand-derived: w*w = w+1 = 3, w*w^2 = w^3 = 1, w^2*w^2 = w^4 = w = 2.
GF4_MUL = (
    (0, 0, 0, 0),
    (0, 1, 2, 3),
    (0, 2, 3, 1),
    (0, 3, 1, 2),
)


def orc_cells(shape):
    return list(itertools.product(*(range(n) for n in shape)))


def orc_lines(shape, axis):
    """Each line is the ordered tuple of its cell indices."""
    ranges = [range(n) for i, n in enumerate(shape) if i != axis]
    lines = []
    for fixed in itertools.product(*ranges):
        line = []
        for s in range(shape[axis]):
            cell = list(fixed)
            cell.insert(axis, s)
            line.append(tuple(cell))
        lines.append(tuple(line))
    return lines


def orc_cyclic_code(mul, q, n, check):
    """All words w with sum_j check[j] * w[(d-j) mod n] = 0 for every d."""
    code = []
    for w in itertools.product(range(q), repeat=n):
        ok = True
        for d in range(n):
            acc = 0
            for j, pj in enumerate(check):
                if pj:
                    acc ^= mul[pj][w[(d - j) % n]]
            if acc:
                ok = False
                break
        if ok:
            code.append(w)
    return code


def orc_direction_space(shape, axis, code):
    """All words of C^(axis), assembled line by line."""
    lines = orc_lines(shape, axis)
    cells = orc_cells(shape)
    pos = {c: i for i, c in enumerate(cells)}
    words = []
    for combo in itertools.product(code, repeat=len(lines)):
        w = [0] * len(cells)
        for line, cw in zip(lines, combo):
            for cell, v in zip(line, cw):
                w[pos[cell]] = v
        words.append(tuple(w))
    return words


def orc_product_code(shape, codes):
    """All words whose every line in every direction is in the axis code."""
    spaces = [set(orc_direction_space(shape, ax, c)) for ax, c in enumerate(codes)]
    out = spaces[0]
    for s in spaces[1:]:
        out = out & s
    return sorted(out)


def orc_line_norm(shape, word, axis):
    cells = orc_cells(shape)
    pos = {c: i for i, c in enumerate(cells)}
    lines = orc_lines(shape, axis)
    nonzero = sum(1 for line in lines if any(word[pos[c]] for c in line))
    return Fraction(nonzero, len(lines))


def orc_sum_code_with_costs(shape, codes):
    """Map from each sum-code word to its minimum splitting cost."""
    m = len(codes)
    spaces = [orc_direction_space(shape, ax, c) for ax, c in enumerate(codes)]
    best = {}
    for parts in itertools.product(*spaces):
        total = tuple(
            _xor_all(parts, i) for i in range(len(parts[0]))
        )
        cost = sum(
            (orc_line_norm(shape, parts[ax], ax) for ax in range(m)),
            start=Fraction(0),
        )
        if total not in best or cost < best[total]:
            best[total] = cost
    return best


def _xor_all(parts, i):
    acc = 0
    for p in parts:
        acc ^= p[i]
    return acc


def orc_rho(shape, codes):
    N = prod(shape)
    best = None
    for word, cost in orc_sum_code_with_costs(shape, codes).items():
        wt = sum(1 for v in word if v)
        if wt == 0:
            continue
        ratio = Fraction(wt, N) / cost
        if best is None or ratio < best:
            best = ratio
    return best


def orc_delta(word, codewords):
    n = len(word)
    best = min(sum(1 for a, b in zip(word, cw) if a != b) for cw in codewords)
    return Fraction(best, n)


def orc_flats(shape, k):
    """(cell-index tuple, size) for every k-flat; weights are size/total."""
    m = len(shape)
    cells = orc_cells(shape)
    pos = {c: i for i, c in enumerate(cells)}
    flats = []
    for axes in itertools.combinations(range(m), k):
        fixed_axes = [i for i in range(m) if i not in axes]
        for coords in itertools.product(*(range(shape[i]) for i in fixed_axes)):
            members = []
            for free in itertools.product(*(range(shape[i]) for i in axes)):
                cell = [0] * m
                for i, v in zip(fixed_axes, coords):
                    cell[i] = v
                for i, v in zip(axes, free):
                    cell[i] = v
                members.append(pos[tuple(cell)])
            flats.append((tuple(members), axes))
    return flats


def orc_rho_r(shape, codes, k):
    """Exact robustness of the k-flat test over the full word space."""
    q = max(max(cw, default=0) for code in codes for cw in code) + 1
    q = max(q, 2)
    N = prod(shape)
    prod_code = orc_product_code(shape, codes)
    flats = orc_flats(shape, k)
    sub_codes = {}
    for members, axes in flats:
        if axes not in sub_codes:
            sub_shape = tuple(shape[i] for i in axes)
            sub_codes[axes] = orc_product_code(sub_shape, [codes[i] for i in axes])
    total_size = sum(len(members) for members, _ in flats)
    best = None
    best_word = None
    for word in itertools.product(range(q), repeat=N):
        d = orc_delta(word, prod_code)
        if d == 0:
            continue
        acc = 0
        for members, axes in flats:
            sub = tuple(word[i] for i in members)
            acc += min(
                sum(1 for a, b in zip(sub, cw) if a != b) for cw in sub_codes[axes]
            )
        expectation = Fraction(acc, total_size)
        ratio = expectation / d
        if best is None or ratio < best:
            best, best_word = ratio, word
    return best, best_word


def orc_rho_a(shape, codes):
    """Exact agreement testability over all direction-word tuples."""
    m = len(codes)
    N = prod(shape)
    spaces = [orc_direction_space(shape, ax, c) for ax, c in enumerate(codes)]
    prod_code = orc_product_code(shape, codes)
    best = None
    for tup in itertools.product(*spaces):
        pair = Fraction(0)
        for i in range(m):
            for j in range(m):
                diff = sum(1 for a, b in zip(tup[i], tup[j]) if a != b)
                pair += Fraction(diff, N)
        num = pair / (m * m)
        if num == 0:
            continue
        den = None
        for cw in prod_code:
            s = Fraction(0)
            for i in range(m):
                delta_word = tuple(a ^ b for a, b in zip(tup[i], cw))
                s += orc_line_norm(shape, delta_word, i)
            s /= m
            if den is None or s < den:
                den = s
        ratio = num / den
        if best is None or ratio < best:
            best = ratio
    return best


REP2 = [(0, 0), (1, 1)]


def rep2_codes(m):
    return [REP2] * m


def gf4_rep3():
    return orc_cyclic_code(GF4_MUL, 4, 3, (1, 1))


def compute_fixtures():
    fixtures = {}
    fixtures["rho_rep2_m2"] = orc_rho((2, 2), rep2_codes(2))
    fixtures["rho_rep2_m3"] = orc_rho((2, 2, 2), rep2_codes(3))
    r, w = orc_rho_r((2, 2), rep2_codes(2), 1)
    fixtures["rho_r_rep2_m2_T21"] = r
    fixtures["rho_r_rep2_m2_T21_witness"] = w
    r, w = orc_rho_r((2, 2, 2), rep2_codes(3), 1)
    fixtures["rho_r_rep2_m3_T31"] = r
    fixtures["rho_r_rep2_m3_T31_witness"] = w
    r, w = orc_rho_r((2, 2, 2), rep2_codes(3), 2)
    fixtures["rho_r_rep2_m3_T32"] = r
    fixtures["rho_r_rep2_m3_T32_witness"] = w
    fixtures["rho_a_rep2_m2"] = orc_rho_a((2, 2), rep2_codes(2))
    fixtures["rho_a_rep2_m3"] = orc_rho_a((2, 2, 2), rep2_codes(3))
    c31 = gf4_rep3()
    fixtures["rho_gf4_31_m2"] = orc_rho((3, 3), [c31, c31])
    fixtures["rho_a_gf4_31_m2"] = orc_rho_a((3, 3), [c31, c31])
    return fixtures


if __name__ == "__main__":
    for key, val in compute_fixtures().items():
        print(f"{key} = {val!r}")
