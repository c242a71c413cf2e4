"""Permutations in one-line notation (0-based tuples) and graded signs."""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations


def all_perms(n: int):
    return list(permutations(range(n)))


def compose(s, t):
    """(s o t)(k) = s[t[k]]."""
    return tuple(s[k] for k in t)


def inverse(s):
    out = [0] * len(s)
    for k, v in enumerate(s):
        out[v] = k
    return tuple(out)


def transposition(n: int, h: int):
    """tau_h (1-based h) swapping h and h+1."""
    s = list(range(n))
    s[h - 1], s[h] = s[h], s[h - 1]
    return tuple(s)


@lru_cache(maxsize=None)
def word(s) -> tuple:
    """Adjacent transpositions (1-based) with s = tau_w1 o tau_w2 o ... ."""
    cur = list(s)
    swaps = []
    n = len(cur)
    changed = True
    while changed:
        changed = False
        for k in range(n - 1):
            if cur[k] > cur[k + 1]:
                cur[k], cur[k + 1] = cur[k + 1], cur[k]
                swaps.append(k + 1)
                changed = True
    # s o tau_a1 o ... o tau_ak = id, so s = tau_ak o ... o tau_a1
    return tuple(reversed(swaps))


def koszul_sign(s, degrees) -> int:
    """Sign of reordering (x_1..x_n) into (x_{s^-1(1)}, ..., x_{s^-1(n)})."""
    odd = 0
    n = len(s)
    for a in range(n):
        if degrees[a] % 2 == 0:
            continue
        for b in range(a + 1, n):
            if degrees[b] % 2 and s[a] > s[b]:
                odd ^= 1
    return -1 if odd else 1


def block_perm(s, i: int, n: int):
    """Block permutation for (pi . s) o_i rho = (pi o_{s(i)} rho) . block_perm.

    ``i`` is 1-based; ``rho`` has arity ``n``.
    """
    m = len(s)
    sinv = inverse(s)
    # z-positions of pi o_{s(i)} rho read the y-argument sinv[k]; y_i is the block
    xpos = []  # xpos[z_position] = x index
    for k in range(m):
        j = sinv[k]
        if j < i - 1:
            xpos.append(j)
        elif j == i - 1:
            xpos.extend(range(i - 1, i - 1 + n))
        else:
            xpos.append(j + n - 1)
    # the block permutation t has t^-1 = xpos
    return inverse(tuple(xpos))
