"""
Slow reference enumeration of exceptional classes on blow-ups of CP^2

Plain recursion over d <= 6 and m_q in [-1, 6] keeps the classes with
E.E = -1 and c1(E) = 1; a candidate is accepted when it pairs non-negatively
with every class accepted before it (lower degrees first).
"""

from typing import List, Tuple

MAX_DEGREE = 6
M_RANGE = range(-1, 7)


def _vectors(N: int, target_sum: int, target_sq: int) -> List[Tuple[int, ...]]:
    out = []

    def walk(acc, s, sq):
        remaining = N - len(acc)
        if sq > target_sq:
            return
        if remaining == 0:
            if s == target_sum and sq == target_sq:
                out.append(tuple(acc))
            return
        # Cauchy-Schwarz on what is left
        gap = target_sum - s
        if gap * gap > remaining * (target_sq - sq):
            return
        for m in M_RANGE:
            walk(acc + [m], s + m, sq + m * m)

    walk([], 0, 0)
    return out


def brute_force_exceptional(N: int) -> List[Tuple[int, Tuple[int, ...]]]:
    accepted: List[Tuple[int, Tuple[int, ...]]] = []
    for d in range(MAX_DEGREE + 1):
        for m in _vectors(N, 3 * d - 1, d * d + 1):
            dots = (d * d2 - sum(a * b for a, b in zip(m, m2)) for d2, m2 in accepted)
            if all(x >= 0 for x in dots):
                accepted.append((d, m))
    return sorted(accepted)
