"""Mod 2 Steenrod algebra arithmetic on admissible monomials.

A monomial Sq^{a_1} ... Sq^{a_k} is a tuple (a_1, ..., a_k) of positive
integers; it is admissible when a_i >= 2 a_{i+1}.  Elements are frozensets of
admissible tuples (coefficients mod 2).
"""

from functools import lru_cache


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2, zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & ~n) == 0 else 0


def adem(a: int, b: int) -> frozenset:
    """Admissible expansion of Sq^a Sq^b for 0 < a < 2b.

    Standard form: sum over c <= a/2 of C(b-c-1, a-2c) Sq^{a+b-c} Sq^c.
    """
    if not (0 < a < 2 * b):
        raise ValueError(f"Sq^{a}Sq^{b} is already admissible")
    out = set()
    for c in range(a // 2 + 1):
        if binom2(b - c - 1, a - 2 * c):
            term = (a + b - c, c) if c else (a + b - c,)
            out ^= {term}
    return frozenset(out)


def adem_even(t: int, s: int) -> frozenset:
    """Sq^{2t} Sq^s for s > t in the even-excess form
    sum_j C(s-t+j-1, 2j) Sq^{t+s+j} Sq^{t-j}."""
    if not s > t:
        raise ValueError("need s > t")
    out = set()
    for j in range(t + 1):
        if binom2(s - t + j - 1, 2 * j):
            c = t - j
            term = (t + s + j, c) if c else (t + s + j,)
            out ^= {term}
    return frozenset(out)


@lru_cache(maxsize=None)
def reduce_word(word: tuple) -> frozenset:
    """Admissible expansion of an arbitrary monomial."""
    word = tuple(x for x in word if x)
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < 2 * b:
            out = set()
            for term in adem(a, b):
                out ^= reduce_word(word[:i] + term + word[i + 2:])
            return frozenset(out)
    return frozenset({word})


def multiply(x: frozenset, y: frozenset) -> frozenset:
    out = set()
    for u in x:
        for v in y:
            out ^= reduce_word(u + v)
    return frozenset(out)
