"""Bitmask exterior algebra: states of Lambda over m letters are ints 0..2^m-1.

Bit j set means letter j is present; words are kept sorted ascending, and all
signs come from counting set bits below the touched position.  Letter maps are
returned as (src, dst, sign) index arrays, so applying an operator to a
coefficient vector (or to a stack of vectors along axis 0) is a fancy-indexed
assignment with no Python-level loop over states.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def popcounts(m: int) -> np.ndarray:
    states = np.arange(1 << m, dtype=np.int64)
    counts = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        counts += (states >> j) & 1
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=None)
def _signs_below(m: int, i: int) -> np.ndarray:
    """(-1)^{# set bits below position i} for every state."""
    states = np.arange(1 << m, dtype=np.int64)
    cnt = np.zeros(1 << m, dtype=np.int64)
    for j in range(i):
        cnt += (states >> j) & 1
    out = 1 - 2 * (cnt & 1)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def wedge_map(m: int, i: int):
    """e_i wedge (state src) = sign * (state dst), over states without letter i."""
    states = np.arange(1 << m, dtype=np.int64)
    src = states[((states >> i) & 1) == 0]
    dst = src | (1 << i)
    sign = _signs_below(m, i)[src]
    return src, dst, sign


@lru_cache(maxsize=None)
def contract_map(m: int, i: int):
    """iota_i (state src) = sign * (state dst), over states containing letter i."""
    states = np.arange(1 << m, dtype=np.int64)
    src = states[((states >> i) & 1) == 1]
    dst = src & ~(1 << i)
    sign = _signs_below(m, i)[src]
    return src, dst, sign


def _accumulate(out, vec, src, dst, sign, coeff) -> None:
    weights = coeff * sign
    if vec.ndim > 1:
        weights = weights.reshape((-1,) + (1,) * (vec.ndim - 1))
    out[dst] += weights * vec[src]


def add_wedge(out: np.ndarray, vec: np.ndarray, m: int, i: int, coeff=1.0) -> None:
    _accumulate(out, vec, *wedge_map(m, i), coeff)


def add_contract(out: np.ndarray, vec: np.ndarray, m: int, i: int, coeff=1.0) -> None:
    _accumulate(out, vec, *contract_map(m, i), coeff)


def apply_word(vec: np.ndarray, m: int, word) -> np.ndarray:
    """Apply a word of ('w'|'c', letter) ops; rightmost entry acts first."""
    cur = vec
    for kind, i in reversed(word):
        out = np.zeros_like(cur)
        if kind == "w":
            add_wedge(out, cur, m, i)
        else:
            add_contract(out, cur, m, i)
        cur = out
    return cur


@lru_cache(maxsize=None)
def complement_sign(m: int) -> np.ndarray:
    """sign(S, S^c): parity of the shuffle sorting (S asc, S^c asc) to (0..m-1)."""
    dim = 1 << m
    states = np.arange(dim, dtype=np.int64)
    inv = np.zeros(dim, dtype=np.int64)
    for b in range(m):
        in_comp = ((states >> b) & 1) == 0
        cnt = np.zeros(dim, dtype=np.int64)
        for a in range(b + 1, m):
            cnt += (states >> a) & 1
        inv += np.where(in_comp, cnt, 0)
    out = 1 - 2 * (inv & 1)
    out.setflags(write=False)
    return out


def top_coefficient(f1: np.ndarray, f2: np.ndarray, m: int) -> complex:
    """Coefficient of the full top form in f1 wedge f2."""
    states = np.arange(1 << m, dtype=np.int64)
    comp = (~states) & ((1 << m) - 1)
    return complex(np.sum(f1 * f2[comp] * complement_sign(m)))


class LetterWordOp:
    """Sum of weighted wedge/contract words acting on Lambda of m letters."""

    def __init__(self, m: int, terms: list[tuple[float, tuple]]):
        self.m = m
        self.terms = [(c, tuple(w)) for c, w in terms if c != 0.0]

    @property
    def parity(self) -> str:
        """Degree parity of the operator: each letter op is odd."""
        parities = {len(w) % 2 for _, w in self.terms}
        if len(parities) > 1:
            return "mixed"
        return "odd" if parities == {1} else "even"

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(vec))
        for coeff, word in self.terms:
            out = out + coeff * apply_word(vec, self.m, word)
        return out

    def matrix(self, dtype=float) -> np.ndarray:
        dim = 1 << self.m
        if dim > 1 << 12:
            raise MemoryError(f"refusing to materialize a {dim}x{dim} operator")
        return self.apply(np.eye(dim, dtype=dtype))

    def __add__(self, other: "LetterWordOp") -> "LetterWordOp":
        if self.m != other.m:
            raise ValueError("operators act on different exterior algebras")
        return LetterWordOp(self.m, self.terms + other.terms)

    def scaled(self, a: float) -> "LetterWordOp":
        return LetterWordOp(self.m, [(a * c, w) for c, w in self.terms])


def derivation_terms(letter_matrix: np.ndarray) -> list[tuple[float, tuple]]:
    """Derivation extension of a letter map e_b -> sum_d M[d, b] e_d."""
    terms = []
    m = letter_matrix.shape[0]
    for d in range(m):
        for b in range(m):
            if letter_matrix[d, b] != 0.0:
                terms.append((float(letter_matrix[d, b]), (("w", d), ("c", b))))
    return terms


def embed_states(small_vec: np.ndarray, positions: tuple[int, ...], m_big: int) -> np.ndarray:
    """Include Lambda over a letter subset into Lambda over all letters.

    positions must be ascending so sorted words stay sorted (all signs +1).
    """
    if list(positions) != sorted(positions):
        raise ValueError("letter positions must be ascending")
    m_small = len(positions)
    out = np.zeros(1 << m_big, dtype=small_vec.dtype)
    idx = np.zeros(1 << m_small, dtype=np.int64)
    for j, pos in enumerate(positions):
        idx |= (((np.arange(1 << m_small) >> j) & 1) << pos)
    out[idx] = small_vec
    return out
