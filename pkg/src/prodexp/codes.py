"""Cyclic and general linear codes over GF(2^m).

A `CyclicCode` of length n is given by a check polynomial p | x^n - 1:
a word (a_0..a_{n-1}) belongs to the code iff p(x) a(x) = 0 mod (x^n - 1).
Its dimension equals deg p, its generator polynomial is (x^n - 1) / p.

Distances are exact rationals (`fractions.Fraction`); where only
bounded-distance decoding applies, operations return a `DistanceBound`
interval instead of pretending to know the exact value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .gf_poly import (
    GF2m,
    MultiPoly,
    poly_from_univariate,
    unipoly_divmod,
    unipoly_monic,
    unipoly_mul,
    unipoly_reciprocal,
    unipoly_trim,
    x_pow_n_minus_1,
)

#: enumeration guards: full codeword arrays are cached below this size,
#: brute-force scans are refused above the second bound.
_CACHE_LIMIT = 1 << 21
_BRUTE_LIMIT = 1 << 24


@dataclass(frozen=True)
class DistanceBound:
    """Interval [lower, upper] certified to contain a normalized distance."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("empty distance interval")

    @staticmethod
    def exactly(value: Fraction) -> "DistanceBound":
        return DistanceBound(value, value)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise ValueError(f"distance only known to lie in {self}")
        return self.lower

    def __add__(self, other: "DistanceBound") -> "DistanceBound":
        return DistanceBound(self.lower + other.lower, self.upper + other.upper)

    def scaled(self, f: Fraction) -> "DistanceBound":
        if f < 0:
            raise ValueError("negative scale")
        return DistanceBound(self.lower * f, self.upper * f)

    def __repr__(self) -> str:
        if self.exact:
            return f"DistanceBound({self.lower})"
        return f"DistanceBound({self.lower}..{self.upper})"


class CyclicCode:
    """Length-n cyclic code over GF(2^m) defined by its check polynomial."""

    def __init__(self, field: GF2m, length: int, check_coeffs: Sequence[int]) -> None:
        if length < 1:
            raise ValueError("length must be positive")
        p = unipoly_trim(check_coeffs)
        if not p:
            raise ValueError("check polynomial must be nonzero")
        if len(p) - 1 > length:
            raise ValueError("check polynomial degree exceeds length")
        xn1 = x_pow_n_minus_1(field, length)
        g, rem = unipoly_divmod(field, xn1, p)
        if rem:
            raise ValueError("check polynomial does not divide x^n - 1")
        self.field = field
        self.length = length
        self.check_coeffs: Tuple[int, ...] = p
        self.dimension = len(p) - 1
        self.generator_coeffs: Tuple[int, ...] = g
        self._rs_root_count: Optional[int] = None  # set by rs_primitive
        self._codewords: Optional[np.ndarray] = None
        self._min_distance: Optional[int] = None
        self._decode_ctx = None

    # -- basic structure ------------------------------------------------
    @property
    def generator_matrix(self) -> np.ndarray:
        """k x n matrix whose rows are x^j * g(x), j = 0..k-1."""
        k, n = self.dimension, self.length
        G = np.zeros((k, n), dtype=np.uint8)
        g = self.generator_coeffs
        for j in range(k):
            for i, c in enumerate(g):
                G[j, (i + j) % n] = c
        return G

    def check_poly(self) -> MultiPoly:
        return poly_from_univariate(self.field, self.check_coeffs, self.length)

    @property
    def is_rs_primitive(self) -> bool:
        return self._rs_root_count is not None

    def __repr__(self) -> str:
        return f"CyclicCode(GF(2^{self.field.degree}), n={self.length}, k={self.dimension})"

    def label(self) -> str:
        if self.is_rs_primitive:
            return f"rs_gf{self.field.order}_n{self.length}_k{self.dimension}"
        return f"cyclic_gf{self.field.order}_n{self.length}_k{self.dimension}"

    # -- membership ------------------------------------------------------
    def contains(self, word: Sequence[int] | np.ndarray) -> bool:
        w = np.asarray(word, dtype=np.uint8)
        if w.shape != (self.length,):
            raise ValueError(f"word length {w.shape} != {self.length}")
        return bool(self.contains_batch(w[None, :])[0])

    def contains_batch(self, words: np.ndarray) -> np.ndarray:
        """Vectorized membership for a (W, n) array of words."""
        words = np.asarray(words, dtype=np.uint8)
        if words.ndim != 2 or words.shape[1] != self.length:
            raise ValueError("expected a (W, n) array")
        table = self.field.mul_table
        syn = np.zeros_like(words)
        for j, pj in enumerate(self.check_coeffs):
            if pj == 0:
                continue
            rolled = np.roll(words, j, axis=1)
            syn ^= rolled if pj == 1 else table[pj][rolled]
        return ~syn.any(axis=1)

    # -- encoding / enumeration ------------------------------------------
    def encode(self, message: Sequence[int] | np.ndarray) -> np.ndarray:
        m = np.asarray(message, dtype=np.uint8).reshape(1, -1)
        return self.encode_batch(m)[0]

    def encode_batch(self, messages: np.ndarray) -> np.ndarray:
        messages = np.asarray(messages, dtype=np.uint8)
        if messages.shape[-1] != self.dimension:
            raise ValueError("message length mismatch")
        return linalg.matmul(self.field, messages, self.generator_matrix)

    def codewords(self) -> np.ndarray:
        """All q^k codewords as a (q^k, n) array (cached; small codes only)."""
        count = self.field.order**self.dimension
        if count > _CACHE_LIMIT:
            raise ValueError(f"code with {count} words is too large to enumerate")
        if self._codewords is None:
            msgs = linalg.enumerate_vectors(self.field.order, self.dimension)
            self._codewords = self.encode_batch(msgs)
        return self._codewords

    def random_codeword(self, rng: np.random.Generator) -> np.ndarray:
        msg = rng.integers(0, self.field.order, size=self.dimension, dtype=np.uint8)
        return self.encode(msg)

    # -- duality -----------------------------------------------------------
    def dual(self) -> "CyclicCode":
        """The dual code, again as a cyclic code.

        The reciprocal of the check polynomial generates the dual, so the
        dual's check polynomial is (x^n - 1) divided by that reciprocal.
        """
        field, n = self.field, self.length
        g_dual = unipoly_monic(field, unipoly_reciprocal(field, self.check_coeffs))
        check_dual, rem = unipoly_divmod(field, x_pow_n_minus_1(field, n), g_dual)
        assert not rem
        return CyclicCode(field, n, check_dual)

    def parity_matrix(self) -> np.ndarray:
        """(n-k) x n matrix of dual-code generators; syndrome = word @ H^T."""
        return self.dual().generator_matrix

    def as_linear(self) -> "LinearCode":
        return LinearCode(self.field, self.generator_matrix, self.parity_matrix())


def repetition(field: GF2m, length: int) -> CyclicCode:
    """[n, 1] repetition code: check polynomial x - 1."""
    return CyclicCode(field, length, (1, 1))


def full_code(field: GF2m, length: int) -> CyclicCode:
    """The whole space F_q^n as a cyclic code (check polynomial x^n - 1)."""
    return CyclicCode(field, length, x_pow_n_minus_1(field, length))


def rs_primitive(field: GF2m, rate_num: int, rate_den: int) -> CyclicCode:
    """Primitive Reed-Solomon code of length n = 2^m - 1 and rate num/den.

    The check polynomial is (x - 1)(x - w)...(x - w^(k-1)) with
    k = n * rate_num / rate_den, so codewords are exactly the evaluation
    vectors of polynomials of degree < k at (1, w^-1, ..., w^(1-n)).
    """
    n = field.order - 1
    if n < 1:
        raise ValueError("field too small for a primitive RS code")
    if (n * rate_num) % rate_den != 0:
        raise ValueError(f"n={n} not compatible with rate {rate_num}/{rate_den}")
    k = n * rate_num // rate_den
    if not 1 <= k <= n:
        raise ValueError(f"rate gives dimension {k} outside [1, {n}]")
    p: Tuple[int, ...] = (1,)
    for i in range(k):
        p = unipoly_mul(field, p, (field.omega_pow(i), 1))
    code = CyclicCode(field, n, p)
    code._rs_root_count = k
    return code


class LinearCode:
    """Generic linear code given by generator rows (and optional parity rows)."""

    def __init__(
        self,
        field: GF2m,
        generator: np.ndarray,
        parity: Optional[np.ndarray] = None,
    ) -> None:
        G = np.asarray(generator, dtype=np.uint8)
        if G.ndim != 2:
            raise ValueError("generator must be a matrix")
        self.field = field
        self.length = G.shape[1]
        self.generator = G
        if parity is None:
            parity = linalg.kernel_basis(field, G)
        H = np.asarray(parity, dtype=np.uint8)
        self.parity = H
        prod = linalg.matmul(field, G, H.T)
        if prod.any():
            raise ValueError("generator and parity rows are not orthogonal")
        if linalg.rank(field, G) + linalg.rank(field, H) != self.length:
            raise ValueError("rank(G) + rank(H) != n")
        self.dimension = linalg.rank(field, G)

    def contains(self, word: Sequence[int] | np.ndarray) -> bool:
        w = np.asarray(word, dtype=np.uint8)
        syn = linalg.matmul(self.field, w[None, :], self.parity.T)
        return not syn.any()

    def codewords(self) -> np.ndarray:
        count = self.field.order**self.dimension
        if count > _CACHE_LIMIT:
            raise ValueError("code too large to enumerate")
        basis = linalg.row_space_basis(self.field, self.generator)
        msgs = linalg.enumerate_vectors(self.field.order, basis.shape[0])
        return linalg.matmul(self.field, msgs, basis)

    def __repr__(self) -> str:
        return f"LinearCode(GF(2^{self.field.degree}), n={self.length}, k={self.dimension})"


# ----------------------------------------------------------------------
# Module-level operations.
# ----------------------------------------------------------------------

def cyclic_contains(code: CyclicCode, word: Sequence[int] | np.ndarray) -> bool:
    return code.contains(word)


def dual_code(code: CyclicCode) -> CyclicCode:
    return code.dual()


def min_distance(code: CyclicCode | LinearCode, mode: str = "exhaustive") -> int:
    """Exact minimum Hamming weight of a nonzero codeword."""
    if mode == "known_rs":
        if not isinstance(code, CyclicCode) or not code.is_rs_primitive:
            raise ValueError("known_rs mode requires a primitive RS code")
        d = code.length - code.dimension + 1
        if code.field.order**code.dimension <= _CACHE_LIMIT:
            assert d == min_distance(code, mode="exhaustive")
        return d
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(code, CyclicCode) and code._min_distance is not None:
        return code._min_distance
    count = code.field.order**code.dimension
    if count > _BRUTE_LIMIT:
        raise ValueError("instance too large for exhaustive minimum distance")
    cws = code.codewords()
    weights = np.count_nonzero(cws, axis=1)
    nz = weights[weights > 0]
    if nz.size == 0:
        raise ValueError("zero code has no minimum distance")
    d = int(nz.min())
    if isinstance(code, CyclicCode):
        code._min_distance = d
    return d


def normalized_min_distance(code: CyclicCode | LinearCode, mode: str = "exhaustive") -> Fraction:
    return Fraction(min_distance(code, mode), code.length)


def low_degree_evaluation_vectors(field: GF2m, k: int) -> np.ndarray:
    """Evaluation vectors at (1, w^-1, ..., w^(1-n)) of every polynomial of
    degree < k, as a (q^k, n) array.

    Row r holds (p(1), p(w^-1), ..., p(w^(1-n))) where the coefficients of p
    are the base-q digits of r.  These vectors are exactly the codewords of
    the primitive RS code whose check polynomial has roots 1, w, .., w^(k-1).
    """
    n = field.order - 1
    coeffs = linalg.enumerate_vectors(field.order, k)
    V = np.zeros((k, n), dtype=np.uint8)
    for j in range(k):
        for i in range(n):
            V[j, i] = field.omega_pow(-i * j)
    return linalg.matmul(field, coeffs, V)


# -- decoding ------------------------------------------------------------

def _brute_nearest(word: np.ndarray, code: CyclicCode | LinearCode) -> Tuple[np.ndarray, int]:
    count = code.field.order**code.dimension
    if count <= _CACHE_LIMIT:
        chunks = [code.codewords()]
    else:
        chunks = _codeword_chunks(code)
    best: Optional[int] = None
    best_row: Optional[Tuple[int, ...]] = None
    for cws in chunks:
        dists = np.count_nonzero(cws ^ word[None, :], axis=1)
        d = int(dists.min())
        if best is not None and d > best:
            continue
        # deterministic tie-break: lexicographically smallest codeword
        row = min(map(tuple, cws[dists == d].tolist()))
        if best is None or d < best or (d == best and row < best_row):
            best, best_row = d, row
    assert best is not None and best_row is not None
    return np.array(best_row, dtype=np.uint8), best


def _codeword_chunks(code: CyclicCode | LinearCode):
    """Stream codewords in blocks for scans too large to cache."""
    q = code.field.order
    k = code.dimension
    if isinstance(code, CyclicCode):
        basis = code.generator_matrix
    else:
        basis = linalg.row_space_basis(code.field, code.generator)
    total = q**k
    block = 1 << 18
    for start in range(0, total, block):
        stop = min(start + block, total)
        idx = np.arange(start, stop, dtype=np.int64)
        msgs = np.zeros((stop - start, k), dtype=np.uint8)
        for pos in range(k):
            msgs[:, k - 1 - pos] = (idx // (q**pos)) % q
        yield linalg.matmul(code.field, msgs, basis)


def _decode_context(code: CyclicCode):
    """Precomputed evaluation points / power tables for the RS decoder."""
    if code._decode_ctx is None:
        field, n, k = code.field, code.length, code.dimension
        e = (n - k) // 2
        pts = np.array([field.omega_pow(-i) for i in range(n)], dtype=np.uint8)
        maxdeg = max(e + k, e + 1)
        powers = np.zeros((n, maxdeg), dtype=np.uint8)
        powers[:, 0] = 1
        for u in range(1, maxdeg):
            powers[:, u] = field.mul_arrays(powers[:, u - 1], pts)
        code._decode_ctx = (e, pts, powers)
    return code._decode_ctx


def bounded_distance_decode(
    code: CyclicCode, word: Sequence[int] | np.ndarray
) -> Optional[Tuple[np.ndarray, int]]:
    """Unique decoding of a primitive RS code within radius floor((d-1)/2).

    Solves for an error locator E (monic, degree e) and a product polynomial
    Q (degree < e + k) with Q(x_i) = r_i E(x_i) at every evaluation point,
    then recovers the message polynomial as Q / E.  Returns (codeword,
    distance) or None when no codeword lies within the radius.
    """
    if not code.is_rs_primitive:
        raise ValueError("bounded-distance decoding requires a primitive RS code")
    field, n, k = code.field, code.length, code.dimension
    w = np.asarray(word, dtype=np.uint8)
    if w.shape != (n,):
        raise ValueError("word length mismatch")
    if code.contains(w):
        return w.copy(), 0
    e, pts, powers = _decode_context(code)
    if e == 0:
        return None
    table = field.mul_table
    # unknowns: E_0..E_{e-1}, Q_0..Q_{e+k-1}; row i is the constraint at x_i
    A = np.zeros((n, 2 * e + k), dtype=np.uint8)
    A[:, :e] = table[w[:, None], powers[:, :e]]
    A[:, e:] = powers[:, : e + k]
    rhs = table[w, powers[:, e]]
    sol = linalg.solve(field, A, rhs)
    if sol is None:
        return None
    E = list(int(v) for v in sol[:e]) + [1]
    Q = [int(v) for v in sol[e:]]
    f, rem = unipoly_divmod(field, Q, E)
    if rem:
        return None
    if len(f) > k:
        return None
    # evaluate f at the points by Horner
    cw = np.zeros(n, dtype=np.uint8)
    for c in reversed(unipoly_trim(f) or (0,)):
        cw = table[cw, pts] ^ c
    dist = int(np.count_nonzero(cw ^ w))
    if dist > e:
        return None
    return cw, dist


def nearest_codeword(
    word: Sequence[int] | np.ndarray,
    code: CyclicCode | LinearCode,
    strategy: str = "brute",
) -> Optional[Tuple[np.ndarray, int]]:
    """Nearest-codeword search; bounded mode returns None beyond its radius."""
    w = np.asarray(word, dtype=np.uint8)
    if strategy == "brute":
        if code.field.order**code.dimension > _BRUTE_LIMIT:
            raise ValueError("instance too large for brute-force decoding")
        return _brute_nearest(w, code)
    if strategy == "bounded_distance":
        if not isinstance(code, CyclicCode):
            raise ValueError("bounded_distance requires a cyclic RS code")
        return bounded_distance_decode(code, w)
    raise ValueError(f"unknown strategy {strategy!r}")


def decoding_radius(code: CyclicCode) -> int:
    if not code.is_rs_primitive:
        raise ValueError("decoding radius defined here for primitive RS codes")
    return (code.length - code.dimension) // 2


def delta_to_code(
    word: Sequence[int] | np.ndarray,
    code: CyclicCode | LinearCode,
    strategy: str = "auto",
) -> DistanceBound:
    """Normalized distance from a word to the code, as a certified interval.

    Brute force gives a point interval.  When only bounded-distance decoding
    applies and it fails, the result is the certified interval
    (radius + 1, n - k) / n: the true distance exceeds the decoding radius
    and never exceeds the covering-radius bound n - k.
    """
    w = np.asarray(word, dtype=np.uint8)
    n = code.length
    if strategy == "auto":
        big = code.field.order**code.dimension > 1 << 16
        if big and isinstance(code, CyclicCode) and code.is_rs_primitive:
            strategy = "bounded_distance"
        else:
            strategy = "brute"
    if strategy == "brute":
        res = nearest_codeword(w, code, "brute")
        assert res is not None
        return DistanceBound.exactly(Fraction(res[1], n))
    res = nearest_codeword(w, code, "bounded_distance")
    if res is not None:
        return DistanceBound.exactly(Fraction(res[1], n))
    e = decoding_radius(code)  # type: ignore[arg-type]
    return DistanceBound(Fraction(e + 1, n), Fraction(n - code.dimension, n))
