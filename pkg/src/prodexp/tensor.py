"""m-dimensional words over GF(2^m): lines, flats, direction norms, membership.

Index convention: an entry is addressed as (i_1, ..., i_m), zero-based.  A
line in direction j fixes every coordinate except the j-th.  All weights and
distances are exact `Fraction`s.

A word belongs to the product code of a family (C_1, ..., C_m) iff its
restriction to every line in every direction lies in the corresponding
component code.  The sum code (the dual of the tensor product of the duals)
is tested either through the product of the check polynomials (equal-length
cyclic families) or through orthogonality against the dual tensor basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import List, Sequence, Tuple

import numpy as np

from . import linalg
from .codes import CyclicCode, DistanceBound, nearest_codeword
from .gf_poly import GF2m


@dataclass(frozen=True, eq=False)
class TensorWord:
    """Immutable m-dimensional array of field elements."""

    field: GF2m
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.uint8)
        if arr.max(initial=0) >= self.field.order:
            raise ValueError("entry outside the field")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @staticmethod
    def zeros(field: GF2m, shape: Sequence[int]) -> "TensorWord":
        return TensorWord(field, np.zeros(tuple(shape), dtype=np.uint8))

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def weight(self) -> int:
        return int(np.count_nonzero(self.data))

    def norm(self) -> Fraction:
        return Fraction(self.weight(), self.size)

    def __add__(self, other: "TensorWord") -> "TensorWord":
        if other.field != self.field or other.shape != self.shape:
            raise ValueError("shape or field mismatch")
        return TensorWord(self.field, self.data ^ other.data)

    __sub__ = __add__  # characteristic 2

    def scale(self, s: int) -> "TensorWord":
        return TensorWord(self.field, self.field.scale_array(s, self.data))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TensorWord)
            and other.field == self.field
            and np.array_equal(other.data, self.data)
        )

    def __repr__(self) -> str:
        return f"TensorWord(GF(2^{self.field.degree}), shape={self.shape}, |supp|={self.weight()})"

    # -- text serialization -------------------------------------------------
    def to_text(self) -> str:
        """Header `shape n_1 ... n_m field 2^m`, then hex entries row-major,
        one innermost row per line."""
        head = "shape " + " ".join(str(n) for n in self.shape)
        head += f" field 2^{self.field.degree}"
        flat = self.data.reshape(-1, self.shape[-1])
        rows = [" ".join(format(int(v), "x") for v in row) for row in flat]
        return "\n".join([head] + rows) + "\n"

    @staticmethod
    def from_text(text: str) -> "TensorWord":
        from .gf_poly import field_make

        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty tensor text")
        toks = lines[0].split()
        if toks[0] != "shape" or "field" not in toks:
            raise ValueError(f"bad header {lines[0]!r}")
        fi = toks.index("field")
        shape = tuple(int(t) for t in toks[1:fi])
        base, _, deg = toks[fi + 1].partition("^")
        if base != "2":
            raise ValueError("only characteristic-2 fields are supported")
        field = field_make(int(deg))
        vals = [int(t, 16) for ln in lines[1:] for t in ln.split()]
        if len(vals) != prod(shape):
            raise ValueError("entry count does not match the shape")
        return TensorWord(field, np.array(vals, dtype=np.uint8).reshape(shape))


@dataclass(frozen=True)
class Flat:
    """Axis-parallel flat: free axes plus a base point zeroed on those axes."""

    free_axes: Tuple[int, ...]
    base: Tuple[int, ...]

    def __post_init__(self) -> None:
        if tuple(sorted(set(self.free_axes))) != self.free_axes:
            raise ValueError("free axes must be strictly increasing")
        for i in self.free_axes:
            if self.base[i] != 0:
                raise ValueError("base must be zero on free axes")

    @property
    def k(self) -> int:
        return len(self.free_axes)


@dataclass(frozen=True)
class CodeFamily:
    """One component code per axis; lengths define the grid shape."""

    codes: Tuple[CyclicCode, ...]

    def __post_init__(self) -> None:
        if not self.codes:
            raise ValueError("empty family")
        f = self.codes[0].field
        if any(c.field != f for c in self.codes):
            raise ValueError("all component codes must share a field")

    @staticmethod
    def power(code: CyclicCode, m: int) -> "CodeFamily":
        return CodeFamily((code,) * m)

    @property
    def field(self) -> GF2m:
        return self.codes[0].field

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(c.length for c in self.codes)

    @property
    def m(self) -> int:
        return len(self.codes)

    def restrict(self, axes: Sequence[int]) -> "CodeFamily":
        return CodeFamily(tuple(self.codes[i] for i in axes))

    def label(self) -> str:
        labels = [c.label() for c in self.codes]
        if len(set(labels)) == 1:
            return f"{labels[0]}^{self.m}"
        return "x".join(labels)


# ----------------------------------------------------------------------
# Flats and restrictions.
# ----------------------------------------------------------------------

def enumerate_flats(shape: Sequence[int], k: int) -> List[Tuple[Flat, Fraction]]:
    """All k-flats with size-proportional probability weights.

    Each flat of free-axis set I has size prod(shape[i], i in I); its weight
    is that size divided by the total over all k-flats.  Weights sum to 1,
    and are uniform whenever all n_i agree.
    """
    shape = tuple(shape)
    m = len(shape)
    if not 1 <= k <= m - 1:
        raise ValueError(f"flat dimension {k} outside [1, {m - 1}]")
    out: List[Tuple[Flat, Fraction]] = []
    total = 0
    for axes in itertools.combinations(range(m), k):
        size = prod(shape[i] for i in axes)
        fixed = [i for i in range(m) if i not in axes]
        total += size * prod(shape[i] for i in fixed)
        for coords in itertools.product(*(range(shape[i]) for i in fixed)):
            base = [0] * m
            for i, v in zip(fixed, coords):
                base[i] = v
            out.append((Flat(axes, tuple(base)), Fraction(size)))
    return [(flat, Fraction(size, total)) for flat, size in out]


def restrict(word: TensorWord, flat: Flat) -> TensorWord:
    """k-dimensional word read along the free axes, axis order ascending."""
    if len(flat.base) != len(word.shape):
        raise ValueError("flat does not match the word's rank")
    idx = tuple(
        slice(None) if i in flat.free_axes else flat.base[i]
        for i in range(len(word.shape))
    )
    return TensorWord(word.field, word.data[idx])


def lines_as_matrix(arr: np.ndarray, axis: int) -> np.ndarray:
    """All direction-`axis` lines of an array as rows of an (L, n) matrix."""
    moved = np.moveaxis(arr, axis, -1)
    return moved.reshape(-1, arr.shape[axis])


def line_count(word: TensorWord, axis: int) -> int:
    """Number of nonzero direction-`axis` lines."""
    return int(np.any(word.data != 0, axis=axis).sum())


def line_weight(word: TensorWord, axis: int) -> Fraction:
    """Fraction of direction-`axis` lines on which the word is nonzero."""
    if not 0 <= axis < len(word.shape):
        raise ValueError("axis out of range")
    total = word.size // word.shape[axis]
    return Fraction(line_count(word, axis), total)


# ----------------------------------------------------------------------
# Membership.
# ----------------------------------------------------------------------

def in_direction_code(word: TensorWord, code: CyclicCode, axis: int) -> bool:
    """True iff every direction-`axis` line lies in `code`."""
    if word.shape[axis] != code.length:
        raise ValueError("axis length does not match the code")
    return bool(code.contains_batch(lines_as_matrix(word.data, axis)).all())


def product_contains(word: TensorWord, family: CodeFamily) -> bool:
    if word.shape != family.shape:
        raise ValueError("word shape does not match the family")
    return all(
        in_direction_code(word, code, axis) for axis, code in enumerate(family.codes)
    )


def _sum_method(family: CodeFamily, method: str) -> str:
    if method == "auto":
        lengths = {c.length for c in family.codes}
        return "check_poly" if len(lengths) == 1 else "dual_tensor"
    if method not in ("check_poly", "dual_tensor"):
        raise ValueError(f"unknown method {method!r}")
    return method


def sum_contains(word: TensorWord, family: CodeFamily, method: str = "auto") -> bool:
    """Membership in C_1 (+) ... (+) C_m, the dual of the dual tensor product.

    check_poly: multiply by every check polynomial p_i(x_i) modulo the cyclic
    ideal and test for the zero residue (equal-length cyclic families).
    dual_tensor: contract every axis with the dual generator matrix and test
    the syndrome tensor for zero (any family).
    """
    return bool(sum_contains_batch(word.data[None], family, method)[0])


def sum_contains_batch(
    words: np.ndarray, family: CodeFamily, method: str = "auto"
) -> np.ndarray:
    """Vectorized sum-code membership for a (W, n_1, ..., n_m) array."""
    words = np.asarray(words, dtype=np.uint8)
    if words.shape[1:] != family.shape:
        raise ValueError("word shape does not match the family")
    method = _sum_method(family, method)
    field = family.field
    if method == "check_poly":
        lengths = {c.length for c in family.codes}
        if len(lengths) != 1:
            raise ValueError("check_poly method needs equal lengths")
        acc = words
        for axis, code in enumerate(family.codes):
            acc = _cyclic_convolve_axis(field, acc, code.check_coeffs, axis + 1)
        return ~acc.reshape(words.shape[0], -1).any(axis=1)
    syn = words
    for axis, code in enumerate(family.codes):
        H = code.parity_matrix()
        syn = linalg.apply_matrix_axis(field, H, syn, axis + 1)
    return ~syn.reshape(words.shape[0], -1).any(axis=1)


def _cyclic_convolve_axis(
    field: GF2m, arr: np.ndarray, coeffs: Sequence[int], axis: int
) -> np.ndarray:
    """Multiply by the univariate polynomial `coeffs` acting on one axis,
    modulo x^n - 1 (i.e. cyclic convolution along the axis)."""
    table = field.mul_table
    out = np.zeros_like(arr)
    for j, cj in enumerate(coeffs):
        if cj == 0:
            continue
        rolled = np.roll(arr, j, axis=axis)
        out ^= rolled if cj == 1 else table[cj][rolled]
    return out


# ----------------------------------------------------------------------
# Direction codes C^(i): encoding, sampling, decoding.
# ----------------------------------------------------------------------

def encode_direction(code: CyclicCode, messages: np.ndarray, axis: int) -> TensorWord:
    """Expand messages (length k on `axis`) to a word of C^(axis)."""
    arr = linalg.apply_matrix_axis(
        code.field, code.generator_matrix.T, np.asarray(messages, dtype=np.uint8), axis
    )
    return TensorWord(code.field, arr)


def random_direction_word(
    code: CyclicCode, shape: Sequence[int], axis: int, rng: np.random.Generator
) -> TensorWord:
    msg_shape = list(shape)
    msg_shape[axis] = code.dimension
    msgs = rng.integers(0, code.field.order, size=tuple(msg_shape), dtype=np.uint8)
    return encode_direction(code, msgs, axis)


def random_sum_codeword(
    family: CodeFamily, rng: np.random.Generator
) -> Tuple[TensorWord, List[TensorWord]]:
    """Uniform word of the sum code, returned with the generating parts."""
    parts = [
        random_direction_word(code, family.shape, axis, rng)
        for axis, code in enumerate(family.codes)
    ]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total, parts


def random_product_codeword(family: CodeFamily, rng: np.random.Generator) -> TensorWord:
    msg_shape = tuple(c.dimension for c in family.codes)
    arr = rng.integers(0, family.field.order, size=msg_shape, dtype=np.uint8)
    for axis, code in enumerate(family.codes):
        arr = linalg.apply_matrix_axis(family.field, code.generator_matrix.T, arr, axis)
    return TensorWord(family.field, arr)


def product_codewords(family: CodeFamily) -> np.ndarray:
    """All codewords of the product code, flattened to (count, N)."""
    dims = tuple(c.dimension for c in family.codes)
    count = family.field.order ** prod(dims)
    if count > 1 << 20:
        raise ValueError("product code too large to enumerate")
    msgs = linalg.enumerate_vectors(family.field.order, prod(dims))
    cur = msgs.reshape((msgs.shape[0],) + dims)
    for axis, code in enumerate(family.codes):
        cur = linalg.apply_matrix_axis(family.field, code.generator_matrix.T, cur, axis + 1)
    return cur.reshape(msgs.shape[0], -1)


def delta_to_direction(
    word: TensorWord, code: CyclicCode, axis: int, strategy: str = "auto"
) -> DistanceBound:
    """Normalized distance to C^(axis): the sum of per-line distances."""
    from .codes import delta_to_code

    mat = lines_as_matrix(word.data, axis)
    total = DistanceBound.exactly(Fraction(0))
    per_line = Fraction(code.length, word.size)
    for row in mat:
        total = total + delta_to_code(row, code, strategy).scaled(per_line)
    return total


def nearest_in_direction(
    word: TensorWord, family: CodeFamily, axis: int, strategy: str = "brute"
) -> Tuple[TensorWord, DistanceBound]:
    """Line-by-line nearest decoding in one direction.

    Lines that a bounded-distance decoder cannot resolve are left unchanged
    and contribute a certified interval to the distance; the returned word is
    then a best-effort representative rather than a certified minimizer.
    """
    code = family.codes[axis]
    mat = lines_as_matrix(word.data, axis).copy()
    n = code.length
    total = DistanceBound.exactly(Fraction(0))
    per_line = Fraction(n, word.size)
    for r in range(mat.shape[0]):
        res = nearest_codeword(mat[r], code, strategy)
        if res is None:
            from .codes import decoding_radius

            e = decoding_radius(code)
            total = total + DistanceBound(
                Fraction(e + 1, n), Fraction(n - code.dimension, n)
            ).scaled(per_line)
        else:
            cw, dist = res
            mat[r] = cw
            total = total + DistanceBound.exactly(Fraction(dist, n)).scaled(per_line)
    moved_shape = tuple(word.shape[i] for i in range(len(word.shape)) if i != axis) + (n,)
    arr = np.moveaxis(mat.reshape(moved_shape), -1, axis)
    return TensorWord(word.field, arr), total


def delta_to_product(
    word: TensorWord, family: CodeFamily, strategy: str = "brute"
) -> DistanceBound:
    """Normalized distance to the product code by brute enumeration."""
    if strategy != "brute":
        raise ValueError("only brute-force product distance is implemented")
    cws = product_codewords(family)
    flat = word.data.reshape(-1)
    dists = np.count_nonzero(cws ^ flat[None, :], axis=1)
    return DistanceBound.exactly(Fraction(int(dists.min()), word.size))
