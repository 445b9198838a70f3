"""Product expansion: decompositions, exact tiny-scale constants, certificates.

A word c of the sum code C_1 (+) ... (+) C_m splits as c = a_1 + ... + a_m
with a_i in C^(i).  The expansion constant of the family is

    rho = min over nonzero c of  ||c|| / min over splittings of sum_i ||a_i||_i.

Upper-bound certificates rest on a covering argument: every support cell of
c is covered by a nonzero line of some part, so sum_i |a_i|_i is at least
the minimum number of axis-parallel lines covering supp(c).  When no line
meets the support twice, that minimum equals |supp(c)| exactly and the
certificate is tight; otherwise a greedy line-disjoint subset of the support
still gives a valid (possibly loose) lower bound on the cover size.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .codes import CyclicCode
from .gf_poly import GF2m
from .tensor import (
    CodeFamily,
    TensorWord,
    in_direction_code,
    line_weight,
    random_sum_codeword,
    sum_contains,
)

_AMBIGUITY_LIMIT = 1 << 24  # max enumerated decompositions per word
_SPAN_LIMIT = 1 << 20  # max enumerated sum-code words for rho_exact
_CHUNK = 1 << 16  # combos per vectorized block in the exhaustive search


@dataclass(frozen=True)
class Decomposition:
    """A splitting c = a_1 + ... + a_m with a_i in C^(i)."""

    parts: Tuple[TensorWord, ...]

    def total(self) -> TensorWord:
        acc = self.parts[0]
        for p in self.parts[1:]:
            acc = acc + p
        return acc

    def cost(self) -> Fraction:
        return sum(
            (line_weight(p, axis) for axis, p in enumerate(self.parts)),
            start=Fraction(0),
        )

    def validate(self, family: CodeFamily, target: TensorWord) -> None:
        if len(self.parts) != family.m:
            raise ValueError("wrong number of parts")
        for axis, (part, code) in enumerate(zip(self.parts, family.codes)):
            if not in_direction_code(part, code, axis):
                raise ValueError(f"part {axis} leaves C^({axis})")
        if self.total() != target:
            raise ValueError("parts do not sum to the target word")


# ----------------------------------------------------------------------
# The non-expanding witness word for rate-1/3 Reed-Solomon triples.
# ----------------------------------------------------------------------

def counterexample_word(field: GF2m, k: int) -> TensorWord:
    """Rescaled diagonal word of support n^2 in the cube [n]^3, n = 2^m - 1.

    The entry at (i, j, l) is w^(-kj - 2kl) when i + j + l = 0 mod n and 0
    otherwise.  For the rate-1/3 Reed-Solomon triple (k = n/3) this word lies
    in the sum code while every axis-parallel line meets its support exactly
    once, which pins every splitting cost at 1 and the expansion constant at
    or below 1/n.
    """
    n = field.order - 1
    if n % 3 != 0:
        raise ValueError(f"n = {n} is not divisible by 3")
    if k != n // 3:
        raise ValueError(f"expected k = n/3 = {n // 3}, got {k}")
    i, j, l = np.indices((n, n, n), dtype=np.int32)
    pow_table = np.array([field.omega_pow(e) for e in range(n)], dtype=np.uint8)
    vals = pow_table[(-(k * j) - 2 * k * l) % n]
    data = np.where((i + j + l) % n == 0, vals, 0).astype(np.uint8)
    return TensorWord(field, data)


def line_disjoint_support(word: TensorWord) -> bool:
    """True iff every axis-parallel line contains at most one support cell."""
    nz = word.data != 0
    return all(
        int(nz.sum(axis=axis).max(initial=0)) <= 1 for axis in range(len(word.shape))
    )


def line_cover_lower_bound(word: TensorWord) -> Tuple[int, bool]:
    """(L, tight): L lower-bounds the minimum axis-parallel line cover of
    the support.

    A set of support cells no two of which share a line forces one cover
    line per cell, so its size is a valid lower bound.  The greedy scan is
    exact (tight=True) precisely when the whole support is line-disjoint.
    """
    cells = np.argwhere(word.data != 0)
    m = len(word.shape)
    chosen: List[Tuple[int, ...]] = []
    seen = [set() for _ in range(m)]
    for cell in map(tuple, cells.tolist()):
        keys = [cell[:ax] + cell[ax + 1 :] for ax in range(m)]
        if any(key in seen[ax] for ax, key in enumerate(keys)):
            continue
        chosen.append(cell)
        for ax, key in enumerate(keys):
            seen[ax].add(key)
    tight = len(chosen) == len(cells)
    return len(chosen), tight


@dataclass(frozen=True)
class ExpansionCertificate:
    """Machine-checkable upper bound on the expansion constant of a family.

    For every splitting of the witness, sum_i ||a_i||_i >= L / max_i |L_i|,
    hence rho <= ||witness|| * max_i |L_i| / L.
    """

    witness: TensorWord
    instance: str
    bound: Fraction
    cover_lower_bound: int
    line_disjoint: bool
    tight: bool

    def to_text(self) -> str:
        lines = [
            "product-expansion-certificate v1",
            f"instance {self.instance}",
            f"bound {self.bound.numerator}/{self.bound.denominator}",
            f"cover-lower-bound {self.cover_lower_bound}",
            f"line-disjoint {'true' if self.line_disjoint else 'false'}",
            f"tight {'true' if self.tight else 'false'}",
            "witness",
            self.witness.to_text().rstrip("\n"),
            "end",
        ]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "ExpansionCertificate":
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != "product-expansion-certificate v1":
            raise ValueError("not a certificate")
        fields = {}
        i = 1
        while i < len(lines) and lines[i].strip() != "witness":
            key, _, val = lines[i].strip().partition(" ")
            fields[key] = val
            i += 1
        if i == len(lines) or lines[-1].strip() != "end":
            raise ValueError("malformed certificate")
        witness = TensorWord.from_text("\n".join(lines[i + 1 : -1]))
        num, _, den = fields["bound"].partition("/")
        return ExpansionCertificate(
            witness=witness,
            instance=fields["instance"],
            bound=Fraction(int(num), int(den)),
            cover_lower_bound=int(fields["cover-lower-bound"]),
            line_disjoint=fields["line-disjoint"] == "true",
            tight=fields["tight"] == "true",
        )


def certify_upper_bound(word: TensorWord, family: CodeFamily) -> ExpansionCertificate:
    """Build an expansion upper-bound certificate from a sum-code word."""
    if word.shape != family.shape:
        raise ValueError("word shape does not match the family")
    if word.weight() == 0:
        raise ValueError("zero word certifies nothing")
    if not sum_contains(word, family, method="auto"):
        raise ValueError("word is not in the sum code; certificate would be vacuous")
    L, tight = line_cover_lower_bound(word)
    disjoint = line_disjoint_support(word)
    lines_max = max(word.size // n for n in word.shape)
    bound = word.norm() * Fraction(lines_max, L)
    return ExpansionCertificate(
        witness=word,
        instance=family.label(),
        bound=bound,
        cover_lower_bound=L,
        line_disjoint=disjoint,
        tight=tight,
    )


def verify_certificate(cert: ExpansionCertificate, family: CodeFamily) -> bool:
    """Re-verify a certificate from scratch, independent of its producer."""
    w = cert.witness
    if w.shape != family.shape or w.field != family.field:
        return False
    if not sum_contains(w, family, method="auto"):
        return False
    L, tight = line_cover_lower_bound(w)
    if L != cert.cover_lower_bound or tight != cert.tight:
        return False
    if line_disjoint_support(w) != cert.line_disjoint:
        return False
    lines_max = max(w.size // n for n in w.shape)
    return cert.bound == w.norm() * Fraction(lines_max, L)


# ----------------------------------------------------------------------
# Decomposition search.
# ----------------------------------------------------------------------

class DecompositionSpace:
    """Linear parametrization of all splittings of sum-code words.

    Columns of Phi are the direction-code basis words (flattened); the
    kernel of Phi parametrizes the ambiguity coset of any fixed splitting.
    """

    def __init__(self, family: CodeFamily) -> None:
        self.family = family
        shape = family.shape
        self.N = prod(shape)
        cols: List[np.ndarray] = []
        self.slices: List[slice] = []
        start = 0
        for axis, code in enumerate(family.codes):
            basis = _direction_basis(code, shape, axis)
            cols.append(basis)
            self.slices.append(slice(start, start + basis.shape[0]))
            start += basis.shape[0]
        self.basis = np.concatenate(cols, axis=0)  # (D, N)
        self.D = self.basis.shape[0]
        self.phi = self.basis.T.copy()  # (N, D)
        self.kernel = linalg.kernel_basis(family.field, self.phi)  # (K, D)

    @property
    def ambiguity_dim(self) -> int:
        return self.kernel.shape[0]

    def particular(self, word: TensorWord) -> Optional[np.ndarray]:
        """One coefficient vector with Phi beta = word, or None."""
        return linalg.solve(self.family.field, self.phi, word.data.reshape(-1))

    def parts_from_coeffs(self, beta: np.ndarray) -> Tuple[TensorWord, ...]:
        field = self.family.field
        shape = self.family.shape
        parts = []
        for sl in self.slices:
            seg = beta[sl]
            flat = np.zeros(self.N, dtype=np.uint8)
            for idx in np.nonzero(seg)[0]:
                flat ^= field.scale_array(int(seg[idx]), self.basis[sl][idx])
            parts.append(TensorWord(field, flat.reshape(shape)))
        return tuple(parts)

    def _cost_weights(self) -> Tuple[List[int], int]:
        """Integer line-count weights so that cost = sum_i w_i |a_i|_i / denom."""
        shape = self.family.shape
        counts = [self.N // n for n in shape]
        denom = 1
        for c in counts:
            denom = denom * c // _gcd(denom, c)
        return [denom // c for c in counts], denom

    def search_min(self, base: np.ndarray) -> Tuple[np.ndarray, int, int]:
        """Exhaustive scan of the ambiguity coset for the cheapest splitting.

        Returns (coefficients, cost_numerator, cost_denominator); ties go to
        the lexicographically smallest coefficient vector.  The enumeration
        is chunked so memory stays bounded for large cosets.
        """
        field = self.family.field
        q = field.order
        K = self.ambiguity_dim
        total = q**K
        if total > _AMBIGUITY_LIMIT:
            raise ValueError("ambiguity space too large for exhaustive search")
        weights, denom = self._cost_weights()
        shape = self.family.shape
        table = field.mul_table
        base_parts = [
            _fold_segment(field, base[sl], self.basis[sl]) for sl in self.slices
        ]
        kern_parts = [
            [_fold_segment(field, self.kernel[j][sl], self.basis[sl]) for j in range(K)]
            for sl in self.slices
        ]
        best_cost: Optional[int] = None
        best_coeffs: Optional[np.ndarray] = None
        for start in range(0, total, _CHUNK):
            stop = min(start + _CHUNK, total)
            combos = _vector_range(q, K, start, stop)
            W = combos.shape[0]
            costs = np.zeros(W, dtype=np.int64)
            for axis, sl in enumerate(self.slices):
                flat = np.broadcast_to(base_parts[axis], (W, self.N)).copy()
                for j in range(K):
                    seg = kern_parts[axis][j]
                    if not seg.any():
                        continue
                    col = combos[:, j]
                    nz = col != 0
                    if nz.any():
                        flat[nz] ^= table[col[nz][:, None], seg[None, :]]
                cube = flat.reshape((W,) + shape)
                lines = np.any(cube != 0, axis=axis + 1).reshape(W, -1).sum(axis=1)
                costs += weights[axis] * lines
            idx = int(np.argmin(costs))
            if best_cost is None or int(costs[idx]) < best_cost:
                best_cost = int(costs[idx])
                best_coeffs = combos[idx].copy()
        assert best_cost is not None and best_coeffs is not None
        return best_coeffs, best_cost, denom


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _space_feasible(family: CodeFamily) -> bool:
    """Whether building the splitting parametrization is tractable.

    The matrix has N rows and sum_i k_i N / n_i columns; both are checked
    before any allocation so oversized instances fall back to
    certificate-only sampling.
    """
    N = prod(family.shape)
    D = sum(c.dimension * (N // c.length) for c in family.codes)
    return N <= 2048 and D <= 512


def _vector_range(q: int, length: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop-1 of the lexicographic q-ary vector enumeration."""
    if length == 0:
        return np.zeros((stop - start, 0), dtype=np.uint8)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((stop - start, length), dtype=np.uint8)
    for pos in range(length):
        out[:, length - 1 - pos] = (idx // (q**pos)) % q
    return out


def _fold_segment(field: GF2m, seg: np.ndarray, basis: np.ndarray) -> np.ndarray:
    flat = np.zeros(basis.shape[1], dtype=np.uint8)
    for idx in np.nonzero(seg)[0]:
        flat ^= field.scale_array(int(seg[idx]), basis[idx])
    return flat


def _direction_basis(code: CyclicCode, shape: Sequence[int], axis: int) -> np.ndarray:
    """Basis of C^(axis) as flattened words, one generator per line."""
    shape = tuple(shape)
    N = prod(shape)
    G = code.generator_matrix
    k = code.dimension
    rows = []
    fixed_ranges = [range(shape[i]) for i in range(len(shape)) if i != axis]
    for coords in itertools.product(*fixed_ranges):
        idx: List[object] = list(coords)
        idx.insert(axis, slice(None))
        for r in range(k):
            arr = np.zeros(shape, dtype=np.uint8)
            arr[tuple(idx)] = G[r]
            rows.append(arr.reshape(-1))
    return np.array(rows, dtype=np.uint8).reshape(-1, N)


def min_decomposition(
    word: TensorWord,
    family: CodeFamily,
    strategy: str = "exhaustive",
    seed: int = 0,
    restarts: int = 8,
    space: Optional[DecompositionSpace] = None,
) -> Tuple[Decomposition, Fraction]:
    """Minimum-cost splitting (exhaustive) or a greedy upper bound.

    Exhaustive mode scans the full ambiguity coset and is a global minimizer;
    ties resolve to the lexicographically smallest ambiguity coefficients.
    local_search mode runs seeded coordinate descent and only upper-bounds
    the optimum.
    """
    if space is None:
        space = DecompositionSpace(family)
    base = space.particular(word)
    if base is None:
        raise ValueError("word is not in the sum code; no decomposition exists")
    if strategy == "exhaustive":
        coeffs, cost_num, denom = space.search_min(base)
        beta = base.copy()
        for j in range(space.ambiguity_dim):
            c = int(coeffs[j])
            if c:
                beta ^= family.field.scale_array(c, space.kernel[j])
        cost = Fraction(cost_num, denom)
    elif strategy == "local_search":
        beta, cost = _local_search(space, base, seed, restarts)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    dec = Decomposition(space.parts_from_coeffs(beta))
    dec.validate(family, word)
    assert dec.cost() == cost
    return dec, cost


def _local_search(
    space: DecompositionSpace, base: np.ndarray, seed: int, restarts: int
) -> Tuple[np.ndarray, Fraction]:
    field = space.family.field
    q = field.order
    K = space.ambiguity_dim
    rng = random.Random(seed)

    def cost_of(beta: np.ndarray) -> Fraction:
        parts = space.parts_from_coeffs(beta)
        return Decomposition(parts).cost()

    best_beta = base.copy()
    best_cost = cost_of(best_beta)
    for restart in range(restarts):
        coeffs = (
            [0] * K if restart == 0 else [rng.randrange(q) for _ in range(K)]
        )
        beta = base.copy()
        for j, c in enumerate(coeffs):
            if c:
                beta ^= field.scale_array(c, space.kernel[j])
        cur = cost_of(beta)
        improved = True
        while improved:
            improved = False
            for j in range(K):
                best_local = cur
                best_val = None
                for s in range(1, q):
                    cand = beta ^ field.scale_array(s, space.kernel[j])
                    c = cost_of(cand)
                    if c < best_local:
                        best_local, best_val = c, s
                if best_val is not None:
                    beta ^= field.scale_array(best_val, space.kernel[j])
                    cur = best_local
                    improved = True
        if cur < best_cost:
            best_cost, best_beta = cur, beta
    return best_beta, best_cost


def sum_code_words(family: CodeFamily, space: Optional[DecompositionSpace] = None) -> np.ndarray:
    """All words of the sum code, flattened to (count, N)."""
    if space is None:
        space = DecompositionSpace(family)
    field = family.field
    image = linalg.row_space_basis(field, space.basis)
    dim = image.shape[0]
    if field.order**dim > _SPAN_LIMIT:
        raise ValueError("sum code too large to enumerate")
    msgs = linalg.enumerate_vectors(field.order, dim)
    return linalg.matmul(field, msgs, image)


def rho_exact(family: CodeFamily) -> Fraction:
    """Exact expansion constant by full enumeration (tiny instances)."""
    space = DecompositionSpace(family)
    words = sum_code_words(family, space)
    N = space.N
    best: Optional[Fraction] = None
    for row in words:
        wt = int(np.count_nonzero(row))
        if wt == 0:
            continue
        word = TensorWord(family.field, row.reshape(family.shape))
        _, cost = min_decomposition(word, family, "exhaustive", space=space)
        ratio = Fraction(wt, N) / cost
        if best is None or ratio < best:
            best = ratio
    if best is None:
        raise ValueError("sum code is trivial; expansion constant undefined")
    return best


# ----------------------------------------------------------------------
# Sampled upper bounds.
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SampledExpansionReport:
    instance: str
    seed: int
    sample_count: int
    certified_bound: Optional[Fraction]
    heuristic_min: Optional[Fraction]
    details: Tuple[Tuple[str, Fraction], ...]


def rho_upper_sampled(
    family: CodeFamily,
    samples: int,
    seed: int,
    local_search_budget: int = 8,
) -> SampledExpansionReport:
    """Sampled upper bound on the expansion constant.

    Every sampled sum-code word contributes a certificate ratio (always a
    valid upper bound on rho).  Words whose splitting cost can be probed
    directly (a known generating splitting, or exhaustive/local search on a
    small ambiguity space) additionally contribute a heuristic ratio, which
    is labeled as such because a found splitting only upper-bounds the cost.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.Generator(np.random.PCG64(seed))
    pool: List[Tuple[str, TensorWord, Optional[Decomposition]]] = []

    n = family.shape[0]
    if (
        family.m == 3
        and len(set(family.shape)) == 1
        and all(c.is_rs_primitive for c in family.codes)
        and len({c.dimension for c in family.codes}) == 1
        and family.codes[0].dimension * 3 == n
    ):
        witness = counterexample_word(family.field, n // 3)
        pool.append(("counterexample", witness, None))

    for idx in range(samples):
        word, parts = random_sum_codeword(family, rng)
        pool.append((f"random-{idx}", word, Decomposition(tuple(parts))))

    space: Optional[DecompositionSpace] = None
    searchable = False
    if _space_feasible(family):
        space = DecompositionSpace(family)
        searchable = (
            family.field.order**space.ambiguity_dim <= _AMBIGUITY_LIMIT
        )

    certified: Optional[Fraction] = None
    heuristic: Optional[Fraction] = None
    details: List[Tuple[str, Fraction]] = []
    searched = 0
    for name, word, known in pool:
        if word.weight() == 0:
            continue
        cert = certify_upper_bound(word, family)
        details.append((f"{name}:certificate", cert.bound))
        if certified is None or cert.bound < certified:
            certified = cert.bound
        best_cost: Optional[Fraction] = None
        if known is not None:
            known.validate(family, word)
            best_cost = known.cost()
        if searchable and searched < local_search_budget:
            _, cost = min_decomposition(word, family, "exhaustive", space=space)
            searched += 1
            if best_cost is None or cost < best_cost:
                best_cost = cost
        if best_cost is not None and best_cost > 0:
            ratio = word.norm() / best_cost
            details.append((f"{name}:heuristic", ratio))
            if heuristic is None or ratio < heuristic:
                heuristic = ratio
    return SampledExpansionReport(
        instance=family.label(),
        seed=seed,
        sample_count=samples,
        certified_bound=certified,
        heuristic_min=heuristic,
        details=tuple(details),
    )
