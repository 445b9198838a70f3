"""Axis-parallel flat tests, robustness, agreement testability, and the
executable inequality checks that tie them together.

Definitions implemented here (all distances normalized, all arithmetic
exact):

  rho_r(T, F)  = min over words x with delta(x, prod F) > 0 of
                 E_{I in T} delta(x|_I, (prod F)|_I) / delta(x, prod F)

  rho_a(F)     = min over tuples (c_1..c_m), c_i in C^(i), not all equal, of
                 E_{i,j} ||c_i - c_j||  /  min_{c in prod F} E_i ||c_i - c||_i

Flats are drawn with probability proportional to their size, which for a
k-flat test collapses to: pick a direction set uniformly at random, then a
flat of that direction uniformly (uniform over all flats when the n_i are
equal).  Restrictions of the product code to an axis-parallel flat are the
product code of the restricted family, which is exact for the nonzero cyclic
component codes used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import prod
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .codes import (
    CyclicCode,
    DistanceBound,
    delta_to_code,
    min_distance,
    nearest_codeword,
)
from .expansion import counterexample_word
from .tensor import (
    CodeFamily,
    Flat,
    TensorWord,
    delta_to_product,
    enumerate_flats,
    lines_as_matrix,
    product_codewords,
    product_contains,
    random_product_codeword,
    restrict,
)

_WORD_SPACE_LIMIT = 1 << 24


@dataclass(frozen=True)
class FlatTest:
    """The axis-parallel k-flat test on a fixed grid."""

    shape: Tuple[int, ...]
    k: int
    flats: Tuple[Tuple[Flat, Fraction], ...]

    @staticmethod
    def build(shape: Sequence[int], k: int) -> "FlatTest":
        return FlatTest(tuple(shape), k, tuple(enumerate_flats(shape, k)))

    def label(self) -> str:
        return f"T_{len(self.shape)}^{self.k}"


def line_test(shape: Sequence[int]) -> FlatTest:
    return FlatTest.build(shape, 1)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one estimated or exactly computed constant."""

    quantity: str  # rho | rho_r | rho_a
    value: Fraction | Tuple[Fraction, Fraction]
    mode: str  # exact | sampled | certificate
    instance: str
    seed: Optional[int] = None
    sample_count: Optional[int] = None
    detail: Dict[str, str] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode == "exact" and not isinstance(self.value, Fraction):
            raise ValueError("exact mode requires a point value")


@dataclass(frozen=True)
class CheckReport:
    """Outcome of an executable inequality check."""

    name: str
    instance: str
    quantities: Dict[str, Fraction]
    inequalities: Tuple[Tuple[str, Fraction, Fraction], ...]  # (desc, lhs, rhs); holds iff lhs >= rhs
    mode: str = "exact"
    seed: Optional[int] = None
    sample_count: Optional[int] = None

    @property
    def holds(self) -> bool:
        return all(lhs >= rhs for _, lhs, rhs in self.inequalities)


# ----------------------------------------------------------------------
# Expectation of local distances over a flat test.
# ----------------------------------------------------------------------

def _restricted_product_distance(
    sub: TensorWord, subfam: CodeFamily, strategy: str
) -> DistanceBound:
    if subfam.m == 1:
        return delta_to_code(sub.data, subfam.codes[0], strategy)
    return delta_to_product(sub, subfam)


def test_expectation(
    word: TensorWord,
    test: FlatTest,
    family: CodeFamily,
    strategy: str = "auto",
) -> DistanceBound:
    """E over flats of the distance from the restriction to the restricted
    product code; exact whenever every restriction is decodable exactly."""
    if word.shape != test.shape or word.shape != family.shape:
        raise ValueError("shape mismatch")
    total = DistanceBound.exactly(Fraction(0))
    for flat, weight in test.flats:
        sub = restrict(word, flat)
        subfam = family.restrict(flat.free_axes)
        d = _restricted_product_distance(sub, subfam, strategy)
        total = total + d.scaled(weight)
    return total


test_expectation.__test__ = False  # keep pytest from collecting the operation


# ----------------------------------------------------------------------
# Exact robustness by full word-space enumeration (vectorized).
# ----------------------------------------------------------------------

def _flat_cell_indices(shape: Tuple[int, ...], flat: Flat) -> np.ndarray:
    """Flattened cell indices of a flat, row-major over ascending free axes."""
    grids = []
    for i in range(len(shape)):
        if i in flat.free_axes:
            grids.append(np.arange(shape[i]))
        else:
            grids.append(np.array([flat.base[i]]))
    mesh = np.meshgrid(*grids, indexing="ij")
    return np.ravel_multi_index([g.reshape(-1) for g in mesh], shape)


def _min_distance_to_rows(words: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Per-word minimum Hamming distance to any row of `rows`."""
    best = np.full(words.shape[0], words.shape[1] + 1, dtype=np.int64)
    for row in rows:
        d = np.count_nonzero(words ^ row[None, :], axis=1)
        np.minimum(best, d, out=best)
    return best


def _exact_ratio_min(
    num: np.ndarray, den: np.ndarray, num_scale: int, den_scale: int
) -> Tuple[Fraction, int]:
    """Exact min over i of (num[i]/num_scale) / (den[i]/den_scale), den>0."""
    mask = den > 0
    approx = num[mask].astype(np.float64) / den[mask].astype(np.float64)
    m0 = approx.min()
    shortlist = np.nonzero(mask)[0][approx <= m0 * (1 + 1e-9) + 1e-12]
    best: Optional[Fraction] = None
    best_idx = -1
    for i in shortlist:
        r = Fraction(int(num[i]) * den_scale, int(den[i]) * num_scale)
        if best is None or r < best:
            best, best_idx = r, int(i)
    assert best is not None
    return best, best_idx


def rho_r_exact(test: FlatTest, family: CodeFamily) -> Fraction:
    """Exact robustness of a flat test by enumerating the whole word space."""
    shape = family.shape
    if test.shape != shape:
        raise ValueError("test grid does not match the family")
    N = prod(shape)
    q = family.field.order
    total = q**N
    if total > _WORD_SPACE_LIMIT:
        raise ValueError("word space too large for exact robustness")
    prod_cws = product_codewords(family)
    if prod_cws.shape[0] == total:
        raise ValueError("degenerate family: no word lies outside the product code")

    flat_idx = []
    size_total = 0
    sub_cws_cache: Dict[Tuple[int, ...], np.ndarray] = {}
    for flat, _weight in test.flats:
        idx = _flat_cell_indices(shape, flat)
        size_total += idx.size
        key = flat.free_axes
        if key not in sub_cws_cache:
            sub_cws_cache[key] = product_codewords(family.restrict(key))
        flat_idx.append((idx, key))

    # E = num / size_total; delta = dmin / N; ratio = num * N / (size_total * dmin)
    best: Optional[Fraction] = None
    chunk = 1 << 18
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        words = _enumerate_vector_range(q, N, start, stop)
        dmin = _min_distance_to_rows(words, prod_cws)
        num = np.zeros(words.shape[0], dtype=np.int64)
        for idx, key in flat_idx:
            num += _min_distance_to_rows(words[:, idx], sub_cws_cache[key])
        if not (dmin > 0).any():
            continue
        value, _ = _exact_ratio_min(num, dmin, size_total, N)
        if best is None or value < best:
            best = value
    assert best is not None
    return best


def _enumerate_vector_range(q: int, length: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((stop - start, length), dtype=np.uint8)
    for pos in range(length):
        out[:, length - 1 - pos] = (idx // (q**pos)) % q
    return out


def robustness_ratio(
    word: TensorWord,
    test: FlatTest,
    family: CodeFamily,
    strategy: str = "auto",
) -> Optional[Fraction]:
    """Upper bound on the robustness ratio of one word; None for codewords.

    The numerator expectation is upper-bounded (failed line decodes fall back
    to the covering-radius bound) and the global distance is lower-bounded by
    the largest single-direction distance and by the expectation itself, so
    the quotient always upper-bounds the word's true ratio.
    """
    if product_contains(word, family):
        return None
    num = test_expectation(word, test, family, strategy)
    den_lower = num.lower
    if test.k == 1:
        for axis, code in enumerate(family.codes):
            direction = DistanceBound.exactly(Fraction(0))
            per_line = Fraction(code.length, word.size)
            for row in lines_as_matrix(word.data, axis):
                direction = direction + delta_to_code(row, code, strategy).scaled(per_line)
            den_lower = max(den_lower, direction.lower)
    if den_lower == 0:
        raise ValueError("word outside the product code has zero distance bound")
    return num.upper / den_lower


def _exact_word_ratio(
    word: TensorWord, test: FlatTest, family: CodeFamily
) -> Optional[Fraction]:
    """Exact robustness ratio of one word via brute-force distances."""
    d = delta_to_product(word, family)
    if d.value == 0:
        return None
    num = test_expectation(word, test, family, strategy="brute")
    return num.value / d.value


@dataclass(frozen=True)
class SampledRobustnessReport:
    instance: str
    test: str
    seed: int
    sample_count: int
    value: Fraction  # min ratio over the pool: an upper bound on rho_r
    ratios: Tuple[Tuple[str, Fraction], ...]
    skipped: int


def _adversarial_pool(
    family: CodeFamily, rng: np.random.Generator, corruption_rounds: int = 8
) -> List[Tuple[str, TensorWord]]:
    """Codeword single-line corruptions, diagonal patterns, plus the
    rescaled-diagonal witness where the family supports it."""
    pool: List[Tuple[str, TensorWord]] = []
    shape = family.shape
    field = family.field
    n = shape[0]
    if (
        family.m == 3
        and len(set(shape)) == 1
        and all(c.is_rs_primitive for c in family.codes)
        and len({c.dimension for c in family.codes}) == 1
        and family.codes[0].dimension * 3 == n
    ):
        pool.append(("counterexample", counterexample_word(field, n // 3)))
    for r in range(corruption_rounds):
        base = random_product_codeword(family, rng)
        for axis, code in enumerate(family.codes):
            arr = base.data.copy()
            mat = lines_as_matrix(arr, axis)
            li = int(rng.integers(0, mat.shape[0]))
            repl = code.random_codeword(rng)
            for _ in range(8):
                if not np.array_equal(repl, mat[li]):
                    break
                repl = code.random_codeword(rng)
            mat[li] = repl
            moved_shape = tuple(shape[i] for i in range(len(shape)) if i != axis) + (
                shape[axis],
            )
            word = TensorWord(field, np.moveaxis(mat.reshape(moved_shape), -1, axis))
            pool.append((f"line-corrupt-{r}-ax{axis}", word))
    if len(set(shape)) == 1:
        n = shape[0]
        m = len(shape)
        idx = np.indices(shape, dtype=np.int64)
        diag_mask = (sum(idx) % n) == 0
        pool.append(("diagonal", TensorWord(field, diag_mask.astype(np.uint8))))
        if n > 1:
            k = max(1, n // 3)
            pow_table = np.array([field.omega_pow(e) for e in range(n)], dtype=np.uint8)
            exps = sum((j * k * idx[j]) % n for j in range(m)) % n
            scaled = np.where(diag_mask, pow_table[exps], 0).astype(np.uint8)
            pool.append(("diagonal-scaled", TensorWord(field, scaled)))
    return pool


def rho_r_sampled_upper(
    test: FlatTest,
    family: CodeFamily,
    samples: int,
    seed: int,
    strategy: str = "auto",
    jobs: int = 1,
) -> SampledRobustnessReport:
    """Minimum robustness ratio over a seeded adversarial + random pool.

    Every reported ratio upper-bounds the corresponding word's true ratio,
    so the minimum is a certified upper bound on rho_r.  Codewords in the
    pool are skipped (their ratio is 0/0).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = _adversarial_pool(family, rng)
    shape = family.shape
    for i in range(samples):
        arr = rng.integers(0, family.field.order, size=shape, dtype=np.uint8)
        pool.append((f"uniform-{i}", TensorWord(family.field, arr)))

    tasks = [(name, word, test, family, strategy) for name, word in pool]
    if jobs > 1:
        results = _parallel_map(_ratio_task, tasks, jobs)
    else:
        results = [_ratio_task(t) for t in tasks]

    ratios: List[Tuple[str, Fraction]] = []
    skipped = 0
    for name, ratio in results:
        if ratio is None:
            skipped += 1
        else:
            ratios.append((name, ratio))
    if not ratios:
        raise ValueError("every pool word was a codeword; nothing to report")
    value = min(r for _, r in ratios)
    return SampledRobustnessReport(
        instance=family.label(),
        test=test.label(),
        seed=seed,
        sample_count=samples,
        value=value,
        ratios=tuple(ratios),
        skipped=skipped,
    )


def _ratio_task(args) -> Tuple[str, Optional[Fraction]]:
    name, word, test, family, strategy = args
    return name, robustness_ratio(word, test, family, strategy)


def _parallel_map(fn, items, jobs: int):
    """Order-preserving parallel map; results are worker-count independent."""
    from concurrent.futures import ProcessPoolExecutor
    import multiprocessing

    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# ----------------------------------------------------------------------
# Agreement testability.
# ----------------------------------------------------------------------

def _direction_space_words(family: CodeFamily, axis: int) -> np.ndarray:
    """All words of C^(axis), flattened to (count, N)."""
    code = family.codes[axis]
    shape = family.shape
    n_lines = prod(shape) // shape[axis]
    dim = code.dimension * n_lines
    if family.field.order**dim > 1 << 20:
        raise ValueError("direction code too large to enumerate")
    msgs = linalg.enumerate_vectors(family.field.order, dim)
    msg_shape = list(shape)
    msg_shape[axis] = code.dimension
    cur = msgs.reshape((msgs.shape[0],) + tuple(msg_shape))
    out = linalg.apply_matrix_axis(family.field, code.generator_matrix.T, cur, axis + 1)
    return out.reshape(msgs.shape[0], -1)


def rho_a_exact(family: CodeFamily) -> Fraction:
    """Exact agreement testability by enumerating all tuples (tiny instances).

    Pairwise disagreement uses the plain normalized Hamming weight; the
    distance to the common product codeword uses direction line weights, as
    the two sides of the definition prescribe.
    """
    m = family.m
    if m < 2:
        raise ValueError("agreement testability needs at least two directions")
    shape = family.shape
    N = prod(shape)
    spaces = [_direction_space_words(family, axis) for axis in range(m)]
    total = prod(s.shape[0] for s in spaces)
    if total > 1 << 20:
        raise ValueError("tuple space too large for exact agreement testability")
    prod_cws = product_codewords(family)
    line_totals = [N // n for n in shape]

    def line_count_flat(flat: np.ndarray, axis: int) -> int:
        cube = flat.reshape(shape)
        return int(np.any(cube != 0, axis=axis).sum())

    best: Optional[Fraction] = None
    import itertools as _it

    for choice in _it.product(*(range(s.shape[0]) for s in spaces)):
        cs = [spaces[i][choice[i]] for i in range(m)]
        pair_sum = 0
        for i in range(m):
            for j in range(i + 1, m):
                pair_sum += 2 * int(np.count_nonzero(cs[i] ^ cs[j]))
        if pair_sum == 0:
            continue  # fully agreeing tuple: both sides vanish
        num = Fraction(pair_sum, m * m * N)
        den_best: Optional[Fraction] = None
        for cw in prod_cws:
            s = Fraction(0)
            for i in range(m):
                s += Fraction(line_count_flat(cs[i] ^ cw, i), line_totals[i])
            if den_best is None or s < den_best:
                den_best = s
        assert den_best is not None and den_best > 0
        ratio = num / (den_best / m)
        if best is None or ratio < best:
            best = ratio
    if best is None:
        raise ValueError("no non-degenerate tuple exists")
    return best


def agreement_ratio_sampled(
    tuple_words: Sequence[TensorWord], family: CodeFamily, strategy: str = "auto"
) -> Optional[Fraction]:
    """Heuristic agreement ratio of one tuple on larger instances.

    The inner minimization over product codewords is replaced by the best of
    the iterated directional decodes of each c_i, so the returned value only
    estimates the tuple's true ratio (the candidate codeword upper-bounds the
    denominator's minimum).  Exact computation should be preferred whenever
    the instance allows it.
    """
    from .tensor import nearest_in_direction

    m = family.m
    N = prod(family.shape)
    pair_sum = 0
    for i in range(m):
        for j in range(i + 1, m):
            pair_sum += 2 * (tuple_words[i] + tuple_words[j]).weight()
    if pair_sum == 0:
        return None
    num = Fraction(pair_sum, m * m * N)
    candidates: List[TensorWord] = []
    for i in range(m):
        cand = tuple_words[i]
        for _ in range(m):
            for axis in range(m):
                cand, _d = nearest_in_direction(cand, family, axis, strategy)
            if product_contains(cand, family):
                break
        if product_contains(cand, family):
            candidates.append(cand)
    if not candidates:
        return None
    den_best: Optional[Fraction] = None
    from .tensor import line_weight

    for cand in candidates:
        s = sum(
            (line_weight(tuple_words[i] + cand, i) for i in range(m)),
            start=Fraction(0),
        )
        if den_best is None or s < den_best:
            den_best = s
    if den_best == 0:
        return None
    return num / (den_best / m)


# ----------------------------------------------------------------------
# Executable inequality checks.
# ----------------------------------------------------------------------

def check_robust_agreement(family: CodeFamily) -> CheckReport:
    """Exact two-sided relation between line-test robustness and agreement:

        rho_r >= rho_a / 4
        rho_a >= rho_r / (rho_r + 1) * min_i delta(C_i)
    """
    rr = rho_r_exact(line_test(family.shape), family)
    ra = rho_a_exact(family)
    dmin = min(
        Fraction(min_distance(c, "exhaustive"), c.length) for c in family.codes
    )
    return CheckReport(
        name="robust_agreement",
        instance=family.label(),
        quantities={"rho_r_T1": rr, "rho_a": ra, "min_delta": dmin},
        inequalities=(
            ("rho_r >= rho_a/4", rr, ra / 4),
            ("rho_a >= rho_r/(rho_r+1)*min_delta", ra, rr / (rr + 1) * dmin),
        ),
    )


def check_composition(
    code: CyclicCode,
    m: int,
    k1: int,
    k2: int,
    mode: str = "exact",
    samples: int = 64,
    seed: int = 0,
) -> CheckReport:
    """Composition bound rho_r(T_m^k1) >= rho_r(T_m^k2) * rho_r(T_k2^k1).

    Exact mode computes all three constants by enumeration.  Sampled mode
    evaluates the two m-dimensional sides on a shared adversarial + random
    pool (exact per-word ratios; the pool minima replace the true minima)
    and is labeled accordingly.
    """
    if not 1 <= k1 < k2 < m:
        raise ValueError(f"need 1 <= k1 < k2 < m, got k1={k1}, k2={k2}, m={m}")
    fam_m = CodeFamily.power(code, m)
    fam_k2 = CodeFamily.power(code, k2)
    inner = rho_r_exact(FlatTest.build(fam_k2.shape, k1), fam_k2)
    if mode == "exact":
        lhs = rho_r_exact(FlatTest.build(fam_m.shape, k1), fam_m)
        outer = rho_r_exact(FlatTest.build(fam_m.shape, k2), fam_m)
        return CheckReport(
            name="composition",
            instance=fam_m.label(),
            quantities={
                f"rho_r_T{m}^{k1}": lhs,
                f"rho_r_T{m}^{k2}": outer,
                f"rho_r_T{k2}^{k1}": inner,
            },
            inequalities=((f"T{m}^{k1} >= T{m}^{k2} * T{k2}^{k1}", lhs, outer * inner),),
        )
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = _adversarial_pool(fam_m, rng)
    for i in range(samples):
        arr = rng.integers(0, code.field.order, size=fam_m.shape, dtype=np.uint8)
        pool.append((f"uniform-{i}", TensorWord(code.field, arr)))
    test1 = FlatTest.build(fam_m.shape, k1)
    test2 = FlatTest.build(fam_m.shape, k2)
    lhs_min: Optional[Fraction] = None
    outer_min: Optional[Fraction] = None
    for _name, word in pool:
        r1 = _exact_word_ratio(word, test1, fam_m)
        if r1 is None:
            continue
        r2 = _exact_word_ratio(word, test2, fam_m)
        assert r2 is not None
        lhs_min = r1 if lhs_min is None else min(lhs_min, r1)
        outer_min = r2 if outer_min is None else min(outer_min, r2)
    if lhs_min is None or outer_min is None:
        raise ValueError("pool contained only codewords")
    return CheckReport(
        name="composition",
        instance=fam_m.label(),
        quantities={
            f"rho_r_T{m}^{k1}_pool": lhs_min,
            f"rho_r_T{m}^{k2}_pool": outer_min,
            f"rho_r_T{k2}^{k1}": inner,
        },
        inequalities=(
            (f"T{m}^{k1} >= T{m}^{k2} * T{k2}^{k1} (pool minima)", lhs_min, outer_min * inner),
        ),
        mode="sampled",
        seed=seed,
        sample_count=samples,
    )


def check_hyperplane_bound(code: CyclicCode, k: int) -> CheckReport:
    """Hyperplane-test robustness against the imported bound delta(C)^k / 12."""
    if k < 2:
        raise ValueError("hyperplane test needs k >= 2")
    fam = CodeFamily.power(code, k)
    rr = rho_r_exact(FlatTest.build(fam.shape, k - 1), fam)
    delta = Fraction(min_distance(code, "exhaustive"), code.length)
    return CheckReport(
        name="hyperplane_bound",
        instance=fam.label(),
        quantities={f"rho_r_T{k}^{k-1}": rr, "delta": delta},
        inequalities=((f"rho_r >= delta^{k}/12", rr, delta**k / 12),),
    )


# ----------------------------------------------------------------------
# Pair proximity conformance for Reed-Solomon squares.
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PairProximityReport:
    instance: str
    seed: int
    trials: int
    failures: int
    line_budget: int
    max_observed_delta: Fraction

    @property
    def holds(self) -> bool:
        return self.failures == 0


def check_pair_proximity(
    code: CyclicCode, trials: int, seed: int
) -> PairProximityReport:
    """Planted-pair conformance for rate-below-half Reed-Solomon squares.

    Each trial plants c in C (x) C and derives c1 (every column a codeword)
    and c2 (every row a codeword) by re-randomizing whole lines within a
    budget that keeps delta(c1, c2) <= (1/2 - k/n)^2.  The verifier then
    row-column decodes c1 without knowledge of c and must find a product
    codeword within 2*delta(c1, c2) of c1.  At rates where the budget is
    zero the pairs are forced to coincide with the planted codeword and the
    decode path is exercised on exact members.
    """
    field, n, k = code.field, code.length, code.dimension
    if not code.is_rs_primitive or not 1 <= k or k >= n / 2:
        raise ValueError("requires a primitive RS code with k < n/2")
    bound = (Fraction(1, 2) - Fraction(k, n)) ** 2
    budget = int(bound * n * n) // n  # whole re-randomized lines within delta budget
    fam = CodeFamily.power(code, 2)
    rng = np.random.Generator(np.random.PCG64(seed))
    failures = 0
    max_delta = Fraction(0)
    for _trial in range(trials):
        c = random_product_codeword(fam, rng)
        c1 = c.data.copy()
        c2 = c.data.copy()
        r1 = int(rng.integers(0, budget + 1))
        r2 = budget - r1
        for col in rng.choice(n, size=r1, replace=False) if r1 else []:
            c1[:, col] = code.random_codeword(rng)
        for row in rng.choice(n, size=r2, replace=False) if r2 else []:
            c2[row, :] = code.random_codeword(rng)
        w1 = TensorWord(field, c1)
        w2 = TensorWord(field, c2)
        delta12 = Fraction(int(np.count_nonzero(c1 ^ c2)), n * n)
        if delta12 > bound:
            failures += 1
            continue
        max_delta = max(max_delta, delta12)
        decoded = _row_column_decode(w1, code)
        if decoded is None or not product_contains(decoded, fam):
            failures += 1
            continue
        dist = Fraction((w1 + decoded).weight(), n * n)
        if dist > 2 * delta12:
            failures += 1
    return PairProximityReport(
        instance=fam.label(),
        seed=seed,
        trials=trials,
        failures=failures,
        line_budget=budget,
        max_observed_delta=max_delta,
    )


def _row_column_decode(word: TensorWord, code: CyclicCode) -> Optional[TensorWord]:
    """Decode all direction-1 lines, then all direction-0 lines."""
    arr = word.data.copy()
    for axis in (1, 0):
        mat = lines_as_matrix(arr, axis).copy()
        for r in range(mat.shape[0]):
            res = nearest_codeword(mat[r], code, "bounded_distance")
            if res is None:
                return None
            mat[r] = res[0]
        lead = tuple(arr.shape[i] for i in range(arr.ndim) if i != axis)
        arr = np.moveaxis(mat.reshape(lead + (arr.shape[axis],)), -1, axis)
    return TensorWord(word.field, arr)


# ----------------------------------------------------------------------
# Closed-form constants.
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DerivedConstants:
    m: int
    M: int
    alpha_r: Fraction
    alpha_a: Fraction
    alpha: Callable[[Fraction], Fraction]
    alpha_exponent: int
    alpha_denominator: int


def derived_constants(m: int, rho_r_t21: Fraction = Fraction(1, 72)) -> DerivedConstants:
    """Constants of the rate-1/3 Reed-Solomon robustness chain.

    M = (m-2)(m+3)/2 accumulates one hyperplane-bound factor delta^k for
    each k = 3..m; alpha_r feeds the line-test robustness of the square
    (1/72 by default) through those factors with delta >= 2/3; alpha_a
    converts robustness to agreement testability.  The returned `alpha` maps
    an expansion constant rho to the line-test robustness floor
    rho^(M+1) / (4 * 12^(m-2)).
    """
    if m < 3:
        raise ValueError("need m >= 3")
    M = (m - 2) * (m + 3) // 2
    alpha_r = rho_r_t21 * Fraction(1, 12 ** (m - 2)) * Fraction(2, 3) ** M
    alpha_a = Fraction(2, 3) * alpha_r / (1 + alpha_r)
    denom = 4 * 12 ** (m - 2)
    exponent = M + 1

    def alpha(rho: Fraction) -> Fraction:
        return rho**exponent / denom

    return DerivedConstants(
        m=m,
        M=M,
        alpha_r=alpha_r,
        alpha_a=alpha_a,
        alpha=alpha,
        alpha_exponent=exponent,
        alpha_denominator=denom,
    )
