"""Multi-index linear algebra on a tensor power of M_N.

A structured matrix lives on a subset of the strings and acts as identity on
the rest; it is only materialized on the full space through `lift`, which is
guarded.  Permutation-valued matrices carry their permutation alongside the
dense entries so that traces of words of permutations can be taken exactly,
point by point, without any dense arithmetic.

Index convention: strings are sorted ascending; the first (lowest) string is
the most significant digit of the mixed-radix encoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DENSE_GUARD = 2**20


class GuardExceeded(RuntimeError):
    """An enumeration or materialization would exceed its resource guard."""


@dataclass(frozen=True)
class MultiIndexSpace:
    strings: tuple[str, ...]  # sorted ascending
    n: int

    def __post_init__(self):
        if tuple(sorted(self.strings)) != self.strings:
            raise ValueError("strings must be sorted ascending")
        if len(set(self.strings)) != len(self.strings):
            raise ValueError("duplicate strings")
        if self.n < 1:
            raise ValueError("side must be >= 1")

    @staticmethod
    def of(strings: Iterable[str], n: int) -> "MultiIndexSpace":
        return MultiIndexSpace(tuple(sorted(strings)), n)

    @property
    def total_dim(self) -> int:
        return self.n ** len(self.strings)

    def stride(self, string: str) -> int:
        pos = self.strings.index(string)
        return self.n ** (len(self.strings) - 1 - pos)

    def encode(self, idx: Sequence[int]) -> int:
        if len(idx) != len(self.strings):
            raise ValueError("index tuple length mismatch")
        out = 0
        for x in idx:
            if not 0 <= x < self.n:
                raise ValueError(f"index component {x} out of range")
            out = out * self.n + x
        return out

    def decode(self, code: int) -> tuple[int, ...]:
        if not 0 <= code < self.total_dim:
            raise ValueError("code out of range")
        digits = []
        for _ in self.strings:
            digits.append(code % self.n)
            code //= self.n
        return tuple(reversed(digits))

    def project(self, code: int, sub: "MultiIndexSpace") -> int:
        """Restrict an encoded full index to the sub-space's strings."""
        idx = self.decode(code)
        lookup = dict(zip(self.strings, idx))
        return sub.encode([lookup[s] for s in sub.strings])


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("not a bijection of 0..n-1")

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other (matrix product order)."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def fixed_points(self) -> int:
        return sum(1 for i, j in enumerate(self.images) if i == j)

    def matrix(self) -> np.ndarray:
        """0/1 matrix M with M e_i = e_{images[i]}."""
        m = np.zeros((self.n, self.n), dtype=np.int64)
        for i, j in enumerate(self.images):
            m[j, i] = 1
        return m


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent deterministic stream for a seed and integer key path."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def sample_uniform_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """Fisher-Yates draw, uniform over the symmetric group."""
    if n < 1:
        raise ValueError("n must be >= 1")
    images = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        images[i], images[j] = images[j], images[i]
    return Permutation(tuple(images))


@dataclass(frozen=True)
class StructuredMatrix:
    """A matrix supported on a subset of strings, identity elsewhere.

    `entries` is dense of dimension n^len(support).  When the matrix is
    exactly a permutation matrix, `perm` carries the permutation so exact
    integer paths can bypass the dense entries.
    """

    support: tuple[str, ...]  # sorted ascending
    n: int
    entries: np.ndarray
    perm: Permutation | None = None

    def __post_init__(self):
        dim = self.n ** len(self.support)
        if self.entries.shape != (dim, dim):
            raise ValueError("entries shape does not match support")
        if tuple(sorted(self.support)) != self.support:
            raise ValueError("support must be sorted")
        if self.perm is not None:
            if self.perm.n != dim:
                raise ValueError("permutation size mismatch")
            if not np.array_equal(self.entries, self.perm.matrix()):
                raise ValueError("entries disagree with the attached permutation")
        # matrices are immutable values; freeze a private copy of the entries
        frozen = self.entries.copy()
        frozen.setflags(write=False)
        object.__setattr__(self, "entries", frozen)

    @staticmethod
    def dense(support: Iterable[str], n: int, entries: np.ndarray) -> "StructuredMatrix":
        return StructuredMatrix(tuple(sorted(support)), n, np.asarray(entries))

    @staticmethod
    def from_permutation(support: Iterable[str], n: int, perm: Permutation) -> "StructuredMatrix":
        return StructuredMatrix(tuple(sorted(support)), n, perm.matrix(), perm)

    @staticmethod
    def identity(support: Iterable[str], n: int) -> "StructuredMatrix":
        support = tuple(sorted(support))
        dim = n ** len(support)
        return StructuredMatrix(support, n, np.eye(dim, dtype=np.int64), Permutation.identity(dim))

    @property
    def dim(self) -> int:
        return self.n ** len(self.support)

    @property
    def space(self) -> MultiIndexSpace:
        return MultiIndexSpace(self.support, self.n)

    def is_exact(self) -> bool:
        return self.entries.dtype == object or np.issubdtype(self.entries.dtype, np.integer)

    def adjoint(self) -> "StructuredMatrix":
        ent = self.entries.conj().T if np.issubdtype(self.entries.dtype, np.complexfloating) else self.entries.T
        p = self.perm.inverse() if self.perm is not None else None
        return StructuredMatrix(self.support, self.n, np.ascontiguousarray(ent), p)


def conjugate_by_color(x: StructuredMatrix, sigma: Permutation) -> StructuredMatrix:
    """Conjugation by the permutation matrix of sigma, done by index
    relabeling: out[a, b] = x[sigma(a), sigma(b)]."""
    if sigma.n != x.dim:
        raise ValueError("permutation size does not match matrix dimension")
    imgs = np.asarray(sigma.images)
    ent = x.entries[np.ix_(imgs, imgs)]
    p = None
    if x.perm is not None:
        p = sigma.inverse().compose(x.perm).compose(sigma)
    return StructuredMatrix(x.support, x.n, ent, p)


def lift(x: StructuredMatrix, target: MultiIndexSpace, dense_guard: int = DENSE_GUARD) -> np.ndarray:
    """Dense matrix of x acting on the full space, identity off the support."""
    if x.n != target.n:
        raise ValueError("side mismatch")
    if not set(x.support) <= set(target.strings):
        raise ValueError("support not contained in target space")
    if target.total_dim > dense_guard:
        raise GuardExceeded(f"full-space dimension {target.total_dim} exceeds dense guard {dense_guard}")
    n = x.n
    k = len(target.strings)
    m = len(x.support)
    rest = [s for s in target.strings if s not in set(x.support)]
    xt = x.entries.reshape((n,) * m + (n,) * m) if m else x.entries.reshape(())
    eye = np.eye(n ** len(rest), dtype=x.entries.dtype)
    it = eye.reshape((n,) * len(rest) + (n,) * len(rest)) if rest else eye.reshape(())
    # outer product, then interleave axes back into sorted-string order
    full = np.multiply.outer(xt, it)
    sup_pos = {s: i for i, s in enumerate(x.support)}
    rest_pos = {s: i for i, s in enumerate(rest)}
    row_axes = []
    col_axes = []
    for s in target.strings:
        if s in sup_pos:
            row_axes.append(sup_pos[s])
            col_axes.append(m + sup_pos[s])
        else:
            row_axes.append(2 * m + rest_pos[s])
            col_axes.append(2 * m + len(rest) + rest_pos[s])
    full = full.transpose(row_axes + col_axes)
    return np.ascontiguousarray(full.reshape(target.total_dim, target.total_dim))


def lift_permutation(x: StructuredMatrix, target: MultiIndexSpace) -> Permutation:
    """The permutation of the full index set induced by a permutation-valued
    structured matrix: acts on the support coordinates, fixes the rest."""
    if x.perm is None:
        raise ValueError("matrix does not carry a permutation")
    if not set(x.support) <= set(target.strings):
        raise ValueError("support not contained in target space")
    sub = MultiIndexSpace(x.support, x.n)
    images = np.arange(target.total_dim, dtype=np.int64)
    sub_codes = _sub_codes(target, sub)
    perm_imgs = np.asarray(x.perm.images, dtype=np.int64)
    new_sub = perm_imgs[sub_codes]
    images = images - _expand_sub(target, sub, sub_codes) + _expand_sub(target, sub, new_sub)
    return Permutation(tuple(int(i) for i in images))


def _sub_codes(full: MultiIndexSpace, sub: MultiIndexSpace) -> np.ndarray:
    """Encoded sub-index of every point of the full space (vectorized)."""
    return _sub_codes_of(full, sub, np.arange(full.total_dim, dtype=np.int64))


def _expand_sub(full: MultiIndexSpace, sub: MultiIndexSpace, codes: np.ndarray) -> np.ndarray:
    """Encoded full-space contribution of sub-index codes (other digits zero)."""
    out = np.zeros_like(codes)
    rem = codes.copy()
    for s in reversed(sub.strings):
        digit = rem % full.n
        rem //= full.n
        out += digit * full.stride(s)
    return out


def delta_vector(a: np.ndarray) -> np.ndarray:
    """Diagonal of a square matrix, as the vector representing its projection
    onto the diagonal subalgebra."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("not a square matrix")
    return np.diagonal(a).copy()


def delta(a: np.ndarray) -> np.ndarray:
    """Projection onto the diagonal subalgebra, as a matrix."""
    return np.diag(delta_vector(a))


def normalized_trace(a: np.ndarray):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("not a square matrix")
    tr = np.trace(a)
    if a.dtype == object:
        return Fraction(tr, a.shape[0]) if isinstance(tr, (int, Fraction)) else tr / a.shape[0]
    if np.issubdtype(a.dtype, np.integer):
        return Fraction(int(tr), a.shape[0])
    return complex(tr) / a.shape[0]


def two_norm(a: np.ndarray) -> float:
    """Normalized Hilbert-Schmidt norm sqrt(sum |a_ij|^2 / dim)."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("not a square matrix")
    arr = a.astype(np.complex128) if a.dtype == object else a
    return float(np.sqrt(np.vdot(arr, arr).real / a.shape[0]))


def chain_product(lambdas: Sequence[np.ndarray], xs: Sequence[np.ndarray]) -> np.ndarray:
    """Alternating product Lam_1 X_1 ... Lam_m X_m with the diagonal factors
    given as vectors and applied as row scalings."""
    if len(lambdas) != len(xs) or not xs:
        raise ValueError("need equally many diagonal and full factors, at least one")
    out = None
    for lam, x in zip(lambdas, xs):
        if lam.shape[0] != x.shape[0]:
            raise ValueError("dimension mismatch")
        factor = lam[:, None] * x
        out = factor if out is None else out @ factor
    return out


def centered_chain_norm(ys: Sequence[np.ndarray]) -> float:
    """The two-norm of the diagonal part of the product of the centered
    factors (Y_i minus its diagonal part)."""
    return math.sqrt(float(centered_chain_norm_sq(ys)))


def centered_chain_norm_sq(ys: Sequence[np.ndarray]):
    if not ys:
        raise ValueError("need at least one factor")
    dim = ys[0].shape[0]
    prod = None
    for y in ys:
        if y.shape != (dim, dim):
            raise ValueError("dimension mismatch")
        centered = y - np.diag(delta_vector(y))
        prod = centered if prod is None else prod @ centered
    diag = delta_vector(prod)
    if prod.dtype != object and not np.issubdtype(prod.dtype, np.integer):
        return float(np.vdot(diag, diag).real / dim)
    total = 0
    for d in diag.tolist():
        total += (d * d.conjugate()).real if isinstance(d, complex) else d * d
    return Fraction(total, dim)


@dataclass(frozen=True)
class ColorPermutationFactor:
    """One letter of a permutation word: a permutation of the color's string
    block, acting on those coordinates of the full space only."""

    color: str
    support: tuple[str, ...]  # sorted
    perm: Permutation


def perm_word_trace(
    factors: Sequence[ColorPermutationFactor], space: MultiIndexSpace
) -> Fraction:
    """Exact normalized trace of a product of color permutations.

    The product is composed pointwise on the full index set, touching only
    each factor's coordinates; the trace is the exact fixed-point fraction.
    Cost O(len(factors) * total_dim); no dense matrices.
    """
    pts = np.arange(space.total_dim, dtype=np.int64)
    cur = pts
    # matrix product Z_1 ... Z_m acts on points by applying Z_m first
    for f in reversed(factors):
        if f.perm.n != space.n ** len(f.support):
            raise ValueError(f"factor for color {f.color!r} has wrong size")
        sub = MultiIndexSpace(f.support, space.n)
        sub_codes = _sub_codes_of(space, sub, cur)
        imgs = np.asarray(f.perm.images, dtype=np.int64)
        cur = cur - _expand_sub(space, sub, sub_codes) + _expand_sub(space, sub, imgs[sub_codes])
    fixed = int(np.count_nonzero(cur == pts))
    return Fraction(fixed, space.total_dim)


def _sub_codes_of(full: MultiIndexSpace, sub: MultiIndexSpace, pts: np.ndarray) -> np.ndarray:
    out = np.zeros_like(pts)
    for s in sub.strings:
        digit = (pts // full.stride(s)) % full.n
        out = out * full.n + digit
    return out
