"""Matrices whose entries are shift-operator polynomials.

Provides products, adjoints, Grams, row/column permutations, sparsity
patterns, membership in the graph-structured matrix class, and the
coefficient-sum map used in the spectral-factor comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .shift_algebra import Monomial, ShiftOp


@dataclass(frozen=True)
class Permutation:
    """A bijection on 0..n-1 stored as an index map.

    ``image[i]`` is the source index that lands in slot i, so applying
    the permutation to a vector x gives ``y[i] = x[image[i]]``.
    """

    image: tuple

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"not a permutation: {image}")
        object.__setattr__(self, "image", image)

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @staticmethod
    def swap(n: int, a: int, b: int) -> "Permutation":
        img = list(range(n))
        img[a], img[b] = img[b], img[a]
        return Permutation(tuple(img))

    def __len__(self) -> int:
        return len(self.image)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for slot, src in enumerate(self.image):
            inv[src] = slot
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self ∘ other: apply ``other`` first, then ``self``."""
        if len(self) != len(other):
            raise DimensionMismatch("permutation sizes differ")
        return Permutation(tuple(self.image[other.image[i]] for i in range(len(self))))

    def apply(self, xs):
        """Permute a list: result[i] = xs[image[i]]."""
        return [xs[i] for i in self.image]

    def to_matrix(self) -> np.ndarray:
        n = len(self.image)
        P = np.zeros((n, n))
        for slot, src in enumerate(self.image):
            P[src, slot] = 1.0
        return P


@dataclass(frozen=True)
class SparsityPattern:
    """Boolean nonzero mask of an operator matrix."""

    mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))

    @property
    def shape(self):
        return self.mask.shape

    def count(self) -> int:
        return int(self.mask.sum())

    def render(self, star: str = "★", zero: str = "0") -> str:
        return "\n".join(
            " ".join(star if f else zero for f in row) for row in self.mask
        )


def dominates(a: SparsityPattern, b: SparsityPattern) -> bool:
    """True iff b is at least as sparse as a (no nonzero of b outside a)."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return bool(np.all(a.mask | ~b.mask))


@dataclass(frozen=True)
class OpMatrix:
    """A dense rectangular array of :class:`ShiftOp` entries."""

    entries: tuple  # tuple of row-tuples of ShiftOp

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged rows")
        object.__setattr__(self, "entries", rows)

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rows(rows) -> "OpMatrix":
        return OpMatrix(tuple(tuple(rows[i]) for i in range(len(rows))))

    @staticmethod
    def zeros(rows: int, cols: int) -> "OpMatrix":
        z = ShiftOp.zero()
        return OpMatrix(tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "OpMatrix":
        one = ShiftOp.identity()
        z = ShiftOp.zero()
        return OpMatrix(
            tuple(tuple(one if i == j else z for j in range(n)) for i in range(n))
        )

    @staticmethod
    def from_real(a: np.ndarray) -> "OpMatrix":
        a = np.asarray(a, dtype=float)
        return OpMatrix(
            tuple(tuple(ShiftOp.constant(v) for v in row) for row in a)
        )

    # -- shape / access ------------------------------------------------

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx) -> ShiftOp:
        i, j = idx
        return self.entries[i][j]

    def with_entry(self, i: int, j: int, x: ShiftOp) -> "OpMatrix":
        rows = [list(r) for r in self.entries]
        rows[i][j] = x
        return OpMatrix.from_rows(rows)

    def submatrix(self, row_idx, col_idx) -> "OpMatrix":
        return OpMatrix(
            tuple(tuple(self.entries[i][j] for j in col_idx) for i in row_idx)
        )

    # -- algebra -------------------------------------------------------

    def matmul(self, other: "OpMatrix") -> "OpMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ShiftOp.zero()
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.coeffs and b.coeffs:
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return OpMatrix(tuple(out))

    def __matmul__(self, other: "OpMatrix") -> "OpMatrix":
        return self.matmul(other)

    def adjoint(self) -> "OpMatrix":
        return OpMatrix(
            tuple(
                tuple(self.entries[i][j].adjoint() for i in range(self.rows))
                for j in range(self.cols)
            )
        )

    def gram(self) -> "OpMatrix":
        return self.adjoint().matmul(self)

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return OpMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "OpMatrix":
        return OpMatrix(
            tuple(tuple(x.scale(c) for x in row) for row in self.entries)
        )

    def scale_op(self, x: ShiftOp) -> "OpMatrix":
        """Left-multiply every entry by the scalar operator x."""
        return OpMatrix(
            tuple(tuple(x * e for e in row) for row in self.entries)
        )

    def max_abs_coeff(self) -> float:
        out = 0.0
        for row in self.entries:
            for x in row:
                for c in x.coeffs.values():
                    out = max(out, abs(c))
        return out

    def isclose(self, other: "OpMatrix", tol: float = 1e-9) -> bool:
        if self.shape != other.shape:
            return False
        return all(
            a.isclose(b, tol)
            for ra, rb in zip(self.entries, other.entries)
            for a, b in zip(ra, rb)
        )

    # -- permutations --------------------------------------------------

    def permute_cols(self, P: Permutation) -> "OpMatrix":
        if len(P) != self.cols:
            raise DimensionMismatch("column permutation size")
        return OpMatrix(
            tuple(tuple(row[s] for s in P.image) for row in self.entries)
        )

    def permute_rows(self, P: Permutation) -> "OpMatrix":
        if len(P) != self.rows:
            raise DimensionMismatch("row permutation size")
        return OpMatrix(tuple(self.entries[s] for s in P.image))

    # -- structure queries ---------------------------------------------

    def sparsity(self) -> SparsityPattern:
        return SparsityPattern(
            np.array(
                [[bool(x.coeffs) for x in row] for row in self.entries], dtype=bool
            ).reshape(self.rows, self.cols)
        )

    def is_lower_triangular(self) -> bool:
        return all(
            not self.entries[i][j].coeffs
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def coefficient_sum(self) -> np.ndarray:
        """Map each entry to the sum of its coefficients (q, q* -> 1)."""
        return np.array(
            [[sum(x.coeffs.values()) for x in row] for row in self.entries],
            dtype=float,
        ).reshape(self.rows, self.cols)

    def to_truncation(self, T: int) -> np.ndarray:
        """Block real model: each entry replaced by its T x T truncation."""
        out = np.zeros((self.rows * T, self.cols * T))
        for i in range(self.rows):
            for j in range(self.cols):
                x = self.entries[i][j]
                if x.coeffs:
                    out[i * T:(i + 1) * T, j * T:(j + 1) * T] = x.to_truncation(T)
        return out

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[x.to_json() for x in row] for row in self.entries],
        }

    @staticmethod
    def from_json(obj: dict) -> "OpMatrix":
        entries = tuple(
            tuple(ShiftOp.from_json(x) for x in row) for row in obj["entries"]
        )
        M = OpMatrix(entries)
        if M.rows != obj["rows"] or M.cols != obj["cols"]:
            raise DimensionMismatch("declared shape disagrees with entries")
        return M

    def __repr__(self) -> str:
        return f"OpMatrix({self.rows}x{self.cols})"


def _shifted_rinf_form(x: ShiftOp) -> bool:
    """True iff x = alpha·q^k or (q*)^k·alpha for some diagonal alpha.

    Equivalently, all monomials in x share a common offset j - istar.
    """
    offsets = {m.j - m.istar for m in x.coeffs}
    return len(offsets) <= 1


def is_in_MG(M: OpMatrix, graph) -> bool:
    """Membership in the graph-structured matrix class.

    Rows index vertices, columns index edges.  A nonzero entry is
    allowed only at incident (vertex, edge) slots and must be a shifted
    diagonal scalar.
    """
    if M.rows != graph.n_vertices or M.cols != len(graph.edges):
        raise DimensionMismatch(
            f"matrix {M.shape} vs graph ({graph.n_vertices} vertices, "
            f"{len(graph.edges)} edges)"
        )
    for i in range(M.rows):
        for j, (u, v) in enumerate(graph.edges):
            x = M[i, j]
            if not x.coeffs:
                continue
            if i not in (u, v):
                return False
            if not _shifted_rinf_form(x):
                return False
    return True
