"""Computable one-sided sequences as finite state-space realizations.

A sequence is stored as a triple (C, A, x0) with samples w[k] = C A^k x0.
The initial condition x0 may be a matrix, in which case the triple
represents the sequence's dependence on a basis of initial conditions
simultaneously (each column is one scenario).

The representation is closed under the whole shift-operator algebra:
the forward shift replaces C by CA, the backward shift augments the
state with a one-step delay block, and pointwise eventually-constant
scalings add a finitely supported correction term.  Back substitution
composes many of these steps, so an exact-up-to-rounding pruning pass
(Krylov reachability + observability reduction) keeps state dimensions
from compounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .shift_algebra import PartialSums, ShiftOp

PRUNE_RTOL = 1e-12


@dataclass(frozen=True)
class Triple:
    """Realization (C, A, x0) of the sequence w[k] = C A^k x0."""

    C: np.ndarray
    A: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        x0 = np.asarray(self.x0, dtype=float)
        if x0.ndim == 1:
            x0 = x0[:, None]
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A is {A.shape}")
        if C.shape[1] != A.shape[0] or x0.shape[0] != A.shape[0]:
            raise DimensionMismatch(
                f"C {C.shape}, A {A.shape}, x0 {x0.shape}"
            )
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "x0", x0)

    # -- shape ---------------------------------------------------------

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    @property
    def n_state(self) -> int:
        return self.A.shape[0]

    @property
    def n_basis(self) -> int:
        return self.x0.shape[1]

    @staticmethod
    def zero(n_outputs: int = 1, n_basis: int = 1) -> "Triple":
        return Triple(
            np.zeros((n_outputs, 1)), np.zeros((1, 1)), np.zeros((1, n_basis))
        )

    @staticmethod
    def geometric(C: np.ndarray, ratio: float, x0: np.ndarray) -> "Triple":
        """Sequence w[k] = ratio^k · C · x0."""
        C = np.atleast_2d(np.asarray(C, dtype=float))
        return Triple(C, ratio * np.eye(C.shape[1]), x0)

    @staticmethod
    def finite(samples) -> "Triple":
        """Finitely supported sequence from a list of p x b sample blocks."""
        blocks = [np.atleast_2d(np.asarray(s, dtype=float)) for s in samples]
        if not blocks:
            return Triple.zero()
        p, b = blocks[0].shape
        n = len(blocks)
        A = np.eye(n * p, k=p)
        C = np.zeros((p, n * p))
        C[:, :p] = np.eye(p)
        x0 = np.vstack(blocks)
        return Triple(C, A, x0)

    # -- sampling ------------------------------------------------------

    def sample(self, k: int) -> np.ndarray:
        return self.C @ np.linalg.matrix_power(self.A, k) @ self.x0

    def first(self) -> np.ndarray:
        return self.C @ self.x0

    def samples(self, n: int) -> np.ndarray:
        """Stack of n samples, shape (n, p, b)."""
        out = np.empty((n, self.n_outputs, self.n_basis))
        x = self.x0
        for k in range(n):
            out[k] = self.C @ x
            x = self.A @ x
        return out

    # -- algebra -------------------------------------------------------

    def apply_q(self) -> "Triple":
        return Triple(self.C @ self.A, self.A, self.x0)

    def apply_qstar(self) -> "Triple":
        """Delay by one step: new state carries the previous state."""
        m = self.n_state
        A = np.block([[self.A, np.zeros((m, m))], [np.eye(m), np.zeros((m, m))]])
        C = np.hstack([np.zeros_like(self.C), self.C])
        x0 = np.vstack([self.x0, np.zeros_like(self.x0)])
        return Triple(C, A, x0)

    def scale(self, c: float) -> "Triple":
        return Triple(c * self.C, self.A, self.x0)

    def __add__(self, other: "Triple") -> "Triple":
        if self.n_outputs != other.n_outputs or self.n_basis != other.n_basis:
            raise DimensionMismatch("output/basis shapes differ")
        n1, n2 = self.n_state, other.n_state
        A = np.block(
            [[self.A, np.zeros((n1, n2))], [np.zeros((n2, n1)), other.A]]
        )
        C = np.hstack([self.C, other.C])
        x0 = np.vstack([self.x0, other.x0])
        return Triple(C, A, x0)

    def __sub__(self, other: "Triple") -> "Triple":
        return self + other.scale(-1.0)

    def apply_shiftop(self, x: ShiftOp) -> "Triple":
        """Apply an operator polynomial, monomial by monomial."""
        acc = None
        for (istar, j), c in sorted(x.coeffs.items()):
            t = self
            for _ in range(j):
                t = t.apply_q()
            for _ in range(istar):
                t = t.apply_qstar()
            t = t.scale(c)
            acc = t if acc is None else acc + t
        if acc is None:
            return Triple.zero(self.n_outputs, self.n_basis)
        return acc

    def scale_pointwise(self, p: PartialSums) -> "Triple":
        """Pointwise scaling s[t] -> sigma_t s[t].

        The eventual constant scales the whole triple; the transient
        weights contribute a finitely supported correction.
        """
        base = self.scale(p.sigma_inf)
        if not p.sigma:
            return base
        corr = [
            (p.sigma[t] - p.sigma_inf) * self.sample(t)
            for t in range(len(p.sigma))
        ]
        return base + Triple.finite(corr)

    # -- reduction -----------------------------------------------------

    def prune(self, rtol: float = PRUNE_RTOL) -> "Triple":
        """Reduce to a (near) minimal realization without changing samples.

        Projects onto the reachable subspace of (A, x0) and then onto the
        orthogonal complement of the unobservable subspace of (C, A).
        Both subspaces are computed from full Krylov stacks, so the
        projections are exact up to the SVD rank tolerance.
        """
        t = self._project_reachable(rtol)._project_observable(rtol)
        return t if t.n_state < self.n_state else self

    def _basis(self, mat: np.ndarray, rtol: float) -> np.ndarray:
        U, s, _ = np.linalg.svd(mat, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            return U[:, :0]
        rank = int(np.sum(s > rtol * s[0]))
        return U[:, :rank]

    def _project_reachable(self, rtol: float) -> "Triple":
        m = self.n_state
        blocks, x = [], self.x0
        for _ in range(m):
            blocks.append(x)
            x = self.A @ x
        Q = self._basis(np.hstack(blocks), rtol)
        if Q.shape[1] == 0:
            return Triple.zero(self.n_outputs, self.n_basis)
        return Triple(self.C @ Q, Q.T @ self.A @ Q, Q.T @ self.x0)

    def _project_observable(self, rtol: float) -> "Triple":
        m = self.n_state
        blocks, c = [], self.C
        for _ in range(m):
            blocks.append(c)
            c = c @ self.A
        Q = self._basis(np.vstack(blocks).T, rtol)
        if Q.shape[1] == 0:
            return Triple.zero(self.n_outputs, self.n_basis)
        return Triple(self.C @ Q, Q.T @ self.A @ Q, Q.T @ self.x0)

    def decay_ok(self, k: int = 200, factor: float = 1e-6) -> bool:
        """Advisory square-summability check: the tail sample at k should
        be negligible against the early peak."""
        early = max(np.max(np.abs(self.sample(t))) for t in range(5))
        tail = np.max(np.abs(self.sample(k)))
        return tail < max(factor * early, 1e-300) or early == 0.0

    def to_json(self) -> dict:
        return {
            "C": self.C.tolist(),
            "A": self.A.tolist(),
            "x0": self.x0.tolist(),
        }
