"""Exact arithmetic for polynomials in the forward shift q and its adjoint q*.

The forward shift acts on one-sided sequences as
``q: (y[0], y[1], ...) -> (y[1], y[2], ...)`` and its adjoint prepends a
zero.  Since ``q q* = 1`` but ``q* q != 1``, every finite combination of
the two reduces to a unique normal form: a linear combination of
monomials ``(q*)^i q^j``.  :class:`ShiftOp` stores the coefficient table
of that normal form.

The diagonal sub-ring (operators supported on ``(q*)^k q^k``) acts as a
pointwise, eventually constant scaling of the sequence: the scaling
weight at time t is the partial sum of the coefficients up to t.  That
representation (:class:`PartialSums`) is where pseudoinverses, inverses
and positive semi-definite square roots are computed.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np

from .errors import NotInRInf, NotPSD, Singular, WindowTooShort

# Absolute thresholds.  Inputs are O(1) throughout; pruning sits two
# orders of magnitude below the decision thresholds.  Overridable at
# runtime through the ``tolerances`` context manager (used by the CLI
# flags); read via module attribute, never captured by value.
ZERO_TOL = 1e-11
PSD_TOL = 1e-9
INV_TOL = 1e-9


@contextmanager
def tolerances(zero_tol=None, psd_tol=None, inv_tol=None):
    """Temporarily override the module tolerances."""
    global ZERO_TOL, PSD_TOL, INV_TOL
    saved = (ZERO_TOL, PSD_TOL, INV_TOL)
    if zero_tol is not None:
        ZERO_TOL = zero_tol
    if psd_tol is not None:
        PSD_TOL = psd_tol
    if inv_tol is not None:
        INV_TOL = inv_tol
    try:
        yield
    finally:
        ZERO_TOL, PSD_TOL, INV_TOL = saved


class Monomial(NamedTuple):
    """The operator (q*)^istar q^j; (0, 0) is the identity."""

    istar: int
    j: int

    def product(self, other: "Monomial") -> "Monomial":
        """Normal form of the composition ``self · other``.

        The middle factor ``q^j (q*)^i`` cancels min(j, i) pairs through
        ``q q* = 1``; what remains migrates to the outside.
        """
        return Monomial(
            self.istar + max(0, other.istar - self.j),
            other.j + max(0, self.j - other.istar),
        )

    def adjoint(self) -> "Monomial":
        return Monomial(self.j, self.istar)


def _canonical(coeffs: Mapping[Monomial, float], zero_tol: float) -> dict:
    return {m: c for m, c in coeffs.items() if abs(c) > zero_tol}


@dataclass(frozen=True)
class ShiftOp:
    """An element of the shift-operator polynomial ring, in normal form.

    ``coeffs`` maps :class:`Monomial` to its real coefficient; entries
    with magnitude <= ``zero_tol`` are pruned so that sparsity queries
    are exact set queries.  Instances are immutable values.
    """

    coeffs: Mapping[Monomial, float]
    zero_tol: float = None

    def __post_init__(self):
        if self.zero_tol is None:
            object.__setattr__(self, "zero_tol", ZERO_TOL)
        object.__setattr__(
            self, "coeffs", _canonical(dict(self.coeffs), self.zero_tol)
        )

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "ShiftOp":
        return ShiftOp({})

    @staticmethod
    def identity() -> "ShiftOp":
        return ShiftOp({Monomial(0, 0): 1.0})

    @staticmethod
    def q(power: int = 1) -> "ShiftOp":
        return ShiftOp({Monomial(0, power): 1.0})

    @staticmethod
    def qstar(power: int = 1) -> "ShiftOp":
        return ShiftOp({Monomial(power, 0): 1.0})

    @staticmethod
    def constant(c: float) -> "ShiftOp":
        return ShiftOp({Monomial(0, 0): float(c)})

    @staticmethod
    def monomial(istar: int, j: int, c: float = 1.0) -> "ShiftOp":
        return ShiftOp({Monomial(istar, j): float(c)})

    @staticmethod
    def diagonal(alphas: Iterable[float]) -> "ShiftOp":
        """Sum of alpha_k (q*)^k q^k for the given coefficient list."""
        return ShiftOp({Monomial(k, k): float(a) for k, a in enumerate(alphas)})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_degree(self) -> int:
        """Largest istar + j over the support (0 for the zero operator)."""
        return max((m.istar + m.j for m in self.coeffs), default=0)

    def coefficient(self, istar: int, j: int) -> float:
        return self.coeffs.get(Monomial(istar, j), 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShiftOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def isclose(self, other: "ShiftOp", tol: float = 1e-9) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            abs(self.coeffs.get(m, 0.0) - other.coeffs.get(m, 0.0)) <= tol
            for m in keys
        )

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "ShiftOp") -> "ShiftOp":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0.0) + c
        return ShiftOp(out, self.zero_tol)

    def __sub__(self, other: "ShiftOp") -> "ShiftOp":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "ShiftOp":
        return ShiftOp({m: c * v for m, v in self.coeffs.items()}, self.zero_tol)

    def __mul__(self, other: "ShiftOp") -> "ShiftOp":
        out: dict = {}
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                m = ma.product(mb)
                out[m] = out.get(m, 0.0) + ca * cb
        return ShiftOp(out, self.zero_tol)

    def __neg__(self) -> "ShiftOp":
        return self.scale(-1.0)

    def adjoint(self) -> "ShiftOp":
        return ShiftOp(
            {m.adjoint(): c for m, c in self.coeffs.items()}, self.zero_tol
        )

    # -- action on sequences ------------------------------------------

    def apply(self, s: np.ndarray) -> "Window":
        """Apply to a sample window.

        A monomial contributes ``s[t - istar + j]`` for ``t >= istar``
        and 0 before.  Indices past the window cannot be read, so the
        result is only trustworthy on the leading ``len(s) - max_degree``
        samples; the returned :class:`Window` carries that count.
        """
        s = np.asarray(s, dtype=float)
        T = s.shape[0]
        d = self.max_degree()
        if T <= d:
            raise WindowTooShort(f"window of {T} samples, operator degree {d}")
        out = np.zeros_like(s)
        for (istar, j), c in self.coeffs.items():
            for t in range(istar, T):
                src = t - istar + j
                if src < T:
                    out[t] += c * s[src]
        return Window(out, T - d)

    def to_truncation(self, T: int) -> np.ndarray:
        """Finite T x T matrix model: q becomes the superdiagonal shift.

        The model agrees with the true operator only on the leading
        ``T - max_degree`` coordinates; callers must discard the tail
        band.
        """
        d = self.max_degree()
        if T <= d:
            raise WindowTooShort(f"T={T}, operator degree {d}")
        S = np.eye(T, k=1)
        out = np.zeros((T, T))
        for (istar, j), c in self.coeffs.items():
            out += c * np.linalg.matrix_power(S.T, istar) @ np.linalg.matrix_power(S, j)
        return out

    # -- the diagonal sub-ring ----------------------------------------

    def is_rinf(self) -> bool:
        return all(m.istar == m.j for m in self.coeffs)

    def to_partial_sums(self) -> "PartialSums":
        if not self.is_rinf():
            raise NotInRInf(f"off-diagonal support in {self!r}")
        n = max((m.istar for m in self.coeffs), default=0)
        alphas = [self.coeffs.get(Monomial(k, k), 0.0) for k in range(n + 1)]
        sums = np.cumsum(alphas)
        return PartialSums(tuple(sums[:-1]), float(sums[-1]))

    def pinv_rinf(self) -> "ShiftOp":
        """Moore-Penrose pseudoinverse of a diagonal-sub-ring element."""
        return self.to_partial_sums().map(
            lambda s: 1.0 / s if abs(s) > self.zero_tol else 0.0
        ).to_shiftop(self.zero_tol)

    def is_psd_rinf(self) -> bool:
        p = self.to_partial_sums()
        return all(s >= -PSD_TOL for s in p.sigma) and p.sigma_inf >= -PSD_TOL

    def sqrt_rinf(self) -> "ShiftOp":
        """Unique PSD square root; scaling weights may dip to -PSD_TOL
        (clamped to 0) but no further."""
        p = self.to_partial_sums()

        def root(s: float) -> float:
            if s < -PSD_TOL:
                raise NotPSD(f"partial sum {s} < -{PSD_TOL}")
            return math.sqrt(max(s, 0.0))

        return p.map(root).to_shiftop(self.zero_tol)

    def inv_rinf(self) -> "ShiftOp":
        p = self.to_partial_sums()
        if any(abs(s) <= INV_TOL for s in p.sigma) or abs(p.sigma_inf) <= INV_TOL:
            raise Singular("scaling weight within INV_TOL of zero")
        return p.map(lambda s: 1.0 / s).to_shiftop(self.zero_tol)

    # -- serialisation ------------------------------------------------

    def to_json(self) -> dict:
        terms = [
            {"istar": m.istar, "j": m.j, "c": c}
            for m, c in sorted(self.coeffs.items())
        ]
        return {"terms": terms}

    @staticmethod
    def from_json(obj: dict) -> "ShiftOp":
        return ShiftOp(
            {
                Monomial(int(t["istar"]), int(t["j"])): float(t["c"])
                for t in obj["terms"]
            }
        )

    def __repr__(self) -> str:
        if not self.coeffs:
            return "ShiftOp(0)"
        parts = []
        for (istar, j), c in sorted(self.coeffs.items()):
            mono = "".join(
                s for s in (f"q*^{istar}" if istar else "", f"q^{j}" if j else "")
                if s
            ) or "1"
            parts.append(f"{c:+g}·{mono}")
        return f"ShiftOp({' '.join(parts)})"


@dataclass(frozen=True)
class PartialSums:
    """Pointwise scaling weights of a diagonal-sub-ring element.

    The sequence action is ``s[t] -> sigma_t s[t]`` with
    ``sigma_t = sigma[t]`` for ``t < len(sigma)`` and ``sigma_inf``
    afterwards.
    """

    sigma: tuple
    sigma_inf: float

    def weight(self, t: int) -> float:
        return self.sigma[t] if t < len(self.sigma) else self.sigma_inf

    def map(self, f: Callable[[float], float]) -> "PartialSums":
        return PartialSums(tuple(f(s) for s in self.sigma), f(self.sigma_inf))

    def to_shiftop(self, zero_tol: float = None) -> ShiftOp:
        sums = list(self.sigma) + [self.sigma_inf]
        coeffs = {}
        prev = 0.0
        for k, s in enumerate(sums):
            if k == 0:
                coeffs[Monomial(0, 0)] = s
            else:
                coeffs[Monomial(k, k)] = s - prev
            prev = s
        return ShiftOp(coeffs, zero_tol)


@dataclass(frozen=True)
class Window:
    """A sample window together with the number of trustworthy samples."""

    values: np.ndarray
    valid: int

    def valid_values(self) -> np.ndarray:
        return self.values[: self.valid]
