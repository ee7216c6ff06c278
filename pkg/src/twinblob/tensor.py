"""Dense complex tensor primitives.

Every operator in the package is a plain ``numpy`` complex array acting on a
tensor product of ``d``-dimensional site spaces.  Sites are numbered from 1,
site 1 being the one next to the boundary that carries the blob generator.
"""
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import warnings

import numpy as np
import scipy.linalg

__all__ = [
    "SiteLayout",
    "kron",
    "embed",
    "permutation",
    "leg_permute",
    "act_on",
    "partial_trace_first",
    "comm_residual",
    "eq_residual",
    "scalar_fit",
    "invert",
    "eigenvalues",
    "SingularMatrixError",
]


class SingularMatrixError(ValueError):
    """Raised when a matrix is numerically singular at working precision."""


@dataclass(frozen=True)
class SiteLayout:
    num_sites: int
    local_dim: int
    auxiliary_dim: Optional[int] = None

    def __post_init__(self):
        if self.num_sites < 1 or self.local_dim < 1:
            raise ValueError("num_sites and local_dim must be positive")
        if self.auxiliary_dim is not None and self.auxiliary_dim != self.local_dim:
            raise ValueError("auxiliary_dim must equal local_dim")

    @property
    def dim(self) -> int:
        total = self.local_dim ** self.num_sites
        if self.auxiliary_dim is not None:
            total *= self.auxiliary_dim
        return total


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2d array, got shape {a.shape}")
    return a


def kron(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices, left factor slowest."""
    if not ops:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (_as_matrix(o) for o in ops))


def _num_legs(dim: int, d: int) -> int:
    n = int(round(np.log(dim) / np.log(d))) if d > 1 else 1
    if d ** n != dim:
        raise ValueError(f"dimension {dim} is not a power of {d}")
    return n


def embed(op, first_site: int, span: int, layout: SiteLayout) -> np.ndarray:
    """Place ``op`` on sites ``first_site .. first_site+span-1`` (1-based)."""
    op = _as_matrix(op)
    d, n = layout.local_dim, layout.num_sites
    if op.shape != (d ** span, d ** span):
        raise ValueError(
            f"operator of shape {op.shape} does not act on {span} sites of dim {d}"
        )
    if not 1 <= first_site <= n - span + 1:
        raise ValueError(f"first_site={first_site} out of range for N={n}, span={span}")
    left = np.eye(d ** (first_site - 1))
    right = np.eye(d ** (n - first_site - span + 1))
    return kron(left, op, right)


def permutation(d: int) -> np.ndarray:
    """Swap operator on C^d (x) C^d."""
    if d < 1:
        raise ValueError("d must be positive")
    p = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            p[b * d + a, a * d + b] = 1.0
    return p


def leg_permute(op, perm: Sequence[int], d: int) -> np.ndarray:
    """Reorder the tensor factors of ``op``.

    ``perm`` is 1-based: new leg ``k`` is old leg ``perm[k-1]``.  The result is
    ``W op W^dagger`` with ``W`` the unitary sending the old factor order to
    the new one.
    """
    op = _as_matrix(op)
    n = _num_legs(op.shape[0], d)
    perm = [int(p) - 1 for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{[p + 1 for p in perm]} is not a permutation of 1..{n}")
    t = op.reshape([d] * (2 * n))
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(d ** n, d ** n)


def act_on(op, legs: Sequence[int], n_legs: int, d: int) -> np.ndarray:
    """Full operator applying ``op`` to the listed 0-based legs, in that order.

    ``legs=(2, 0)`` means the first tensor factor of ``op`` acts on leg 2 and the
    second on leg 0.
    """
    op = _as_matrix(op)
    k = len(legs)
    if op.shape != (d ** k, d ** k):
        raise ValueError(f"operator of shape {op.shape} does not act on {k} legs")
    if len(set(legs)) != k or any(not 0 <= g < n_legs for g in legs):
        raise ValueError(f"bad leg list {legs} for {n_legs} legs")
    rest = [g for g in range(n_legs) if g not in legs]
    full = np.kron(op, np.eye(d ** len(rest)))
    if list(legs) == list(range(k)):
        return full
    order = list(legs) + rest
    # new leg g is old position order.index(g)
    return leg_permute(full, [order.index(g) + 1 for g in range(n_legs)], d)


def partial_trace_first(op, d: int) -> np.ndarray:
    """Trace out the first (auxiliary) factor of dimension ``d``."""
    op = _as_matrix(op)
    rest = op.shape[0] // d
    return np.einsum("aiaj->ij", op.reshape(d, rest, d, rest))


def _fro(a) -> float:
    return float(np.linalg.norm(a))


def eq_residual(lhs, rhs) -> float:
    """||lhs - rhs||_F / max(1, ||lhs||_F, ||rhs||_F)."""
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    if np.ndim(rhs) == 0:
        rhs = np.broadcast_to(rhs, lhs.shape)
    if lhs.shape != rhs.shape:
        raise ValueError(f"shape mismatch {lhs.shape} vs {rhs.shape}")
    return _fro(lhs - rhs) / max(1.0, _fro(lhs), _fro(rhs))


def comm_residual(a, b) -> float:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator needs equal square shapes, got {a.shape}, {b.shape}")
    return eq_residual(a @ b, b @ a)


def scalar_fit(a, b):
    """Best ``c`` with ``a ~ c b`` and the relative misfit ``||a - c b|| / ||a||``."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    bb = np.vdot(b, b)
    if abs(bb) == 0:
        raise ValueError("cannot fit against the zero matrix")
    c = complex(np.vdot(b, a) / bb)
    na = _fro(a)
    if na == 0:
        return c, 0.0
    return c, _fro(a - c * b) / na


def invert(a) -> np.ndarray:
    """Inverse via partially pivoted LU; rejects numerically singular input."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("invert needs a square matrix")
    with warnings.catch_warnings():
        # singular input is reported below with a clearer message
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    row_norms = np.linalg.norm(a, axis=1)
    scale = row_norms.max() if row_norms.size else 1.0
    if scale == 0 or np.min(np.abs(np.diag(lu))) < 1e-12 * scale:
        raise SingularMatrixError("matrix is numerically singular (pivot below 1e-12 of row norm)")
    return scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0], dtype=complex))


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a dense square matrix (LAPACK Hessenberg + shifted QR)."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("eigenvalues needs a square matrix")
    if a.shape[0] > 4096:
        raise ValueError("dimension above 4096 is not supported")
    return np.linalg.eigvals(a)
