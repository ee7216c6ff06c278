"""Spectral-parameter R and K matrices built from a blob representation.

With ``a(l) = sinh(mu (l + i))`` and ``b(l) = sinh(mu l)``::

    R(l)     = P (a(l) 1 + b(l) U)          Rcheck(l) = P R(l)
    K(l)     = x(l) 1 + y(l) e
    x(l)     = -delta_e cosh(mu (2l + i)) - kappa cosh(2 mu l) - cosh(2 i mu zeta)
    y(l)     = 2 sinh(2 mu l) sinh(i mu)

``Rhat(l)`` is ``R(-l)^{-1}`` rescaled by ``a(l) a(-l)``.  Because
``Rcheck(l) Rcheck(-l) = a(l) a(-l)`` this equals ``Rcheck(l) P`` exactly, which
is how it is evaluated.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import AlgebraParams, LocalRep
from .report import CheckReport, make_report
from .tensor import act_on, comm_residual, eq_residual, invert, permutation, scalar_fit

__all__ = [
    "LaxFactory",
    "sample_lambdas",
    "sample_pairs",
    "partial_transpose_first",
    "check_ybe",
    "check_re",
    "check_unitarity_crossing",
    "check_braid",
    "check_rr2",
    "check_asymptotics",
]


def sample_lambdas(seed: int, n: int, mu: float, radius: float = 2.0) -> List[complex]:
    """Seeded complex samples in the disk ``|l| <= radius`` away from zeros of sinh(mu l)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        rad = radius * np.sqrt(rng.uniform())
        ang = rng.uniform(0, 2 * np.pi)
        lam = complex(rad * np.cos(ang), rad * np.sin(ang))
        if abs(np.sinh(mu * lam)) < 1e-3 or abs(np.sinh(mu * (lam + 1j))) < 1e-3:
            continue
        out.append(lam)
    return out


def sample_pairs(seed: int, n: int, mu: float, radius: float = 2.0) -> List[Tuple[complex, complex]]:
    flat = sample_lambdas(seed, 2 * n, mu, radius)
    pairs = []
    for k in range(n):
        l1, l2 = flat[2 * k], flat[2 * k + 1]
        # keep l1 +/- l2 clear of the trivial zeros as well
        if min(abs(np.sinh(mu * (l1 - l2))), abs(np.sinh(mu * (l1 + l2)))) < 1e-3:
            l2 = l2 + 0.123 + 0.05j
        pairs.append((l1, l2))
    return pairs


def partial_transpose_first(op, d: int) -> np.ndarray:
    """Transpose on the first factor of ``C^d (x) C^d``."""
    t = np.asarray(op).reshape(d, d, d, d)
    return t.transpose(2, 1, 0, 3).reshape(d * d, d * d)


@dataclass(frozen=True)
class LaxFactory:
    rep: LocalRep
    P: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "P", permutation(self.rep.d))

    @property
    def params(self) -> AlgebraParams:
        return self.rep.params

    @property
    def d(self) -> int:
        return self.rep.d

    @property
    def mu(self) -> float:
        return self.params.mu

    @property
    def U(self) -> np.ndarray:
        return self.rep.U_local

    @property
    def e(self) -> Optional[np.ndarray]:
        return self.rep.e_local

    @property
    def trivial(self) -> bool:
        return self.rep.e_local is None

    # scalar functions
    def a(self, lam):
        return complex(np.sinh(self.mu * (lam + 1j)))

    def b(self, lam):
        return complex(np.sinh(self.mu * lam))

    def x(self, lam):
        p, mu = self.params, self.mu
        return complex(-p.delta_e * np.cosh(mu * (2 * lam + 1j)) - p.kappa * np.cosh(2 * mu * lam)
                       - np.cosh(2j * mu * p.zeta))

    def y(self, lam):
        return complex(2 * np.sinh(2 * self.mu * lam) * np.sinh(1j * self.mu))

    def unitarity_scalar(self, lam):
        return self.a(lam) * self.a(-lam)

    # matrices
    def Rcheck(self, lam) -> np.ndarray:
        return self.a(lam) * np.eye(self.d ** 2) + self.b(lam) * self.U

    def R(self, lam) -> np.ndarray:
        return self.P @ self.Rcheck(lam)

    def R21(self, lam) -> np.ndarray:
        return self.P @ self.R(lam) @ self.P

    def Rhat(self, lam) -> np.ndarray:
        return self.Rcheck(lam) @ self.P

    def Rhat_by_inverse(self, lam) -> np.ndarray:
        """``R(-l)^{-1} a(l) a(-l)`` computed with an explicit inverse."""
        return invert(self.R(-lam)) * self.unitarity_scalar(lam)

    def K(self, lam) -> np.ndarray:
        if self.trivial:
            return np.eye(self.d, dtype=complex)
        return self.x(lam) * np.eye(self.d) + self.y(lam) * self.e

    def twist(self) -> np.ndarray:
        q = self.params.q
        if self.d == 2:
            return np.diag([q, 1 / q])
        return np.diag([1j, 1 / q, q, -1j])

    # derivatives at l = 0
    def dR0(self) -> np.ndarray:
        mu = self.mu
        return self.P @ (mu * np.cosh(1j * mu) * np.eye(self.d ** 2) + mu * self.U)

    def dRhat0(self) -> np.ndarray:
        mu = self.mu
        return (mu * np.cosh(1j * mu) * np.eye(self.d ** 2) + mu * self.U) @ self.P

    def dK0(self) -> np.ndarray:
        if self.trivial:
            return np.zeros((self.d, self.d), dtype=complex)
        p, mu = self.params, self.mu
        dx = -2 * mu * p.delta_e * np.sinh(1j * mu)
        dy = 4 * mu * np.sinh(1j * mu)
        return dx * np.eye(self.d) + dy * self.e

    # lambda -> +-infinity
    def asymptotics(self) -> Dict[str, Dict[int, np.ndarray]]:
        """Limits ``Rcheck^pm = U + q^{pm1}``, ``R^pm``, ``Rhat^pm = Rcheck^pm P`` and ``K^pm``."""
        q, d = self.params.q, self.d
        rc = {+1: self.U + q * np.eye(d * d), -1: self.U + np.eye(d * d) / q}
        out = {
            "Rcheck": rc,
            "R": {s: self.P @ rc[s] for s in (1, -1)},
            "Rhat": {s: rc[s] @ self.P for s in (1, -1)},
        }
        if self.trivial:
            out["K"] = {s: np.eye(d, dtype=complex) for s in (1, -1)}
        else:
            c = {+1: self.params.c_plus, -1: self.params.c_minus}
            out["K"] = {s: self.e + c[s] * np.eye(d) for s in (1, -1)}
        return out


def _three(lax, op, legs):
    return act_on(op, legs, 3, lax.d)


def check_ybe(lax: LaxFactory, pairs: Sequence[Tuple[complex, complex]], tol: float = 1e-10,
              prefix: str = "ybe", negative: bool = False) -> List[CheckReport]:
    out = []
    for k, (l1, l2) in enumerate(pairs):
        R12 = _three(lax, lax.R(l1 - l2), (0, 1))
        R13 = _three(lax, lax.R(l1), (0, 2))
        R23 = _three(lax, lax.R(l2), (1, 2))
        res = eq_residual(R12 @ R13 @ R23, R23 @ R13 @ R12)
        out.append(make_report(f"{prefix}.pair{k:02d}", res, tol, params=lax.params,
                               negative=negative))
    return out


def re_residual(R, R21, K1, K2, l1, l2, d) -> float:
    """Reflection equation residual for matrix-valued ``R``/``K`` callables."""
    k1 = np.kron(K1(l1), np.eye(d)) if K1(l1).shape[0] == d else K1(l1)
    k2 = np.kron(np.eye(d), K2(l2)) if K2(l2).shape[0] == d else K2(l2)
    lhs = R(l1 - l2) @ k1 @ R21(l1 + l2) @ k2
    rhs = k2 @ R(l1 + l2) @ k1 @ R21(l1 - l2)
    return eq_residual(lhs, rhs)


def check_re(lax: LaxFactory, pairs: Sequence[Tuple[complex, complex]], tol: float = 1e-10,
             prefix: str = "re") -> List[CheckReport]:
    out = []
    for k, (l1, l2) in enumerate(pairs):
        res = re_residual(lax.R, lax.R21, lax.K, lax.K, l1, l2, lax.d)
        out.append(make_report(f"{prefix}.pair{k:02d}", res, tol, params=lax.params))
    return out


def check_unitarity_crossing(lax: LaxFactory, lams: Sequence[complex], tol: float = 1e-10,
                             prefix: str = "conditions") -> List[CheckReport]:
    d, M = lax.d, lax.twist()
    rho = lax.params.crossing_rho
    M1 = np.kron(M, np.eye(d))
    M1i = np.linalg.inv(M1)
    MM = np.kron(M, M)
    I = np.eye(d * d)
    uni, cross, comm = [], [], []
    for lam in lams:
        uni.append(scalar_fit(lax.R(lam) @ lax.R21(-lam), I)[1])
        prod = (M1i @ partial_transpose_first(lax.R(lam), d) @ M1
                @ partial_transpose_first(lax.R21(-lam - 2j * rho), d))
        cross.append(scalar_fit(prod, I)[1])
        comm.append(comm_residual(MM, lax.R(lam)))
    p = lax.params
    return [
        make_report(f"{prefix}.unitarity", max(uni), tol, params=p),
        make_report(f"{prefix}.crossing", max(cross), tol, params=p),
        make_report(f"{prefix}.twist_symmetric", eq_residual(M, M.T), tol, params=p),
        make_report(f"{prefix}.twist_commutes", max(comm), tol, params=p),
    ]


def check_braid(lax: LaxFactory, tol: float = 1e-10, prefix: str = "conditions") -> List[CheckReport]:
    """Constant braid relations obeyed by the limits on spaces (0, i, i+1)."""
    asy = lax.asymptotics()
    out = []
    for s, tag in ((1, "plus"), (-1, "minus")):
        Rc = _three(lax, asy["Rcheck"][s], (1, 2))
        R0i = _three(lax, asy["R"][s], (0, 1))
        R0j = _three(lax, asy["R"][s], (0, 2))
        H0i = _three(lax, asy["Rhat"][s], (0, 1))
        H0j = _three(lax, asy["Rhat"][s], (0, 2))
        out.append(make_report(f"{prefix}.braid_{tag}", eq_residual(Rc @ R0j @ R0i, R0j @ R0i @ Rc),
                               tol, params=lax.params))
        out.append(make_report(f"{prefix}.braid_hat_{tag}",
                               eq_residual(Rc @ H0i @ H0j, H0i @ H0j @ Rc), tol, params=lax.params))
    return out


def check_rr2(lax: LaxFactory, tol: float = 1e-10, prefix: str = "conditions") -> List[CheckReport]:
    """Spectral-free reflection relation of the constant limits.

    Both sign patterns hold for each limit: all four factors at the same
    sign, and the outer pair carrying the opposite sign to the inner pair.
    """
    asy, d = lax.asymptotics(), lax.d
    R, Rh = asy["R"], asy["Rhat"]
    out = []
    for s, tag in ((1, "plus"), (-1, "minus")):
        K1 = np.kron(asy["K"][s], np.eye(d))
        K2 = np.kron(np.eye(d), asy["K"][s])
        mixed = eq_residual(R[-s] @ K1 @ Rh[s] @ K2, K2 @ R[s] @ K1 @ Rh[-s])
        same = eq_residual(R[s] @ K1 @ Rh[s] @ K2, K2 @ R[s] @ K1 @ Rh[s])
        out.append(make_report(f"{prefix}.rr2_{tag}", mixed, tol, params=lax.params))
        out.append(make_report(f"{prefix}.rr2_{tag}_same_sign", same, tol, params=lax.params))
    return out


def check_asymptotics(lax: LaxFactory, big: float = 30.0, tol: float = 1e-8,
                      prefix: str = "conditions") -> List[CheckReport]:
    """Closed-form limits against direct evaluation at ``l = +-big``."""
    asy = lax.asymptotics()
    d = lax.d
    out = [make_report(f"{prefix}.rcheck_inverse",
                       eq_residual(asy["Rcheck"][1] @ asy["Rcheck"][-1], np.eye(d * d)), 1e-10,
                       params=lax.params)]
    if not lax.trivial:
        for s, tag in ((1, "plus"), (-1, "minus")):
            lam = s * big
            res = eq_residual(lax.K(lam) / lax.y(lam), asy["K"][s])
            out.append(make_report(f"{prefix}.K_limit_{tag}", res, tol, params=lax.params))
    for s, tag in ((1, "plus"), (-1, "minus")):
        lam = s * big
        scale = 2 * s * np.exp(-lax.mu * big)
        res = eq_residual(lax.Rcheck(lam) * scale, asy["Rcheck"][s])
        out.append(make_report(f"{prefix}.R_limit_{tag}", res, tol, params=lax.params))
    return out
