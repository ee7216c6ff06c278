"""Blob-algebra and quantum-group representations.

Two families of blob-algebra representations are built here:

* the XXZ representation on ``(C^2)^N`` with boundary element acting on site 1;
* the asymmetric twin representation on ``(C^4)^N``.  Each folded site is the
  pair ``V_{l-} (x) V_{l+}`` (mirror factor first), so the two ``C^2`` factors
  of folded site 1 are the unfolded sites ``N`` and ``N+1``.  All four twin
  boundary elements act on folded site 1.

The ``U_q(sl2)`` side provides the local triples ``(E, F, H)`` named ``rho``,
``sigma1``, ``sigma2``, ``rho1``, ``rho2`` together with their coproduct
towers and the boundary charges ``Q = q^{-1/2} H E + q^{1/2} H F + x (H^2 - 1)``.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .report import CheckReport, make_report
from .tensor import SiteLayout, comm_residual, embed, eq_residual, kron, leg_permute, scalar_fit

__all__ = [
    "AlgebraParams",
    "make_params",
    "u_matrix",
    "theta_product",
    "theta_closed_form",
    "boundary_element",
    "LocalRep",
    "xxz_rep",
    "twin_rep",
    "check_blob",
    "QGroupRep",
    "qgroup_rep",
    "ChargeTower",
    "tower",
    "boundary_charge",
    "charge_constant",
    "check_qgroup_relations",
    "check_centralizer_local",
    "check_factorization",
    "perturbed_rep",
    "MODELS",
    "BOUNDARIES",
]

MODELS = ("xxz", "twin")
BOUNDARIES = ("trivial", "xxz-m", "i", "ii", "plus", "iii")
TWIN_BOUNDARIES = ("i", "ii", "plus", "iii")


def cpow(z: complex, p: float) -> complex:
    """Principal branch power ``z**p``."""
    return complex(np.exp(p * np.log(complex(z))))


@dataclass(frozen=True)
class AlgebraParams:
    mu: float
    q: complex
    delta: complex
    Q_rep: complex
    zeta: complex
    r: complex
    r_hat: complex
    delta_e: complex
    kappa: complex
    model: str = "xxz"
    boundary: str = "xxz-m"
    crossing_rho: float = 1.0
    c_plus: complex = 0j
    c_minus: complex = 0j

    @property
    def sinh_imu(self) -> complex:
        return complex(np.sinh(1j * self.mu))

    def algebraic_boundary(self):
        """Normalisation ``s`` and algebraic boundary parameter with ``c_pm = s Q^{pm 1}``."""
        s = cpow(self.c_plus * self.c_minus, 0.5)
        return s, self.c_plus / s

    def with_kappa(self, kappa: complex) -> "AlgebraParams":
        """Copy with a different kappa; used for negative controls."""
        return replace(self, kappa=complex(kappa))


def _kappa_table(q: complex, Q: complex, sinh_imu: complex) -> Dict[str, complex]:
    den = 2j * sinh_imu
    k_i = (Q / q + q / Q) / den
    k_ii = (1j * Q - 1j / Q) / den
    return {
        "xxz-m": (q / Q + Q / q) / den,
        "trivial": (q / Q + Q / q) / den,
        "i": k_i,
        "ii": k_ii,
        "plus": k_i + k_ii,
        "iii": (Q / q + q / Q + 2) / den,
    }


def make_params(mu: float, Q_rep: complex = 2.0, zeta: complex = 0.3,
                model: str = "xxz", boundary: str = "xxz-m") -> AlgebraParams:
    """Derive every scalar of a model from ``mu`` and the boundary parameter ``Q``."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if boundary not in BOUNDARIES:
        raise ValueError(f"unknown boundary {boundary!r}")
    mu = float(mu)
    if abs(np.sin(mu)) < 1e-12:
        raise ValueError(f"degenerate mu={mu}: sinh(i mu) vanishes for mu in pi*Z")
    Q = complex(Q_rep)
    if Q == 0 or abs(Q + 1 / Q) < 1e-10:
        raise ValueError(f"degenerate Q={Q}: Q + 1/Q vanishes")
    q = complex(np.exp(1j * mu))
    sinh_imu = complex(np.sinh(1j * mu))
    r_hat = cpow(1j * q, 0.5)
    r = 1j * r_hat
    delta_e = -(Q + 1 / Q) / (2j * sinh_imu)
    kappa = _kappa_table(q, Q, sinh_imu)[boundary]
    c_plus = (-delta_e * q - kappa) / (q - 1 / q)
    c_minus = (delta_e / q + kappa) / (q - 1 / q)
    return AlgebraParams(
        mu=mu, q=q, delta=-(q + 1 / q), Q_rep=Q, zeta=complex(zeta), r=r, r_hat=r_hat,
        delta_e=delta_e, kappa=kappa, model=model, boundary=boundary,
        c_plus=c_plus, c_minus=c_minus,
    )


def u_matrix(q: complex) -> np.ndarray:
    """Local Temperley-Lieb generator ``U(q)`` on C^2 (x) C^2."""
    q = complex(q)
    return np.array([[0, 0, 0, 0],
                     [0, -q, 1, 0],
                     [0, 1, -1 / q, 0],
                     [0, 0, 0, 0]], dtype=complex)


def theta_product(r: complex, r_hat: complex) -> np.ndarray:
    """Twin generator built as ``U(r)`` on (2-,1-) times ``U(r_hat)`` on (1+,2+).

    The product acts on the unfolded ordering ``(2-, 1-, 1+, 2+)``; it is then
    reordered to the folded ordering ``(1-, 1+, 2-, 2+)``.
    """
    unfolded = np.kron(u_matrix(r), u_matrix(r_hat))
    return leg_permute(unfolded, [2, 3, 1, 4], 2)


def theta_closed_form(r: complex, r_hat: complex) -> np.ndarray:
    """The 16x16 twin generator entered entry by entry, folded ordering."""
    q = -r * r_hat
    m = np.zeros((16, 16), dtype=complex)
    idx = (3, 6, 9, 12)
    block = [
        [-1j, -1 / r, -r_hat, 1],
        [-1 / r, -1 / q, 1, -1 / r_hat],
        [-r_hat, 1, -q, -r],
        [1, -1 / r_hat, -r, 1j],
    ]
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            m[i, j] = block[a][b]
    return m


def boundary_element(params: AlgebraParams, boundary: Optional[str] = None) -> np.ndarray:
    """Local matrix of the blob generator (2x2 for XXZ, 4x4 for twin)."""
    boundary = boundary or params.boundary
    Q, de = params.Q_rep, params.delta_e
    pref = -de / (Q + 1 / Q)
    if boundary == "xxz-m":
        return pref * np.array([[-1 / Q, 1], [1, -Q]], dtype=complex)
    if boundary == "i":
        return pref * u_matrix(Q)
    if boundary == "ii":
        return pref * np.array([[-Q, 0, 0, 1],
                                [0, 0, 0, 0],
                                [0, 0, 0, 0],
                                [1, 0, 0, -1 / Q]], dtype=complex)
    if boundary == "plus":
        return boundary_element(params, "i") + boundary_element(params, "ii")
    if boundary == "iii":
        Q2 = cpow(1j * Q, 0.5)
        Q1 = 1j * Q2
        m1 = np.array([[-Q1, 1], [1, -1 / Q1]], dtype=complex)
        m2 = np.array([[-1 / Q2, 1], [1, -Q2]], dtype=complex)
        return de / ((Q1 + 1 / Q1) * (Q2 + 1 / Q2)) * np.kron(m1, m2)
    raise ValueError(f"no boundary element for boundary {boundary!r}")


@dataclass(frozen=True)
class LocalRep:
    layout: SiteLayout
    U_gens: List[np.ndarray]
    e_gen: Optional[np.ndarray]
    params: AlgebraParams
    model_tag: str
    boundary_tag: str
    U_local: np.ndarray = field(repr=False, default=None)
    e_local: Optional[np.ndarray] = field(repr=False, default=None)

    @property
    def d(self) -> int:
        return self.layout.local_dim

    @property
    def N(self) -> int:
        return self.layout.num_sites


def _build_rep(params, N, U_local, e_local, model, boundary):
    if N < 2:
        raise ValueError("a chain needs N >= 2")
    d = 2 if model == "xxz" else 4
    layout = SiteLayout(N, d)
    U_gens = [embed(U_local, l, 2, layout) for l in range(1, N)]
    e_gen = None if e_local is None else embed(e_local, 1, 1, layout)
    return LocalRep(layout, U_gens, e_gen, params, model, boundary, U_local, e_local)


def xxz_rep(params: AlgebraParams, N: int, boundary: str = "xxz-m") -> LocalRep:
    if boundary not in ("xxz-m", "trivial"):
        raise ValueError(f"boundary {boundary!r} is not an XXZ boundary")
    e_local = boundary_element(params, "xxz-m") if boundary == "xxz-m" else None
    return _build_rep(params, N, u_matrix(params.q), e_local, "xxz", boundary)


def twin_rep(params: AlgebraParams, N: int, boundary: str = "i",
             theta: Optional[np.ndarray] = None) -> LocalRep:
    """Twin representation; ``theta`` overrides the local generator (perturbation tests)."""
    if boundary not in TWIN_BOUNDARIES + ("trivial",):
        raise ValueError(f"boundary {boundary!r} is not a twin boundary")
    U_local = theta_closed_form(params.r, params.r_hat) if theta is None else np.asarray(theta, complex)
    e_local = None if boundary == "trivial" else boundary_element(params, boundary)
    return _build_rep(params, N, U_local, e_local, "twin", boundary)


def perturbed_rep(rep: LocalRep, eps: float = 1e-2, entry=None) -> LocalRep:
    """Same chain with one nonzero entry of the local U shifted by ``eps``.

    Defaults to 1-based entry (4, 7) for the twin generator and (2, 3) for XXZ.
    """
    if entry is None:
        entry = (4, 7) if rep.d == 4 else (2, 3)
    U = np.array(rep.U_local, dtype=complex)
    U[entry[0] - 1, entry[1] - 1] += eps
    return _build_rep(rep.params, rep.N, U, rep.e_local, rep.model_tag, rep.boundary_tag)


def check_blob(rep: LocalRep, tol: float = 1e-10, kappa: Optional[complex] = None,
               prefix: str = "algebra") -> List[CheckReport]:
    """One report per defining relation of the TL, B-type Hecke and blob quotients."""
    p = rep.params
    kappa = p.kappa if kappa is None else kappa
    U, e, n = rep.U_gens, rep.e_gen, len(rep.U_gens)
    checks = []

    def add(name, value):
        checks.append((f"{prefix}.{name}", value))

    add("U_squared", max(eq_residual(u @ u, p.delta * u) for u in U))
    if n >= 2:
        add("hecke_braid", max(
            eq_residual(U[i] @ U[i + 1] @ U[i] - U[i], U[i + 1] @ U[i] @ U[i + 1] - U[i + 1])
            for i in range(n - 1)))
        add("tl_UUU", max(max(eq_residual(U[i] @ U[i + 1] @ U[i], U[i]),
                              eq_residual(U[i + 1] @ U[i] @ U[i + 1], U[i + 1]))
                          for i in range(n - 1)))
    far = [(i, j) for i in range(n) for j in range(i + 2, n)]
    if far:
        add("distant_commute", max(comm_residual(U[i], U[j]) for i, j in far))
    if e is not None:
        u1 = U[0]
        add("e_squared", eq_residual(e @ e, p.delta_e * e))
        add("blob_quadratic", eq_residual(u1 @ e @ u1 @ e - kappa * u1 @ e,
                                          e @ u1 @ e @ u1 - kappa * e @ u1))
        if n >= 2:
            add("e_commutes_far", max(comm_residual(u, e) for u in U[1:]))
        add("U1_e_U1", eq_residual(u1 @ e @ u1, kappa * u1))
    return [make_report(cid, res, tol, params=p) for cid, res in checks]


@dataclass(frozen=True)
class QGroupRep:
    name: str
    E: np.ndarray
    F: np.ndarray
    H: np.ndarray
    deformation: complex

    @property
    def d(self) -> int:
        return self.H.shape[0]


def _e(i: int, j: int, d: int = 4) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


def _zpow(z: complex, sign: float = 1.0) -> np.ndarray:
    """``z^{sign * sigma^z / 2}`` on C^2."""
    return np.diag([cpow(z, 0.5 * sign), cpow(z, -0.5 * sign)])


def qgroup_rep(name: str, params: AlgebraParams) -> QGroupRep:
    q, r, rh = params.q, params.r, params.r_hat
    I2 = np.eye(2)
    if name == "rho":
        return QGroupRep(name, SIGMA_PLUS.copy(), SIGMA_MINUS.copy(), _zpow(q), q)
    if name == "sigma1":
        H = np.diag([cpow(1j, 0.5), 1, 1, cpow(1j, -0.5)])
        return QGroupRep(name, _e(1, 4), _e(4, 1), H, 1j)
    if name == "sigma2":
        H = np.diag([1, cpow(q, -0.5), cpow(q, 0.5), 1])
        return QGroupRep(name, _e(3, 2), _e(2, 3), H, q)
    if name == "rho1":
        return QGroupRep(name, np.kron(I2, SIGMA_PLUS), np.kron(I2, SIGMA_MINUS),
                         np.kron(I2, _zpow(rh)), rh)
    if name == "rho2":
        return QGroupRep(name, np.kron(SIGMA_MINUS, I2), np.kron(SIGMA_PLUS, I2),
                         np.kron(_zpow(r, -1.0), I2), r)
    raise ValueError(f"unknown quantum group representation {name!r}")


@dataclass(frozen=True)
class ChargeTower:
    rep: QGroupRep
    N: int
    E_N: np.ndarray
    F_N: np.ndarray
    H_N: np.ndarray
    Q_N: Optional[np.ndarray] = None
    Q_local: Optional[np.ndarray] = None
    x_const: Optional[complex] = None

    @property
    def H_inv(self) -> np.ndarray:
        return np.linalg.inv(self.H_N)

    def generators(self) -> Dict[str, np.ndarray]:
        return {"E": self.E_N, "F": self.F_N, "H": self.H_N}


def _coproduct_sum(X, left, right, N):
    """sum_j left^{(j-1)} (x) X (x) right^{(N-j)}."""
    total = None
    for j in range(N):
        term = kron(*([left] * j + [X] + [right] * (N - j - 1)))
        total = term if total is None else total + term
    return total


def tower(rep: QGroupRep, N: int) -> ChargeTower:
    """N-fold coproduct of ``E, F, H`` with Delta(x) = H^{-1} (x) x + x (x) H."""
    if N < 1:
        raise ValueError("N must be at least 1")
    Hinv = np.linalg.inv(rep.H)
    E_N = _coproduct_sum(rep.E, Hinv, rep.H, N)
    F_N = _coproduct_sum(rep.F, Hinv, rep.H, N)
    H_N = kron(*([rep.H] * N))
    return ChargeTower(rep, N, E_N, F_N, H_N)


# which constant formula goes with which deformation
_CONST_FOR_REP = {"rho": "q", "sigma2": "q", "sigma1": "i", "rho2": "r", "rho1": "r_hat"}


def charge_constant(kind: str, params: AlgebraParams) -> complex:
    """The constant ``x`` making the boundary charge commute with K."""
    Q, q, r, rh = params.Q_rep, params.q, params.r, params.r_hat
    if kind == "q":
        return (Q - 1 / Q) / (q - 1 / q)
    if kind == "i":
        return -(Q - 1 / Q) / 2j
    a, b = cpow(1j * Q, 0.5), cpow(-1j / Q, 0.5)
    if kind == "r":
        return 1j * (a + b) / (r - 1 / r)
    if kind == "r_hat":
        return (a - b) / (rh - 1 / rh)
    raise ValueError(f"unknown constant kind {kind!r}")


def boundary_charge(rep: QGroupRep, params: AlgebraParams, N: int,
                    x: Optional[complex] = None, kind: Optional[str] = None) -> ChargeTower:
    """Tower of ``E, F, H`` plus the boundary charge with Delta(Q) = 1 (x) Q + Q (x) H^2."""
    expected = _CONST_FOR_REP[rep.name]
    if kind is not None and kind != expected:
        raise ValueError(f"constant x_{kind} does not belong to representation {rep.name}")
    if x is None:
        x = charge_constant(expected, params)
    qq, H = rep.deformation, rep.H
    d = rep.d
    Q_local = (cpow(qq, -0.5) * H @ rep.E + cpow(qq, 0.5) * H @ rep.F
               + x * H @ H - x * np.eye(d))
    H2 = H @ H
    Q_N = _coproduct_sum(Q_local, np.eye(d), H2, N)
    base = tower(rep, N)
    return replace(base, Q_N=Q_N, Q_local=Q_local, x_const=complex(x))


def check_qgroup_relations(tw, tol: float = 1e-10, prefix: str = "qgroup") -> List[CheckReport]:
    """Deformed sl2 relations for a local triple or a tower."""
    if isinstance(tw, QGroupRep):
        name, qq, E, F, H = tw.name, tw.deformation, tw.E, tw.F, tw.H
    else:
        name, qq, E, F, H = tw.rep.name, tw.rep.deformation, tw.E_N, tw.F_N, tw.H_N
    H2 = H @ H
    H2i = np.linalg.inv(H2)
    out = [
        (f"{prefix}.{name}.HE", eq_residual(H @ E, qq * E @ H)),
        (f"{prefix}.{name}.HF", eq_residual(H @ F, F @ H / qq)),
        (f"{prefix}.{name}.EF", eq_residual(E @ F - F @ E, (H2 - H2i) / (qq - 1 / qq))),
    ]
    return [make_report(cid, res, tol) for cid, res in out]


def check_centralizer_local(rep: LocalRep, towers: Sequence[ChargeTower], tol: float = 1e-10,
                            prefix: str = "centralizer") -> List[CheckReport]:
    """[X^(N), pi(U_l)] for X in {E, F, H} of every tower."""
    out = []
    for tw in towers:
        if tw.H_N.shape != rep.U_gens[0].shape:
            raise ValueError("tower and representation act on different spaces")
        for g, X in tw.generators().items():
            res = max(comm_residual(X, u) for u in rep.U_gens)
            out.append(make_report(f"{prefix}.{tw.rep.name}.{g}", res, tol, params=rep.params))
    return out


def check_factorization(params: AlgebraParams, tol: float = 1e-12):
    """sigma generators written through rho1, rho2.

    Returns the reports and the fitted phase of sigma1(H) sigma2(H) against
    rho1(H) rho2(H).  That phase is not a single scalar, so the H-level identity
    is reported as a diagnostic, while the squared version
    sigma1(H)^2 sigma2(H)^2 = -rho1(H)^2 rho2(H)^2 is the gated one.
    """
    s1, s2 = qgroup_rep("sigma1", params), qgroup_rep("sigma2", params)
    p1, p2 = qgroup_rep("rho1", params), qgroup_rep("rho2", params)
    out = [
        make_report("factor.sigma1_E", eq_residual(s1.E, p1.E @ p2.F), tol),
        make_report("factor.sigma1_F", eq_residual(s1.F, p1.F @ p2.E), tol),
        make_report("factor.sigma2_E", eq_residual(s2.E, p1.E @ p2.E), tol),
        make_report("factor.sigma2_F", eq_residual(s2.F, p1.F @ p2.F), tol),
    ]
    lhs2 = s1.H @ s1.H @ s2.H @ s2.H
    rhs2 = p1.H @ p1.H @ p2.H @ p2.H
    out.append(make_report("factor.H_squared", eq_residual(lhs2, -rhs2), tol))
    phase, misfit = scalar_fit(s1.H @ s2.H, p1.H @ p2.H)
    out.append(make_report("factor.H_phase", misfit, tol, diagnostic=True,
                           notes=f"diagnostic: best phase {phase:.6g}, not a scalar multiple"))
    return out, phase, misfit
