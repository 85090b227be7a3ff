"""Linear-algebraic invariants of algebras given by structure constants."""

from dataclasses import dataclass, field

import numpy as np

from .algebra import isotope, left_mul, multiply, right_mul
from .hurwitz import d6_subspaces, hurwitz, polar_decompose
from .linalg import RANK_RTOL, nullspace

UNDETERMINED = "undetermined"


@dataclass
class TderBasis:
    triples: list
    dim: int
    gap: float
    projections: tuple
    kernels: tuple

    def to_dict(self):
        return {
            "dim": self.dim,
            "gap": self.gap,
            "projection_dims": list(self.projections),
            "projection_kernel_dims": list(self.kernels),
        }


def tder_matrix(A):
    """Rows index (i, j, k); columns index the entries of d1, d2, d3 (each row-major)."""
    n = A.dim
    c = A.constants
    eye = np.eye(n)
    M = np.zeros((n, n, n, 3, n, n))
    # d1(e_i e_j)_k = sum_p c[i,j,p] d1[k,p]
    M[:, :, :, 0] = np.einsum("ijp,kK->ijkKp", c, eye)
    # (d2 e_i) e_j = sum_q d2[q,i] c[q,j,k]
    M[:, :, :, 1] = -np.einsum("qjk,iI->ijkqI", c, eye)
    # e_i (d3 e_j) = sum_q d3[q,j] c[i,q,k]
    M[:, :, :, 2] = -np.einsum("iqk,jJ->ijkqJ", c, eye)
    return M.reshape(n**3, 3 * n * n)


def tder(A, rtol=RANK_RTOL):
    """Ternary derivations (d1, d2, d3) with d1(xy) = d2(x) y + x d3(y)."""
    n = A.dim
    basis, rank, gap = nullspace(tder_matrix(A), rtol)
    triples = [tuple(col.reshape(3, n, n)) for col in basis.T]
    projections, kernels = [], []
    for b in range(3):
        block = basis.reshape(3, n * n, -1)[b]
        r = nullspace(block.T, rtol)[1] if basis.shape[1] else 0
        projections.append(int(r))
        kernels.append(int(basis.shape[1] - r))
    return TderBasis(triples, basis.shape[1], gap, tuple(projections), tuple(kernels))


def tder_residual(A, triple):
    d1, d2, d3 = triple
    c = A.constants
    lhs = np.einsum("ijp,kp->ijk", c, d1)
    rhs = np.einsum("qi,qjk->ijk", d2, c) + np.einsum("qj,iqk->ijk", d3, c)
    return float(np.max(np.abs(lhs - rhs)))


def _associator_maps(A):
    """Linear maps a -> associator coordinates with a in the left, middle, right slot."""
    c = A.constants
    # left: (a e_i) e_j - a (e_i e_j)
    left = np.einsum("aip,pjk->ijka", c, c) - np.einsum("ijp,apk->ijka", c, c)
    # middle: (e_i a) e_j - e_i (a e_j)
    middle = np.einsum("iap,pjk->ijka", c, c) - np.einsum("ajp,ipk->ijka", c, c)
    # right: (e_i e_j) a - e_i (e_j a)
    right = np.einsum("ijp,pak->ijka", c, c) - np.einsum("jap,ipk->ijka", c, c)
    n = A.dim
    return [m.reshape(n**3, n) for m in (left, middle, right)]


@dataclass
class Nuclei:
    left: np.ndarray
    middle: np.ndarray
    right: np.ndarray
    gaps: tuple

    @property
    def dims(self):
        return (self.left.shape[1], self.middle.shape[1], self.right.shape[1])


def nuclei(A, rtol=RANK_RTOL):
    bases, gaps = [], []
    for M in _associator_maps(A):
        basis, _, gap = nullspace(M, rtol)
        bases.append(basis)
        gaps.append(gap)
    return Nuclei(*bases, gaps=tuple(gaps))


def _lstsq_operator(A, target, which):
    """Best b with M_b ~ target, M = L or R; returns (b, relative residual)."""
    n = A.dim
    ops = left_mul(A, np.eye(n)) if which == "L" else right_mul(A, np.eye(n))
    design = ops.reshape(n, n * n).T
    b, *_ = np.linalg.lstsq(design, target.reshape(-1), rcond=None)
    res = np.linalg.norm(design @ b - target.reshape(-1)) / max(np.linalg.norm(target), 1e-300)
    return b, float(res)


@dataclass
class InversionReport:
    has_left_inversion: bool
    max_witness_residual: float
    inversion_samples: list
    involutive: object = None
    max_involution_residual: float = None

    def to_dict(self):
        return {
            "has_left_inversion": self.has_left_inversion,
            "max_witness_residual": self.max_witness_residual,
            "involutive": self.involutive,
            "max_involution_residual": self.max_involution_residual,
            "samples": len(self.inversion_samples),
        }


def left_inversion(A, samples=20, seed=0, tol=1e-8):
    """Sampled test of L_a^-1 = L_{s(a)}; s(a) is found by least squares."""
    rng = np.random.default_rng(seed)
    pairs, worst = [], 0.0
    attempts = 0
    while len(pairs) < samples:
        attempts += 1
        if attempts > 20 * samples:
            raise ArithmeticError("could not draw invertible left multiplications")
        a = rng.standard_normal(A.dim)
        La = left_mul(A, a)
        if np.linalg.cond(La) > 1e8:
            continue
        sa, res = _lstsq_operator(A, np.linalg.inv(La), "L")
        worst = max(worst, res)
        pairs.append((a, sa))
    has = worst < tol
    involutive, inv_res = None, None
    if has:
        inv_res = 0.0
        for (a, sa), (b, sb) in zip(pairs, pairs[1:] + pairs[:1]):
            ab = multiply(A, a, b)
            s_ab, _ = _lstsq_operator(A, np.linalg.inv(left_mul(A, ab)), "L")
            rhs = multiply(A, sb, sa)
            inv_res = max(inv_res, np.linalg.norm(s_ab - rhs) / max(1.0, np.linalg.norm(rhs)))
        involutive = bool(inv_res < tol)
    return InversionReport(bool(has), worst, pairs, involutive, inv_res)


def inversion_map(A, a):
    """s(a), the element with L_{s(a)} = L_a^-1 (least squares if none exists exactly)."""
    return _lstsq_operator(A, np.linalg.inv(left_mul(A, a)), "L")[0]


def rotation_factor(gamma, H=None):
    """Unit quaternions (a, u) with gamma = L_a R_u for gamma in SO(4).

    The 16 maps L_{e_p} R_{e_q} are Frobenius-orthogonal with squared norm 4,
    so the coefficient matrix of gamma is the rank-one a u^T.
    """
    H = hurwitz(4) if H is None else H
    Ls = left_mul(H, np.eye(4))
    Rs = right_mul(H, np.eye(4))
    basis = np.einsum("pij,qjk->pqik", Ls, Rs)
    K = np.einsum("pqik,ik->pq", basis, gamma) / 4.0
    U, s, Vt = np.linalg.svd(K)
    a = U[:, 0] * np.sqrt(s[0])
    u = Vt[0] * np.sqrt(s[0])
    lead = a[np.flatnonzero(np.abs(a) > 1e-12)[0]]
    if lead < 0:
        a, u = -a, -u
    rank_one = float(s[1] / s[0]) if s[0] > 0 else np.inf
    return a, u, rank_one


@dataclass
class CriterionResult:
    holds: bool
    agrees: bool
    a: np.ndarray = None
    u: np.ndarray = None
    rho: float = None
    reason: str = ""

    def __bool__(self):
        return self.holds


def criterion_check(alpha, beta, tol=1e-8, samples=8, seed=0):
    """Decide whether the quaternion isotope H_{alpha,beta} has inversion on the left.

    The decision uses only beta: it must be a positive multiple of a rotation
    L_a R_u with u^2 real.  The left-inversion sampler on the isotope is run as
    an independent cross-check.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.shape != (4, 4) or beta.shape != (4, 4):
        raise ValueError("criterion_check works on the quaternions (4 x 4 maps)")
    for M, name in ((alpha, "alpha"), (beta, "beta")):
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= 1e-12 * s[0]:
            raise np.linalg.LinAlgError(f"{name} is singular")
    H = hurwitz(4)
    holds, a, u, rho, reason = False, None, None, None, ""
    if np.linalg.det(beta) < 0:
        reason = "det beta < 0, so beta is not L_a R_u"
    else:
        gamma, delta = polar_decompose(beta)
        rho = float(np.trace(delta) / 4.0)
        if np.linalg.norm(delta - rho * np.eye(4)) > tol * rho * 10:
            reason = "positive-definite factor is not scalar"
        else:
            a, u, _ = rotation_factor(gamma, H)
            a = rho * a
            usq = multiply(H, u, u)
            if np.linalg.norm(usq[1:]) > tol * 10 * max(1.0, abs(usq[0])):
                reason = "u^2 is not real"
            else:
                holds = True
    report = left_inversion(isotope(H, alpha, beta), samples=samples, seed=seed, tol=1e-7)
    return CriterionResult(holds, holds == report.has_left_inversion, a, u, rho, reason)


def morphism_residual(A, B, phi):
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (B.dim, A.dim):
        raise ValueError("phi must map A into B")
    lhs = np.einsum("ijp,kp->ijk", A.constants, phi)
    rhs = np.einsum("pi,qj,pqk->ijk", phi, phi, B.constants)
    return float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))


def d6_dims(sigma, tau, tol=1e-8):
    sigma = np.asarray(sigma, dtype=float)
    tau = np.asarray(tau, dtype=float)
    eye = np.eye(sigma.shape[0])
    ts = tau @ sigma
    for M, name in ((sigma @ sigma, "sigma^2"), (tau @ tau, "tau^2"), (ts @ ts @ ts, "(tau sigma)^3")):
        if np.linalg.norm(M - eye) > tol * max(1.0, sigma.shape[0]):
            raise ValueError(f"{name} is not the identity")
    T, S, N = d6_subspaces(sigma, tau)
    t, s = T.shape[1], S.shape[1]
    return (t, s, sigma.shape[0] - t - s)


def _unit_solve(A, which):
    n = A.dim
    b, res = _lstsq_operator(A, np.eye(n), which)
    return b if res < 1e-8 else None


def center(A, rtol=RANK_RTOL):
    """Commutative center {z : z x = x z for all x}."""
    n = A.dim
    M = (left_mul(A, np.eye(n)) - right_mul(A, np.eye(n))).transpose(1, 2, 0).reshape(n * n, n)
    return nullspace(M, rtol)[0]


def central_idempotent(A, seed=0, restarts=50, max_iter=100):
    """Nonzero idempotent in the center: True / False / UNDETERMINED, plus the element."""
    Z = center(A)
    if Z.shape[1] == 0:
        return False, None
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        w = rng.standard_normal(Z.shape[1])
        for _ in range(max_iter):
            x = Z @ w
            F = multiply(A, x, x) - x
            if np.linalg.norm(F) < 1e-14:
                break
            J = (left_mul(A, x) + right_mul(A, x) - np.eye(A.dim)) @ Z
            step = np.linalg.lstsq(J, F, rcond=None)[0]
            w = w - step
            if not np.all(np.isfinite(w)) or np.linalg.norm(w) > 1e8:
                break
        x = Z @ w
        if np.all(np.isfinite(x)) and np.linalg.norm(x) > 1e-6:
            if np.linalg.norm(multiply(A, x, x) - x) < A.tol:
                return True, x
    return UNDETERMINED, None


@dataclass
class Fingerprint:
    dim: int
    has_left_unit: bool
    has_right_unit: bool
    has_unit: bool
    has_central_idempotent: object
    nuclei_dims: tuple
    tder_dim: int
    d6_dims: tuple = None
    gaps: dict = field(default_factory=dict, compare=False)

    def key(self):
        return (
            self.dim,
            self.has_left_unit,
            self.has_right_unit,
            self.has_unit,
            self.has_central_idempotent,
            tuple(self.nuclei_dims),
            self.tder_dim,
            None if self.d6_dims is None else tuple(self.d6_dims),
        )

    def __eq__(self, other):
        return isinstance(other, Fingerprint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_dict(self):
        out = {
            "dim": self.dim,
            "has_left_unit": self.has_left_unit,
            "has_right_unit": self.has_right_unit,
            "has_unit": self.has_unit,
            "has_central_idempotent": self.has_central_idempotent,
            "nuclei_dims": list(self.nuclei_dims),
            "tder_dim": self.tder_dim,
        }
        if self.d6_dims is not None:
            out["d6_dims"] = list(self.d6_dims)
        out["gaps"] = dict(self.gaps)
        return out


def fingerprint(A, seed=0):
    left = _unit_solve(A, "L") is not None
    right = _unit_solve(A, "R") is not None
    central, _ = central_idempotent(A, seed=seed)
    nuc = nuclei(A)
    td = tder(A)
    d6 = None
    spec = A.meta.get("invinv") if isinstance(A.meta, dict) else None
    if spec is not None:
        d6 = d6_dims(spec.sigma, spec.tau)
    gaps = {"tder": td.gap, "nuclei": list(nuc.gaps)}
    return Fingerprint(A.dim, left, right, left and right, central, nuc.dims, td.dim, d6, gaps)


def left_unit(A):
    return _unit_solve(A, "L")


def right_unit(A):
    return _unit_solve(A, "R")

