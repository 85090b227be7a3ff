"""Hurwitz algebras, their automorphisms and the involutive-inversion family."""

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, ZeroDivisorError, isotope, multiply, right_mul
from .linalg import intersect_kernels, nullspace

LABELS = {
    1: ("1",),
    2: ("1", "i"),
    4: ("1", "i", "j", "k"),
    8: ("1", "i", "j", "ij", "l", "il", "jl", "(ij)l"),
}


class HurwitzAlgebra(Algebra):
    """One of R, C, H, O with the standard orthonormal basis (unit first)."""

    __slots__ = ("unit_index",)

    def __init__(self, constants, labels=None, tol=1e-9, meta=None):
        super().__init__(constants, labels=labels, tol=tol, meta=meta)
        self.unit_index = 0

    @property
    def norm_matrix(self):
        return np.eye(self.dim)

    @property
    def one(self):
        return self.basis(0)


def _cayley_dickson(c):
    """Double the algebra with constants c: (a,b)(c,d) = (ac - conj(d) b, da + b conj(c))."""
    n = c.shape[0]
    conj = np.full(n, -1.0)
    conj[0] = 1.0
    out = np.zeros((2 * n, 2 * n, 2 * n))
    for p in range(n):
        for q in range(n):
            prod_pq = c[p, q]
            prod_qp = c[q, p]
            # (e_p,0)(e_q,0) = (e_p e_q, 0)
            out[p, q, :n] = prod_pq
            # (e_p,0)(0,e_q) = (0, e_q e_p)
            out[p, n + q, n:] = prod_qp
            # (0,e_p)(e_q,0) = (0, e_p conj(e_q))
            out[n + p, q, n:] = conj[q] * prod_pq
            # (0,e_p)(0,e_q) = (-conj(e_q) e_p, 0)
            out[n + p, n + q, :n] = -conj[q] * prod_qp
    return out


def hurwitz(dim):
    if dim not in LABELS:
        raise ValueError(f"Hurwitz algebras exist only in dimensions 1, 2, 4, 8 (got {dim})")
    c = np.ones((1, 1, 1))
    while c.shape[0] < dim:
        c = _cayley_dickson(c)
    name = {1: "R", 2: "C", 4: "H", 8: "O"}[dim]
    return HurwitzAlgebra(c, labels=LABELS[dim], meta={"name": name})


def conjugation(H):
    k = -np.eye(H.dim)
    k[0, 0] = 1.0
    return k


def trace_form(H, x):
    return 2.0 * np.asarray(x, dtype=float)[..., 0]


def norm_form(H, x):
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def inverse(H, x):
    n = norm_form(H, x)
    if np.any(n <= H.tol):
        raise ZeroDivisorError("element of zero norm has no inverse")
    return (np.asarray(x, dtype=float) @ conjugation(H).T) / np.asarray(n)[..., None]


def imaginary_basis(H):
    return np.eye(H.dim)[:, 1:]


@dataclass(frozen=True)
class CayleyTriple:
    u: np.ndarray
    v: np.ndarray
    z: np.ndarray

    def validate(self, H, tol=1e-9):
        u, v, z = (np.asarray(w, dtype=float) for w in (self.u, self.v, self.z))
        uv = multiply(H, u, v)
        vecs = [u, v, uv, z]
        for w in (u, v, z):
            if abs(w[0]) > tol:
                raise ValueError("Cayley triple entries must be imaginary")
            if abs(np.linalg.norm(w) - 1.0) > tol:
                raise ValueError("Cayley triple entries must have unit norm")
        for a in range(4):
            for b in range(a + 1, 4):
                if abs(vecs[a] @ vecs[b]) > tol:
                    raise ValueError("u, v, uv, z must be mutually orthogonal")


def automorphism_from_cayley_triple(triple, H=None, tol=1e-9):
    H = hurwitz(8) if H is None else H
    triple.validate(H, tol)
    u, v, z = (np.asarray(w, dtype=float) for w in (triple.u, triple.v, triple.z))
    uv = multiply(H, u, v)
    cols = [H.one, u, v, uv, z, multiply(H, u, z), multiply(H, v, z), multiply(H, uv, z)]
    return np.column_stack(cols)


def automorphism_from_pair(u, v, H=None, tol=1e-9):
    """Automorphism of H sending i, j to the orthonormal imaginary pair u, v."""
    H = hurwitz(4) if H is None else H
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    for w in (u, v):
        if abs(w[0]) > tol or abs(np.linalg.norm(w) - 1.0) > tol:
            raise ValueError("u and v must be unit imaginary quaternions")
    if abs(u @ v) > tol:
        raise ValueError("u and v must be orthogonal")
    return np.column_stack([H.one, u, v, multiply(H, u, v)])


def cayley_triple_from_automorphism(phi):
    phi = np.asarray(phi, dtype=float)
    return CayleyTriple(phi[:, 1].copy(), phi[:, 2].copy(), phi[:, 4].copy())


def pair_from_automorphism(phi):
    phi = np.asarray(phi, dtype=float)
    return phi[:, 1].copy(), phi[:, 2].copy()


def random_cayley_triple(rng, H=None):
    """Uniformly oriented triple: Gram-Schmidt on random imaginary vectors."""
    H = hurwitz(8) if H is None else H

    def unit_orth(span):
        w = np.zeros(8)
        w[1:] = rng.standard_normal(7)
        for s in span:
            w -= (w @ s) * s
        return w / np.linalg.norm(w)

    one = H.one
    u = unit_orth([one])
    v = unit_orth([one, u])
    uv = multiply(H, u, v)
    z = unit_orth([one, u, v, uv])
    return CayleyTriple(u, v, z)


def random_automorphism(rng, H):
    if H.dim == 8:
        return automorphism_from_cayley_triple(random_cayley_triple(rng, H), H)
    if H.dim == 4:
        u = np.zeros(4)
        u[1:] = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        v = np.zeros(4)
        v[1:] = rng.standard_normal(3)
        v -= (v @ u) * u
        v /= np.linalg.norm(v)
        return automorphism_from_pair(u, v, H)
    if H.dim == 2:
        return conjugation(H) if rng.random() < 0.5 else np.eye(2)
    return np.eye(1)


# (cos, sin) of 2pi/3, kept symbolic so that (tau sigma)^3 = I to machine precision
C3 = -0.5
S3 = np.sqrt(3.0) / 2.0

INVINV_LABELS = ("R", "C-id", "C-conj", "H-id", "H-22", "H-111", "O-id", "O-44", "O-222", "O-113")

# canonical string -> item tag of the classification list
INVINV_TAGS = {
    "R": "1", "C-id": "2", "C-conj": "3", "H-id": "4", "H-22": "22",
    "H-111": "111", "O-id": "8", "O-44": "44", "O-222": "222", "O-113": "113",
}


@dataclass(frozen=True)
class InvInvSpec:
    base: str
    sigma: np.ndarray
    tau: np.ndarray
    label: str

    @property
    def tag(self):
        return INVINV_TAGS[self.label]

    def relation_residual(self):
        s, t = self.sigma, self.tau
        eye = np.eye(s.shape[0])
        ts = t @ s
        return max(
            np.linalg.norm(s @ s - eye),
            np.linalg.norm(t @ t - eye),
            np.linalg.norm(ts @ ts @ ts - eye),
        )


def _e(n, i):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _invinv_maps(label):
    if label == "R":
        return "R", np.eye(1), np.eye(1)
    if label in ("C-id", "C-conj"):
        m = np.eye(2) if label == "C-id" else conjugation(hurwitz(2))
        return "C", m, m
    if label.startswith("H-"):
        H = hurwitz(4)
        i, j = _e(4, 1), _e(4, 2)
        if label == "H-id":
            return "H", np.eye(4), np.eye(4)
        sigma = automorphism_from_pair(i, -j, H)
        if label == "H-22":
            return "H", sigma, sigma
        tau = automorphism_from_pair(C3 * i + S3 * j, S3 * i - C3 * j, H)
        return "H", sigma, tau
    if label.startswith("O-"):
        O = hurwitz(8)
        i, j, l = _e(8, 1), _e(8, 2), _e(8, 4)
        il, jl = _e(8, 5), _e(8, 6)

        def aut(u, v, z):
            return automorphism_from_cayley_triple(CayleyTriple(u, v, z), O)

        if label == "O-id":
            return "O", np.eye(8), np.eye(8)
        if label == "O-44":
            s = aut(i, j, -l)
            return "O", s, s
        if label == "O-222":
            return "O", aut(-i, -j, l), aut(-i, -j, C3 * l + S3 * il)
        if label == "O-113":
            return "O", aut(i, j, -l), aut(C3 * i + S3 * il, C3 * j + S3 * jl, -l)
    raise ValueError(f"unknown invinv label {label!r}; expected one of {', '.join(INVINV_LABELS)}")


def invinv_algebra(label):
    """The algebra B_{sigma,tau} (product sigma(x) tau(y)) for one of the ten labels."""
    base, sigma, tau = _invinv_maps(label)
    spec = InvInvSpec(base=base, sigma=sigma, tau=tau, label=label)
    B = hurwitz({"R": 1, "C": 2, "H": 4, "O": 8}[base])
    A = isotope(B, sigma, tau)
    return Algebra(A.constants, labels=B.labels, tol=B.tol, meta={"name": label, "invinv": spec}), spec


def d6_subspaces(sigma, tau, rtol=1e-8):
    """Orthonormal bases (columns) of T, S and N for an involutive pair."""
    n = sigma.shape[0]
    eye = np.eye(n)
    T = intersect_kernels([sigma - eye, tau - eye], rtol)
    S = intersect_kernels([sigma + eye, tau + eye], rtol)
    TS = np.hstack([T, S])
    N = nullspace(TS.T, rtol)[0] if TS.shape[1] else eye
    return T, S, N


def squareidp_check(spec, x, H=None):
    """Residual of sigma(x) tau(x) = -|x|^2 (c - s y) for the best unit y in S.

    Returns ``(residual, y, idempotent_residual)`` where the last entry measures
    how far c - s y is from being idempotent for the twisted product.
    """
    H = hurwitz(spec.sigma.shape[0]) if H is None else H
    x = np.asarray(x, dtype=float)
    T, S, N = d6_subspaces(spec.sigma, spec.tau)
    if S.shape[1] == 0:
        raise ValueError("S subspace is trivial for this pair")
    if np.linalg.norm(x - N @ (N.T @ x)) > 1e-8 * max(1.0, np.linalg.norm(x)):
        raise ValueError("x does not lie in N")
    one = H.one
    nx2 = x @ x
    if nx2 == 0:
        return 0.0, S[:, 0].copy(), _idem_residual(spec, H, C3 * one - S3 * S[:, 0])
    sq = multiply(H, spec.sigma @ x, spec.tau @ x)
    # -sq/|x|^2 = c - s y  =>  y = (c - (-sq/|x|^2)) / s, projected into S
    target = (C3 * one + sq / nx2) / S3
    y = S @ (S.T @ target)
    ny = np.linalg.norm(y)
    y = y / ny if ny > 0 else S[:, 0].copy()
    residual = float(np.linalg.norm(sq + nx2 * (C3 * one - S3 * y)))
    return residual, y, _idem_residual(spec, H, C3 * one - S3 * y)


def _idem_residual(spec, H, w):
    return float(np.linalg.norm(multiply(H, spec.sigma @ w, spec.tau @ w) - w))


def vector_product_algebra(H):
    """Rebuild H on R x Im H from the inner product and the half commutator.

    (lam, v)(mu, w) = (lam mu - <v, w>, lam w + mu v + [v, w]/2).
    """
    n = H.dim
    c = np.zeros((n, n, n))
    c[0, 0, 0] = 1.0
    for a in range(1, n):
        c[0, a, a] = 1.0
        c[a, 0, a] = 1.0
        for b in range(1, n):
            va, vb = H.basis(a), H.basis(b)
            comm = 0.5 * (multiply(H, va, vb) - multiply(H, vb, va))
            c[a, b, 1:] = comm[1:]
            c[a, b, 0] = -(va @ vb)
    return Algebra(c, labels=H.labels, tol=H.tol)


def polar_decompose(M, tol=1e-9):
    """M = gamma delta with gamma orthogonal and delta symmetric positive definite."""
    M = np.asarray(M, dtype=float)
    U, s, Vt = np.linalg.svd(M)
    if s[-1] <= tol * s[0]:
        raise np.linalg.LinAlgError("polar decomposition needs an invertible map")
    gamma = U @ Vt
    delta = Vt.T @ np.diag(s) @ Vt
    return gamma, 0.5 * (delta + delta.T)


def right_operator_det_sign(A, x):
    return np.sign(np.linalg.det(right_mul(A, x)))
