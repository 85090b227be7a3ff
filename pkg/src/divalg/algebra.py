"""Finite-dimensional real algebras given by structure constants.

An algebra of dimension n is stored as a tensor ``c`` of shape (n, n, n) with
``e_i e_j = sum_k c[i, j, k] e_k``.  Elements are plain float vectors and linear
maps are n x n arrays whose column j is the image of e_j.  Every function that
takes elements also accepts stacks of them (shape ``(m, n)``) so that sampled
checks can be vectorised.
"""

import json

import numpy as np


class SingularOperatorError(ArithmeticError):
    """A multiplication operator (or other map) is not invertible at tolerance."""


class ZeroDivisorError(SingularOperatorError):
    """Division by the zero element."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class Algebra:
    """Real algebra with structure constants ``constants[i, j, k]``.

    Instances are treated as immutable: the constants array is copied and
    marked read-only on construction.
    """

    __slots__ = ("dim", "constants", "labels", "tol", "meta")

    def __init__(self, constants, labels=None, tol=1e-9, meta=None):
        c = np.array(constants, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] == 0:
            raise ValueError(f"constants must have shape (n, n, n), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("constants must be finite")
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        c.setflags(write=False)
        self.dim = c.shape[0]
        self.constants = c
        self.labels = tuple(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.dim:
            raise ValueError("one label per basis vector is required")
        self.tol = float(tol)
        # free-form provenance (e.g. the involution pair of an invinv algebra)
        self.meta = dict(meta) if meta else {}

    def __repr__(self):
        name = self.meta.get("name", "")
        return f"Algebra(dim={self.dim}{', ' + name if name else ''})"

    def basis(self, i):
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def to_dict(self):
        out = {"dim": self.dim, "constants": self.constants.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        out["tol"] = self.tol
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "constants" not in data:
            raise ValueError("algebra JSON needs a 'constants' entry")
        c = np.array(data["constants"], dtype=float)
        if "dim" in data and c.shape[:1] != (data["dim"],):
            raise ValueError("'dim' does not match the constants")
        return cls(c, labels=data.get("labels"), tol=data.get("tol", 1e-9))


def dumps(obj):
    """JSON with 17 significant digits for floats and stable key order."""
    return json.dumps(_round_floats(obj), indent=2)


def _round_floats(obj):
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return str(obj)
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round_floats(obj.tolist())
    if isinstance(obj, np.generic):
        return _round_floats(obj.item())
    return obj


def _check(A, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != A.dim:
        raise ValueError(f"element of length {x.shape[-1]} in algebra of dim {A.dim}")
    return x


def multiply(A, x, y):
    x, y = _check(A, x), _check(A, y)
    return np.einsum("...i,...j,ijk->...k", x, y, A.constants)


def left_mul(A, a):
    """Matrix of L_a: y -> a y (stacked if ``a`` is a stack)."""
    a = _check(A, a)
    return np.einsum("...i,ijk->...kj", a, A.constants)


def right_mul(A, a):
    """Matrix of R_a: x -> x a."""
    a = _check(A, a)
    return np.einsum("...j,ijk->...ki", a, A.constants)


def _solve(A, M, rhs, which):
    s = np.linalg.svd(M, compute_uv=False)
    if np.all(s[..., 0] == 0):
        raise ZeroDivisorError(f"{which} division by zero")
    if np.any(s[..., -1] <= A.tol * s[..., 0]):
        raise SingularOperatorError(f"{which} multiplication operator is singular")
    # LAPACK gesv uses partial pivoting; the SVD above already guards conditioning
    return np.linalg.solve(M, rhs[..., None])[..., 0]


def left_divide(A, a, y):
    """a \\ y, the solution x of a x = y."""
    y = _check(A, y)
    return _solve(A, left_mul(A, a), y, "left")


def right_divide(A, x, b):
    """x / b, the solution z of z b = x."""
    x = _check(A, x)
    return _solve(A, right_mul(A, b), x, "right")


def _require_invertible(M, tol, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= tol * max(s[0], 1e-300):
        raise SingularOperatorError(f"{name} is singular")
    return M


def isotope(A, alpha, beta, tol=None):
    """The algebra with product x o y = alpha(x) beta(y)."""
    tol = A.tol if tol is None else tol
    alpha = _require_invertible(alpha, tol, "alpha")
    beta = _require_invertible(beta, tol, "beta")
    if alpha.shape[0] != A.dim or beta.shape[0] != A.dim:
        raise ValueError("isotopy maps must match the algebra dimension")
    c = np.einsum("pi,qj,pqk->ijk", alpha, beta, A.constants)
    return Algebra(c, labels=A.labels, tol=A.tol)


def opposite(A):
    return Algebra(np.transpose(A.constants, (1, 0, 2)), labels=A.labels, tol=A.tol, meta=A.meta)


def conjugate_by(A, phi):
    """Transport the product along phi: x o y = phi(phi^-1 x phi^-1 y)."""
    phi = np.asarray(phi, dtype=float)
    inv = np.linalg.inv(phi)
    c = np.einsum("pi,qj,pqr,kr->ijk", inv, inv, A.constants, phi)
    return Algebra(c, tol=A.tol)


def scaled(A, factor):
    return Algebra(factor * A.constants, labels=A.labels, tol=A.tol)


def find_idempotent(A, seed=0, max_restarts=50, max_iter=100, start=None):
    """Nonzero e with e e = e, found by Newton's method from seeded random starts.

    The Jacobian of F(x) = x x - x is L_x + R_x - I.  When ``start`` is given it
    is tried before the random starts.
    """
    rng = np.random.default_rng(seed)
    eye = np.eye(A.dim)
    starts = [] if start is None else [np.asarray(start, dtype=float)]
    for _ in range(max_restarts):
        v = rng.standard_normal(A.dim)
        starts.append(v / np.linalg.norm(v))
    best = np.inf
    for x in starts:
        x = x.copy()
        for _ in range(max_iter):
            F = multiply(A, x, x) - x
            if np.linalg.norm(F) < 1e-15 * max(1.0, np.linalg.norm(x)):
                break
            J = left_mul(A, x) + right_mul(A, x) - eye
            try:
                step = np.linalg.solve(J, F)
            except np.linalg.LinAlgError:
                break
            x = x - step
            if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e8:
                break
            if np.linalg.norm(step) < 1e-16 * max(1.0, np.linalg.norm(x)):
                break
        if not np.all(np.isfinite(x)):
            continue
        r = np.linalg.norm(multiply(A, x, x) - x)
        if np.linalg.norm(x) > A.tol:
            best = min(best, r)
            if r < A.tol:
                return x
    raise ConvergenceError(
        f"no idempotent after {max_restarts} Newton runs (best residual {best:.3g})",
        best_residual=best,
    )


def star_product(A, e):
    """The product x * y = (x/e)(e\\y); e is a two-sided unit for it."""
    e = _check(A, e)
    if np.linalg.norm(e) <= A.tol:
        raise ZeroDivisorError("idempotent must be nonzero")
    if np.linalg.norm(multiply(A, e, e) - e) > A.tol * max(1.0, np.linalg.norm(e)) * 10:
        raise ValueError("e is not an idempotent")
    Re, Le = right_mul(A, e), left_mul(A, e)
    _require_invertible(Re, A.tol, "R_e")
    _require_invertible(Le, A.tol, "L_e")
    return isotope(A, np.linalg.inv(Re), np.linalg.inv(Le))


def hua_check(A, a, b):
    """Frobenius residual of L_a L_b L_a = L_a + ((L_a - L_b^-1)^-1 - L_a^-1)^-1.

    When L_a L_b = I the inner inverse does not exist; that case returns 0.
    """
    La, Lb = left_mul(A, a), left_mul(A, b)
    eye = np.eye(A.dim)
    if np.linalg.norm(La @ Lb - eye) < A.tol:
        return 0.0
    for M, name in ((La, "L_a"), (Lb, "L_b")):
        _require_invertible(M, A.tol, name)
    inner = La - np.linalg.inv(Lb)
    _require_invertible(inner, A.tol, "L_a - L_b^-1")
    outer = np.linalg.inv(inner) - np.linalg.inv(La)
    _require_invertible(outer, A.tol, "(L_a - L_b^-1)^-1 - L_a^-1")
    lhs = La @ Lb @ La
    rhs = La + np.linalg.inv(outer)
    return float(np.linalg.norm(lhs - rhs))
