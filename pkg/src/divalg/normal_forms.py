"""Normal forms for the SO(3)-sets of quaternion classification data.

A datum in family ``Bij`` is (u, c, b, B, beta) where u is present for i = 1,
c is projective for j = 0 and affine for j = 1, b is a vector and B is
symmetric.  Rotations f act by (f u, f c, f b, f B f^T, beta).  ``reduce``
brings B to an ascending diagonal and then canonicalises the vectors under
the stabiliser of that diagonal; ``membership`` tests the result against the
cross-section sets stored in ``data/normal_forms.json``.
"""

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources

import numpy as np

from .algebra import isotope, left_mul, right_mul
from .hurwitz import conjugation, hurwitz

FAMILIES = ("B00", "B01", "B10", "B11")
EIG_GAP = 1e-9
NEAR_DEGENERATE = 1e-3
SNAP = 1e-9
MEMBER_TOL = 1e-9

# diagonal sign changes with determinant +1
KLEIN = [np.diag(s) for s in ((1.0, 1.0, 1.0), (-1.0, -1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0))]


def _projective_normalize(v):
    """Scale so the first nonzero coordinate is 1."""
    v = np.asarray(v, dtype=float)
    nz = np.flatnonzero(v)
    if nz.size == 0:
        raise ValueError("projective vector must be nonzero")
    return v / v[nz[0]]


@dataclass(frozen=True)
class ClassDatum:
    family: str
    c: np.ndarray
    b: np.ndarray
    B: np.ndarray
    beta: float = 1.0
    u: np.ndarray = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {', '.join(FAMILIES)}")
        c = np.array(self.c, dtype=float).reshape(3)
        b = np.array(self.b, dtype=float).reshape(3)
        B = np.array(self.B, dtype=float).reshape(3, 3)
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(b)) and np.all(np.isfinite(B))):
            raise ValueError("datum entries must be finite")
        if np.max(np.abs(B - B.T)) > 1e-9 * max(1.0, np.max(np.abs(B))):
            raise ValueError("B must be symmetric")
        B = 0.5 * (B + B.T)
        if self.family[2] == "0":
            c = _projective_normalize(c)
        u = self.u
        if self.family[1] == "1":
            if u is None:
                raise ValueError(f"family {self.family} needs u")
            u = _projective_normalize(np.array(u, dtype=float).reshape(3))
        elif u is not None:
            raise ValueError(f"family {self.family} has no u")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def vectors(self):
        return ([self.u] if self.u is not None else []) + [self.c, self.b]

    @property
    def projective(self):
        return _data()["projective"][self.family]

    def with_vectors(self, vectors, B=None):
        vs = list(vectors)
        u = vs.pop(0) if self.u is not None else None
        return replace(self, u=u, c=vs[0], b=vs[1], B=self.B if B is None else B)

    def act(self, f):
        f = np.asarray(f, dtype=float)
        return self.with_vectors([f @ v for v in self.vectors], B=f @ self.B @ f.T)

    def delta(self):
        return np.block([[np.array([[self.beta]]), self.b[None, :]], [self.b[:, None], self.B]])

    def to_dict(self):
        out = {"family": self.family}
        if self.u is not None:
            out["u"] = self.u.tolist()
        out.update(c=self.c.tolist(), b=self.b.tolist(), B=self.B.tolist(), beta=self.beta)
        return out

    @classmethod
    def from_dict(cls, data, family=None):
        if not isinstance(data, dict):
            raise ValueError("datum JSON must be an object")
        family = family or data.get("family")
        try:
            return cls(family=family, c=data["c"], b=data["b"], B=data["B"],
                       beta=data.get("beta", 1.0), u=data.get("u"))
        except KeyError as exc:
            raise ValueError(f"datum JSON is missing {exc.args[0]!r}") from None


@dataclass
class NormalFormRecord:
    stratum: int
    d: np.ndarray
    canonical: ClassDatum
    witness_rotation: np.ndarray
    block: tuple = None
    in_table: bool = True
    ambiguous: bool = False
    near_degenerate: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "stratum": self.stratum,
            "d": list(map(float, self.d)),
            "canonical": self.canonical.to_dict(),
            "witness_rotation": self.witness_rotation.tolist(),
            "block": None if self.block is None else {"set": self.block[0], "index": self.block[1]},
            "in_table": self.in_table,
            "ambiguous": self.ambiguous,
            "near_degenerate": self.near_degenerate,
        }


# ---- stored cross-section sets

@lru_cache(maxsize=None)
def _data():
    text = resources.files("divalg").joinpath("data/normal_forms.json").read_text()
    return json.loads(text)


def set_name(family, stratum):
    return f"N{family[1:]}^{stratum}"


def blocks(name):
    return _data()["sets"][name]


def _columns(block):
    """Per-column symbol triples of a block (composite columns as 'P1'/'P2')."""
    rows = [r.split() for r in block["rows"]]
    cols = []
    for j in range(len(rows[0])):
        col = [rows[i][j] for i in range(3)]
        if "|" in col or "P1" in col or "P2" in col:
            comp = [s for s in col if s in ("P1", "P2")]
            cols.append(comp[0])
        else:
            cols.append(col)
    return cols


def _in_p2(v, tol):
    x, y, z = v
    if x > tol and y > tol:
        return True
    if x > tol and abs(y) <= tol and z >= -tol:
        return True
    return abs(x) <= tol and y >= -tol and z >= -tol


def _symbol_ok(sym, x, tol):
    if sym == "R":
        return True
    if sym == "0":
        return abs(x) <= tol
    if sym == "1":
        return abs(x - 1.0) <= tol
    if sym == "P":
        return x > tol
    if sym == "N":
        return x >= -tol
    raise ValueError(f"unknown symbol {sym!r}")


def _column_ok(symbols, v, projective, tol):
    scale = max(1.0, float(np.max(np.abs(v))))
    t = tol * scale
    if symbols == "P1":
        return bool(np.max(np.abs(v)) > t)
    if symbols == "P2":
        return _in_p2(v, t)
    if projective:
        ones = [k for k, s in enumerate(symbols) if s == "1"]
        if not ones:
            raise ValueError("projective column without a normalising entry")
        k = ones[0]
        if abs(v[k]) <= t:
            return False
        v = v / v[k]
        t = tol * max(1.0, float(np.max(np.abs(v))))
    return all(_symbol_ok(s, x, t) for s, x in zip(symbols, v))


def _block_ok(block, vectors, projective, tol):
    if "product" in block:
        head = vectors[0]
        if not np.any(head):
            return False
        head = _projective_normalize(head)
        if not any(np.allclose(head, _projective_normalize(np.array(p, float)), atol=tol) for p in block["product"]):
            return False
        return bool(matching_blocks(block["with"], vectors[1:], projective[1:], tol))
    cols = _columns(block)
    return all(_column_ok(s, v, p, tol) for s, v, p in zip(cols, vectors, projective))


def matching_blocks(name, vectors, projective, tol=MEMBER_TOL):
    return [i for i, blk in enumerate(blocks(name)) if _block_ok(blk, vectors, projective, tol)]


def _scale_to_block(name, index, vectors, projective):
    """Rescale projective columns to the normalisation of the matched block."""
    blk = blocks(name)[index]
    if "product" in blk:
        head = _projective_normalize(vectors[0])
        rest = _scale_to_block(blk["with"], matching_blocks(blk["with"], vectors[1:], projective[1:])[0],
                               vectors[1:], projective[1:])
        return [head] + rest
    out = []
    for sym, v, p in zip(_columns(blk), vectors, projective):
        if p and isinstance(sym, list) and "1" in sym:
            v = v / v[sym.index("1")]
        elif p:
            v = _projective_normalize(v)
        out.append(v)
    return out


# ---- diagonalisation

def diagonalize_symmetric(B, gap=EIG_GAP):
    """(d ascending, R in SO(3), stratum) with R^T B R = diag(d).

    Eigenvalues closer than ``gap`` (relative to the spectral scale) are merged
    and replaced by their mean, so the strata are exact.
    """
    B = np.asarray(B, dtype=float)
    d, R = np.linalg.eigh(0.5 * (B + B.T))
    scale = max(1.0, float(np.max(np.abs(d))))
    eq12 = d[1] - d[0] < gap * scale
    eq23 = d[2] - d[1] < gap * scale
    if eq12 and eq23:
        stratum, d = 1, np.full(3, d.mean())
        R = np.eye(3)
    elif eq12:
        stratum = 2
        d = np.array([d[:2].mean(), d[:2].mean(), d[2]])
    elif eq23:
        stratum = 3
        d = np.array([d[0], d[1:].mean(), d[1:].mean()])
    else:
        stratum = 4
    if np.linalg.det(R) < 0:
        R[:, 2] = -R[:, 2]
    return d, R, stratum


def stratum_of(d, gap=EIG_GAP):
    scale = max(1.0, float(np.max(np.abs(d))))
    eq12 = abs(d[1] - d[0]) < gap * scale
    eq23 = abs(d[2] - d[1]) < gap * scale
    return {(True, True): 1, (True, False): 2, (False, True): 3, (False, False): 4}[(eq12, eq23)]


def _rotation_to_e1(v):
    """A rotation sending v to |v| e1."""
    a = v / np.linalg.norm(v)
    helper = np.eye(3)[np.argmin(np.abs(a))]
    b = helper - (helper @ a) * a
    b /= np.linalg.norm(b)
    c = np.cross(a, b)
    return np.vstack([a, b, c])


def _plane_rotation(i, j, x, y):
    """Rotation in the (i, j) coordinate plane sending (x, y) to (r, 0)."""
    r = np.hypot(x, y)
    cth, sth = x / r, y / r
    G = np.eye(3)
    G[i, i], G[i, j], G[j, i], G[j, j] = cth, sth, -sth, cth
    return G


def _snap(vectors):
    out = []
    for v in vectors:
        v = v.copy()
        v[np.abs(v) < SNAP * max(1.0, float(np.max(np.abs(v))))] = 0.0
        out.append(v)
    return out


def _continuous_phase(vectors, stratum):
    """Rotation in the identity component of the stabiliser normalising the vectors."""
    g = np.eye(3)
    vs = _snap(vectors)

    def nonzero(x):
        return np.any(x != 0.0)

    if stratum == 1:
        first = next((k for k, v in enumerate(vs) if nonzero(v)), None)
        if first is None:
            return g
        g = _rotation_to_e1(vs[first])
        vs = _snap([g @ v for v in vectors])
        for v in vs[first + 1:]:
            if nonzero(v[1:]):
                g = _plane_rotation(1, 2, v[1], v[2]) @ g
                break
        return g
    if stratum in (2, 3):
        i, j = (0, 1) if stratum == 2 else (1, 2)
        for v in vs:
            if v[i] != 0.0 or v[j] != 0.0:
                return _plane_rotation(i, j, v[i], v[j])
    return g


def _lex_key(vectors):
    return tuple(-x for v in vectors for x in v)


def reduce(datum, gap=EIG_GAP):
    """Canonical representative of the SO(3)-orbit of ``datum``."""
    d, Q, stratum = diagonalize_symmetric(datum.B, gap)
    f0 = Q.T
    vectors = [f0 @ v for v in datum.vectors]
    g = _continuous_phase(vectors, stratum)
    base = _snap([g @ v for v in vectors])
    projective = datum.projective
    name = set_name(datum.family, stratum)
    matches = []
    for K in KLEIN:
        cand = _snap([K @ v for v in base])
        cand = [_projective_normalize(v) if p else v for v, p in zip(cand, projective)]
        hits = matching_blocks(name, cand, projective)
        if hits:
            matches.append((K, cand, hits[0]))
    if matches:
        K, cand, index = matches[0]
        distinct = {tuple(np.round(np.concatenate(c), 12)) for _, c, _ in matches}
        ambiguous = len(distinct) > 1
        cand = _scale_to_block(name, index, cand, projective)
        block, in_table = (name, index), True
    else:
        # no representative in the stored sets: fall back to a deterministic choice
        options = []
        for K in KLEIN:
            c = [_projective_normalize(v) if p else v for v, p in zip(_snap([K @ v for v in base]), projective)]
            options.append((_lex_key(c), K, c))
        options.sort(key=lambda t: t[0])
        _, K, cand = options[0]
        block, in_table, ambiguous = None, False, False
    f = K @ g @ f0
    gaps = np.diff(d)
    scale = max(1.0, float(np.max(np.abs(d))))
    distinct_gaps = [x for x in gaps if x >= gap * scale]
    near = bool(distinct_gaps) and min(distinct_gaps) < NEAR_DEGENERATE * scale
    canonical = datum.with_vectors([v + 0.0 for v in cand], B=np.diag(d))
    diagnostics = {"candidates_matched": len(matches)}
    return NormalFormRecord(stratum, d, canonical, f, block, in_table, ambiguous, near, diagnostics)


def membership(record, tol=MEMBER_TOL):
    """Whether a record's canonical datum lies in the stored set for its stratum."""
    datum = record.canonical if isinstance(record, NormalFormRecord) else record
    B = datum.B
    d = np.diag(B)
    scale = max(1.0, float(np.max(np.abs(B))))
    if np.max(np.abs(B - np.diag(d))) > tol * scale or np.any(np.diff(d) < -tol * scale):
        return False
    stratum = stratum_of(d)
    if isinstance(record, NormalFormRecord) and record.stratum != stratum:
        return False
    name = set_name(datum.family, stratum)
    return bool(matching_blocks(name, datum.vectors, datum.projective, tol))


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# ---- division algebras from classification data

@dataclass(frozen=True)
class DivisionAlgebraDatum:
    a: np.ndarray
    delta: np.ndarray
    u: np.ndarray
    sign: int = 1

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(4)
        delta = np.array(self.delta, dtype=float).reshape(4, 4)
        u = np.array(self.u, dtype=float).reshape(4)
        if not np.any(a):
            raise ValueError("a must be nonzero")
        if np.max(np.abs(delta - delta.T)) > 1e-9:
            raise ValueError("delta must be symmetric")
        if np.min(np.linalg.eigvalsh(delta)) <= 0:
            raise ValueError("delta must be positive definite")
        if abs(np.linalg.det(delta) - 1.0) > 1e-8:
            raise ValueError("delta must have determinant 1")
        if not np.any(u):
            raise ValueError("u must be nonzero")
        # u^2 is real exactly when u is real or purely imaginary
        if abs(u[0]) * np.linalg.norm(u[1:]) > 1e-9 * (u @ u):
            raise ValueError("u^2 must be a real multiple of 1")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "u", u)


def build_division_algebra(datum):
    """H_{L_a delta, R_u} for sign +1 and H_{R_a delta kappa, R_u} for sign -1."""
    H = hurwitz(4)
    if datum.sign == 1:
        alpha = left_mul(H, datum.a) @ datum.delta
    else:
        alpha = right_mul(H, datum.a) @ datum.delta @ conjugation(H)
    return isotope(H, alpha, right_mul(H, datum.u))


def algebra_datum(datum, sign=1):
    """Lift a classification datum to (a, delta, u); delta must be positive definite of det 1."""
    c = datum.c
    a = np.concatenate([[0.0 if datum.family[2] == "0" else 1.0], c])
    u = np.array([1.0, 0, 0, 0]) if datum.u is None else np.concatenate([[0.0], datum.u])
    return DivisionAlgebraDatum(a, datum.delta(), u, sign)


def lift_rotation(f):
    """The automorphism 1 + f of the quaternions for f in SO(3)."""
    phi = np.eye(4)
    phi[1:, 1:] = f
    return phi


def transport_map(datum, f, sign=1):
    """Isomorphism from the algebra of ``datum`` to the algebra of ``datum.act(f)``.

    Projective renormalisation rescales a and u by positive or negative
    factors; the product scales by their product, which the map divides out.
    """
    phi = lift_rotation(f)
    src, dst = algebra_datum(datum, sign), algebra_datum(datum.act(f), sign)
    lam = (dst.a @ (phi @ src.a)) / ((phi @ src.a) @ (phi @ src.a))
    mu = (dst.u @ (phi @ src.u)) / ((phi @ src.u) @ (phi @ src.u))
    return phi / (lam * mu)
