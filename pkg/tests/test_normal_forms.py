import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from divalg.normal_forms import (
    FAMILIES,
    ClassDatum,
    DivisionAlgebraDatum,
    algebra_datum,
    blocks,
    build_division_algebra,
    diagonalize_symmetric,
    matching_blocks,
    membership,
    random_rotation,
    reduce,
    set_name,
    stratum_of,
    transport_map,
)
from divalg import hurwitz
from divalg.algebra import right_mul
from divalg.structure import left_inversion, morphism_residual

from .oracles import jacobi_eigen

seeds = st.integers(min_value=0, max_value=2**32 - 1)

# blocks per set (a product block counts once)
BLOCK_COUNTS = {
    "N00": (1, 4, 4, 10),
    "N01": (2, 5, 5, 10),
    "N10": (4, 10, 10, 26),
    "N11": (5, 10, 10, 14),
}


@pytest.mark.parametrize("prefix", sorted(BLOCK_COUNTS))
def test_block_counts(prefix):
    counts = tuple(len(blocks(f"{prefix}^{s}")) for s in (1, 2, 3, 4))
    assert counts == BLOCK_COUNTS[prefix]


def test_diagonalize_examples():
    d, R, s = diagonalize_symmetric(np.eye(3))
    assert np.allclose(d, 1) and s == 1
    d, R, s = diagonalize_symmetric(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(d, [1, 2, 3]) and s == 4
    assert np.isclose(np.linalg.det(R), 1)


@given(seeds)
def test_diagonalize_against_jacobi(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((3, 3))
    B = M + M.T
    d, R, s = diagonalize_symmetric(B)
    assert np.linalg.norm(R.T @ B @ R - np.diag(d)) < 1e-10
    assert np.isclose(np.linalg.det(R), 1)
    ref, _ = jacobi_eigen(B)
    assert np.allclose(d, np.sort(ref), atol=1e-10)


def _strata_diag(rng, s):
    d = np.sort(rng.standard_normal(3))
    while np.min(np.diff(d)) < 1e-2:
        d = np.sort(rng.standard_normal(3))
    if s == 1:
        d[:] = d[0]
    elif s == 2:
        d[1] = d[0]
    elif s == 3:
        d[2] = d[1]
    return d


def random_datum(rng, family, s):
    """Random datum whose vectors have random zero patterns in the eigenframe, then rotated."""
    d = _strata_diag(rng, s)
    vecs = []
    for _ in range(3 if family[1] == "1" else 2):
        v = rng.standard_normal(3)
        r = rng.random()
        if r < 0.1:
            v[:] = 0.0
        elif r < 0.35:
            v[rng.integers(3)] = 0.0
        elif r < 0.5:
            v[rng.choice(3, 2, replace=False)] = 0.0
        vecs.append(v)
    u = vecs.pop(0) if family[1] == "1" else None
    if u is not None and not u.any():
        u[2] = 1.0
    c, b = vecs
    if family[2] == "0" and not c.any():
        c[0] = 1.0
    Q = random_rotation(rng)
    return ClassDatum(family, c=Q @ c, b=Q @ b, B=Q @ np.diag(d) @ Q.T, beta=rng.random() + 0.5,
                      u=None if u is None else Q @ u)


def _same(x, y, tol):
    return all(np.max(np.abs(a - b)) <= tol for a, b in zip(x.vectors, y.vectors))


def test_stratum_one_example():
    datum = ClassDatum("B00", c=[0, 0, 1], b=[0, 0, -2], B=np.eye(3), beta=0.3)
    rec = reduce(datum)
    assert rec.stratum == 1
    assert np.allclose(rec.canonical.c, [1, 0, 0])
    assert np.allclose(rec.canonical.b, [2, 0, 0])
    assert membership(rec)


def test_stratum_one_orbit_invariants(rng):
    # oracle: for the full rotation group the orbit of (c, b) is fixed by |b|, |c| and the angle
    for _ in range(50):
        datum = random_datum(rng, "B01", 1)
        out = reduce(datum).canonical
        for f in (np.linalg.norm,):
            assert np.isclose(f(out.c), f(datum.c)) and np.isclose(f(out.b), f(datum.b))
        assert np.isclose(out.c @ out.b, datum.c @ datum.b)


def test_membership_example():
    assert matching_blocks("N00^2", [np.array([1, 0, 0.5]), np.array([2.0, -1, 3])], [True, False]) == [0]
    assert not matching_blocks("N00^2", [np.array([1, 0, -0.5]), np.array([2.0, -1, 3])], [True, False])


def test_membership_rejects_non_diagonal():
    datum = ClassDatum("B00", c=[1, 0, 0], b=[1, 0, 0], B=[[1, 0.1, 0], [0.1, 1, 0], [0, 0, 1]])
    assert not membership(datum)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_reduce_properties(family, s):
    rng = np.random.default_rng(hash((family, s)) % 2**32)
    for _ in range(150):
        datum = random_datum(rng, family, s)
        rec = reduce(datum)
        assert rec.stratum == s
        assert rec.in_table and not rec.ambiguous
        assert membership(rec)
        assert np.all(np.diff(rec.d) >= 0)
        # idempotence
        again = reduce(rec.canonical)
        assert _same(again.canonical, rec.canonical, 1e-9)
        # invariance
        g = random_rotation(rng)
        assert _same(reduce(datum.act(g)).canonical, rec.canonical, 1e-7)
        # the witness reproduces the canonical datum up to projective rescaling
        f = rec.witness_rotation
        assert np.allclose(f @ datum.B @ f.T, rec.canonical.B, atol=1e-9)
        for v, w, p in zip(datum.vectors, rec.canonical.vectors, datum.projective):
            v = f @ v
            if p:
                assert np.linalg.norm(np.cross(v, w)) < 1e-9 * np.linalg.norm(v) * np.linalg.norm(w)
            else:
                assert np.allclose(v, w, atol=1e-9)


def test_near_degenerate_flag():
    datum = ClassDatum("B01", c=[1, 2, 3], b=[0, 1, 0], B=np.diag([1.0, 1.0 + 1e-5, 2.0]))
    rec = reduce(datum)
    assert rec.stratum == 4 and rec.near_degenerate


def test_stratum_of():
    assert stratum_of([1, 1, 1]) == 1
    assert stratum_of([1, 1, 2]) == 2
    assert stratum_of([0, 1, 1]) == 3
    assert set_name("B10", 3) == "N10^3"


def test_datum_validation():
    with pytest.raises(ValueError):
        ClassDatum("B22", c=[1, 0, 0], b=[0, 0, 0], B=np.eye(3))
    with pytest.raises(ValueError):
        ClassDatum("B00", c=[0, 0, 0], b=[0, 0, 0], B=np.eye(3))
    with pytest.raises(ValueError):
        ClassDatum("B00", c=[1, 0, 0], b=[0, 0, 0], B=[[1, 2, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        ClassDatum("B10", c=[1, 0, 0], b=[0, 0, 0], B=np.eye(3))
    with pytest.raises(ValueError):
        ClassDatum("B00", c=[1, 0, 0], b=[0, 0, 0], B=np.eye(3), u=[1, 0, 0])
    d = ClassDatum("B10", c=[-2, 0, 1], b=[0, 0, 0], B=np.eye(3), u=[0, -3, 1])
    assert np.allclose(d.c, [1, 0, -0.5]) and np.allclose(d.u, [0, 1, -1 / 3])


def test_datum_json_round_trip():
    d = ClassDatum("B11", c=[1, 2, 3], b=[0, 1, 0], B=np.eye(3), beta=2.0, u=[0, 1, 0])
    back = ClassDatum.from_dict(d.to_dict())
    assert _same(back, d, 0) and back.beta == 2.0
    with pytest.raises(ValueError):
        ClassDatum.from_dict({"family": "B00", "c": [1, 0, 0]})


def _unit_delta(rng):
    M = rng.standard_normal((4, 4))
    delta = M @ M.T + 0.5 * np.eye(4)
    return delta / np.linalg.det(delta) ** 0.25


def _class_datum(rng, family):
    delta = _unit_delta(rng)
    u = rng.standard_normal(3) if family[1] == "1" else None
    return ClassDatum(family, c=rng.standard_normal(3), b=delta[1:, 0], B=delta[1:, 1:], beta=delta[0, 0], u=u)


def test_build_identity_datum_is_quaternions():
    A = build_division_algebra(DivisionAlgebraDatum(np.eye(4)[0], np.eye(4), np.eye(4)[0], 1))
    assert np.allclose(A.constants, hurwitz(4).constants)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("sign", [1, -1])
def test_built_algebras_have_left_inversion(family, sign, rng):
    for _ in range(5):
        A = build_division_algebra(algebra_datum(_class_datum(rng, family), sign))
        assert left_inversion(A, samples=10).has_left_inversion
        signs = {np.sign(np.linalg.det(right_mul(A, x))) for x in rng.standard_normal((20, 4))}
        assert signs == {sign}


@pytest.mark.parametrize("family", FAMILIES)
def test_rotated_data_give_isomorphic_algebras(family, rng):
    for sign in (1, -1):
        datum = _class_datum(rng, family)
        g = random_rotation(rng)
        A = build_division_algebra(algebra_datum(datum, sign))
        B = build_division_algebra(algebra_datum(datum.act(g), sign))
        assert morphism_residual(A, B, transport_map(datum, g, sign)) < 1e-10


def test_division_datum_validation():
    e0 = np.eye(4)[0]
    with pytest.raises(ValueError):
        DivisionAlgebraDatum(e0, 2 * np.eye(4), e0)
    with pytest.raises(ValueError):
        DivisionAlgebraDatum(e0, np.eye(4), np.array([1.0, 1, 0, 0]))
    with pytest.raises(ValueError):
        DivisionAlgebraDatum(np.zeros(4), np.eye(4), e0)
    with pytest.raises(ValueError):
        DivisionAlgebraDatum(e0, np.eye(4), e0, sign=0)


@given(seeds, st.sampled_from(FAMILIES), st.integers(1, 4))
def test_reduce_invariance_property(seed, family, s):
    rng = np.random.default_rng(seed)
    datum = random_datum(rng, family, s)
    rec = reduce(datum)
    assert membership(rec)
    assert _same(reduce(datum.act(random_rotation(rng))).canonical, rec.canonical, 1e-7)
