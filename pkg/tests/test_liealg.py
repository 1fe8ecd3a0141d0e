import random
from fractions import Fraction

import pytest

from spencerbench.errors import FormatError, MismatchError, ValidationError
from spencerbench.liealg import (
    algebra_from_json,
    algebra_to_json,
    antisymmetry_residual,
    automorphism_from_json,
    automorphism_to_json,
    adjoint_matrix,
    bracket,
    builtin_algebra,
    builtin_automorphism,
    coadjoint,
    coadjoint_matrix,
    jacobi_residual,
    killing_gram,
    pairing,
    weyl_mirrors,
)

F = Fraction


@pytest.fixture(scope="module")
def so3():
    return builtin_algebra("so3")


@pytest.fixture(scope="module")
def sl2():
    return builtin_algebra("sl2")


def test_builtin_validity():
    for name in ("so3", "sl2", "sl3", "su2", "abelian(4)"):
        alg = builtin_algebra(name)
        assert antisymmetry_residual(alg) == 0
        assert jacobi_residual(alg) == 0


def test_so3_bracket_table(so3):
    e1, e2, e3 = so3.basis_vectors()
    assert bracket(e1, e2).coeffs == e3.coeffs
    assert bracket(e2, e3).coeffs == e1.coeffs
    assert bracket(e3, e1).coeffs == e2.coeffs
    assert bracket(e1, e1).is_zero()


def test_sl2_relations(sl2):
    h, x, y = sl2.basis_vectors()
    assert bracket(h, x) == x.scaled(2)
    assert bracket(h, y) == y.scaled(-2)
    assert bracket(x, y) == h


def test_abelian_brackets_vanish():
    ab = builtin_algebra("abelian(3)")
    for a in ab.basis_vectors():
        for b in ab.basis_vectors():
            assert bracket(a, b).is_zero()


def test_bracket_bilinear_antisymmetric(so3):
    rng = random.Random(7)
    for _ in range(30):
        x = so3.vector([F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)])
        y = so3.vector([F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)])
        assert bracket(x, y) == -bracket(y, x)
        assert bracket(x + y, y) == bracket(x, y)  # [y, y] = 0


def test_corrupted_constants_nonzero_jacobi(so3):
    # a single corrupted entry (antisymmetric partner left untouched) breaks
    # the Jacobi sum; note that a *consistent* rescale of one cyclic pair
    # would not, since diagonal rescalings of so3 stay Lie algebras
    data = algebra_to_json(so3)
    flipped = [
        [i, j, k, "2" if (i, j, k) == (0, 1, 2) else v]
        for i, j, k, v in data["structure_constants"]
    ]
    data["structure_constants"] = flipped
    bad = algebra_from_json(data)
    assert antisymmetry_residual(bad) != 0
    residual, witness = jacobi_residual(bad, with_witness=True)
    assert residual != 0 and witness is not None

    # consistent rescale: still a Lie algebra (scaled cyclic family)
    rescaled = [
        [i, j, k, {"(0, 1, 2)": "2", "(1, 0, 2)": "-2"}.get(str((i, j, k)), v)]
        for i, j, k, v in data["structure_constants"]
    ]
    both = algebra_from_json({**data, "structure_constants": rescaled})
    assert antisymmetry_residual(both) == 0 and jacobi_residual(both) == 0


def test_pairing_examples(so3):
    e1 = so3.basis_vector(0)
    e3s = so3.dual_basis_vector(2)
    assert pairing(e3s, so3.basis_vector(2)) == 1
    assert pairing(e3s, e1) == 0
    xi = so3.dual([2, 3, 0])
    assert pairing(xi, so3.vector([1, 1, 0])) == 5


def test_coadjoint_examples(so3):
    e1 = so3.basis_vector(0)
    e3s = so3.dual_basis_vector(2)
    assert coadjoint(e1, e3s) == so3.dual([0, -1, 0])
    assert coadjoint(so3.zero_vector(), e3s) == so3.dual([0, 0, 0])
    ab = builtin_algebra("abelian(3)")
    assert coadjoint(ab.basis_vector(0), ab.dual([1, 2, 3])) == ab.dual([0, 0, 0])


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _mat_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


@pytest.mark.parametrize("name", ["so3", "sl2"])
def test_coadjoint_is_a_representation(name):
    alg = builtin_algebra(name)
    for i in range(alg.dim):
        for j in range(alg.dim):
            z, w = alg.basis_vector(i), alg.basis_vector(j)
            lhs = coadjoint_matrix(bracket(z, w))
            rhs = _mat_sub(
                _mat_mul(coadjoint_matrix(z), coadjoint_matrix(w)),
                _mat_mul(coadjoint_matrix(w), coadjoint_matrix(z)),
            )
            assert lhs == rhs


def test_mismatched_algebras_raise(so3, sl2):
    with pytest.raises(MismatchError):
        bracket(so3.basis_vector(0), sl2.basis_vector(0))
    with pytest.raises(MismatchError):
        pairing(so3.dual_basis_vector(0), sl2.basis_vector(0))


def test_negate_transpose_on_sl2(sl2):
    auto = builtin_automorphism(sl2, "negate_transpose")
    h, x, y = sl2.basis_vectors()
    assert auto.apply(h) == -h
    assert auto.apply(x) == -y
    assert auto.apply(y) == -x


def test_identity_automorphism(so3):
    auto = builtin_automorphism(so3, "identity")
    assert all(auto.matrix[i][i] == 1 for i in range(3))


def test_inverse_mirror_rejected_on_nonabelian(so3):
    with pytest.raises(ValidationError) as err:
        builtin_automorphism(so3, "inverse_mirror")
    # witness pair: negation reverses the first nonvanishing bracket
    assert err.value.witness is not None
    i, j, lhs, rhs = err.value.witness
    assert (i, j) == (0, 1)
    assert lhs == tuple(-v for v in rhs)


def test_inverse_mirror_fine_on_abelian():
    ab = builtin_algebra("abelian(3)")
    auto = builtin_automorphism(ab, "inverse_mirror")
    assert auto.matrix[0][0] == -1


def test_automorphism_bracket_invariant_all_pairs(sl2):
    for kind in ("identity", "negate_transpose", "permutation:21"):
        auto = builtin_automorphism(sl2, kind)
        for i in range(sl2.dim):
            for j in range(sl2.dim):
                a, b = sl2.basis_vector(i), sl2.basis_vector(j)
                assert auto.apply(bracket(a, b)) == bracket(auto.apply(a), auto.apply(b))


def test_automorphism_inverse_exact(sl2):
    auto = builtin_automorphism(sl2, "negate_transpose")
    prod = _mat_mul(auto.matrix, auto.inverse)
    assert prod == tuple(
        tuple(F(1) if i == j else F(0) for j in range(3)) for i in range(3)
    )


def test_pairing_transport_compatibility(sl2):
    # <xi o A^-1, A x> = <xi, x>
    auto = builtin_automorphism(sl2, "negate_transpose")
    rng = random.Random(3)
    for _ in range(20):
        xi = sl2.dual([F(rng.randint(-4, 4)) for _ in range(3)])
        x = sl2.vector([F(rng.randint(-4, 4)) for _ in range(3)])
        xi_t = sl2.dual(
            tuple(
                sum(xi.coeffs[i] * auto.inverse[i][j] for i in range(3))
                for j in range(3)
            )
        )
        assert pairing(xi_t, auto.apply(x)) == pairing(xi, x)


@pytest.mark.parametrize("n,count", [(2, 2), (3, 6), (4, 24)])
def test_weyl_mirror_counts(n, count):
    mirrors = weyl_mirrors(n)
    assert len(mirrors) == count
    assert len({m.matrix for m in mirrors}) == count


def test_weyl_mirrors_range_check():
    with pytest.raises(FormatError):
        weyl_mirrors(1)
    with pytest.raises(FormatError):
        weyl_mirrors(6)


def test_killing_gram_so3(so3):
    gram = killing_gram(so3)
    assert gram == tuple(
        tuple(F(-2) if i == j else F(0) for j in range(3)) for i in range(3)
    )


def test_killing_gram_invariant_under_automorphism(sl2):
    # B(Ax, Ay) = B(x, y) for every validated automorphism
    gram = killing_gram(sl2)
    for kind in ("negate_transpose", "permutation:21"):
        a = builtin_automorphism(sl2, kind).matrix
        lhs = _mat_mul(_mat_mul(tuple(zip(*a)), gram), a)
        assert lhs == gram


def test_adjoint_matrix_matches_bracket(so3):
    z = so3.vector([1, 2, 3])
    mat = adjoint_matrix(z)
    for j in range(3):
        col = tuple(mat[r][j] for r in range(3))
        assert col == bracket(z, so3.basis_vector(j)).coeffs


def test_algebra_json_round_trip(sl2):
    again = algebra_from_json(algebra_to_json(sl2))
    assert again.dim == sl2.dim
    assert again.structure == sl2.structure
    assert again.basis_labels == sl2.basis_labels


def test_automorphism_json_round_trip(sl2):
    auto = builtin_automorphism(sl2, "negate_transpose")
    again = automorphism_from_json(automorphism_to_json(auto), sl2)
    assert again.matrix == auto.matrix and again.inverse == auto.inverse


def test_bad_json_rejected():
    with pytest.raises(FormatError):
        algebra_from_json({"name": "x", "dim": 2, "basis_labels": ["a"]})
    with pytest.raises(FormatError):
        builtin_algebra("e8")


def test_su2_negate_transpose_is_valid_automorphism():
    # the compact-form involution is realized as entrywise conjugation,
    # which on anti-Hermitian matrices equals X -> -X^T
    su2 = builtin_algebra("su2")
    auto = builtin_automorphism(su2, "negate_transpose")
    for i in range(su2.dim):
        for j in range(su2.dim):
            a, b = su2.basis_vector(i), su2.basis_vector(j)
            assert auto.apply(bracket(a, b)) == bracket(auto.apply(a), auto.apply(b))
