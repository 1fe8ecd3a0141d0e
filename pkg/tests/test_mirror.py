import random
from fractions import Fraction

import pytest

from spencerbench.errors import MismatchError
from spencerbench.liealg import builtin_algebra, builtin_automorphism, killing_gram, weyl_mirrors
from spencerbench.linalg import OperatorMatrix
from spencerbench.mirror import (
    TRANSPORT_INVERSE,
    TRANSPORT_LITERAL,
    automorphism_mirror,
    induced_tensor_map,
    intertwining_check,
    mirror_from_json,
    mirror_lambda,
    sign_chain_sign,
    sign_mirror,
)
from spencerbench.spencer import Identification
from spencerbench.symtensor import (
    basis_tensor,
    eval_tensor,
    multisets,
    sym_dim,
)

F = Fraction
SO3 = builtin_algebra("so3")
SL2 = builtin_algebra("sl2")
SL3 = builtin_algebra("sl3")


def rand_lambda(rng, alg):
    while True:
        coeffs = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(alg.dim)]
        if any(coeffs):
            return alg.dual(coeffs)


# --- dual transport ----------------------------------------------------------


def test_sign_mirror_negates():
    lam = SO3.dual_basis_vector(2)
    assert mirror_lambda(sign_mirror(), lam) == -lam


def test_sign_mirror_involution():
    rng = random.Random(31)
    for _ in range(20):
        lam = rand_lambda(rng, SO3)
        assert mirror_lambda(sign_mirror(), mirror_lambda(sign_mirror(), lam)) == lam


def test_automorphism_transport_sl2_example():
    # negate-transpose sends h* to -h* under the contragredient transport
    auto = builtin_automorphism(SL2, "negate_transpose")
    lam = SL2.dual_basis_vector(0)
    out = mirror_lambda(automorphism_mirror(auto), lam)
    assert out == SL2.dual([-1, 0, 0])


def test_transport_directions_differ_for_noninvolutive():
    auto = builtin_automorphism(SL3, "permutation:231")
    rng = random.Random(32)
    lam = rand_lambda(rng, SL3)
    inv = mirror_lambda(automorphism_mirror(auto), lam, TRANSPORT_INVERSE)
    lit = mirror_lambda(automorphism_mirror(auto), lam, TRANSPORT_LITERAL)
    assert inv != lit
    # transported-by-inverse then transported-literal returns lam
    assert mirror_lambda(automorphism_mirror(auto), inv, TRANSPORT_LITERAL) == lam


def test_transport_preserves_nondegeneracy():
    rng = random.Random(33)
    auto = builtin_automorphism(SL3, "permutation:312")
    for _ in range(10):
        lam = rand_lambda(rng, SL3)
        assert mirror_lambda(sign_mirror(), lam).is_nondegenerate()
        assert mirror_lambda(automorphism_mirror(auto), lam).is_nondegenerate()


def test_transport_linear_in_lambda():
    auto = builtin_automorphism(SL2, "negate_transpose")
    t = automorphism_mirror(auto)
    a, b = SL2.dual([1, 2, 3]), SL2.dual([0, -1, 4])
    assert mirror_lambda(t, a + b) == mirror_lambda(t, a) + mirror_lambda(t, b)


# --- induced tensor maps -----------------------------------------------------


def test_identity_gives_identity_both_modes():
    auto = builtin_automorphism(SL2, "identity")
    for ident in Identification:
        for k in (0, 1, 2, 3):
            assert induced_tensor_map(auto, k, ident) == OperatorMatrix.identity(
                sym_dim(3, k)
            )


def test_degree_zero_is_one_by_one():
    auto = builtin_automorphism(SL2, "negate_transpose")
    m = induced_tensor_map(auto, 0)
    assert m == OperatorMatrix.identity(1)


def test_functoriality_on_weyl_pairs():
    mirrors = weyl_mirrors(3)
    a, b = mirrors[3], mirrors[4]  # the two 3-cycles
    composed_matrix = tuple(
        tuple(
            sum(a.matrix[i][k] * b.matrix[k][j] for k in range(SL3.dim))
            for j in range(SL3.dim)
        )
        for i in range(SL3.dim)
    )
    match = [m for m in mirrors if m.matrix == composed_matrix]
    assert len(match) == 1
    for ident in Identification:
        for k in (1, 2):
            lhs = induced_tensor_map(a, k, ident) @ induced_tensor_map(b, k, ident)
            assert lhs == induced_tensor_map(match[0], k, ident)


def killing_eval(alg, s, args):
    """Evaluation against the Killing pairing: arguments hit B first."""
    gram = killing_gram(alg)
    mapped = [
        alg.vector(tuple(sum(gram[r][c] * x.coeffs[c] for c in range(alg.dim))
                         for r in range(alg.dim)))
        for x in args
    ]
    return eval_tensor(s, mapped)


@pytest.mark.parametrize("ident", list(Identification), ids=lambda i: i.value)
def test_degree_one_eval_transport_oracle(ident):
    # eval_mode(map(A,1) s, X) == eval_mode(s, A^{-1} X) for each pairing mode
    auto = builtin_automorphism(SL3, "permutation:231")
    m = induced_tensor_map(auto, 1, ident)
    sets1 = multisets(SL3.dim, 1)
    for c, key in enumerate(sets1):
        s = basis_tensor(SL3, key)
        image_coeffs = {sets1[r]: v for (r, cc), v in m.entries.items() if cc == c}
        from spencerbench.symtensor import SymTensor

        image = SymTensor(SL3, 1, image_coeffs)
        for x in SL3.basis_vectors():
            pre = auto.apply_inverse(x)
            if ident is Identification.KILLING:
                assert killing_eval(SL3, image, [x]) == killing_eval(SL3, s, [pre])
            else:
                assert eval_tensor(image, [x]) == eval_tensor(s, [pre])


# --- intertwining ------------------------------------------------------------


def test_identity_intertwines_trivially():
    rng = random.Random(35)
    auto = builtin_automorphism(SL2, "identity")
    lam = rand_lambda(rng, SL2)
    for ident in Identification:
        rep = intertwining_check(auto, lam, 1, identification=ident)
        assert rep.holds and rep.residual == 0


def test_sl2_negate_transpose_exact_zero_both_modes():
    auto = builtin_automorphism(SL2, "negate_transpose")
    lam = SL2.dual_basis_vector(0)
    for ident in Identification:
        for k in (1, 2, 3):
            rep = intertwining_check(auto, lam, k, identification=ident)
            assert rep.residual == 0, (ident, k)


def test_weyl_mirrors_exact_zero_killing_mode():
    rng = random.Random(36)
    lam = rand_lambda(rng, SL3)
    for auto in weyl_mirrors(3):
        for k in (1, 2):
            rep = intertwining_check(
                auto, lam, k, identification=Identification.KILLING
            )
            assert rep.residual == 0, (auto.label, k)


def test_coordinate_mode_obstruction_is_visible():
    # with the coordinate pairing the transported-operator identity fails
    # for the non-orthogonal mirrors; the residual is reported, not hidden
    lam = SL3.dual([1, 2, 3, 4, 5, 6, 7, 8])
    auto = builtin_automorphism(SL3, "permutation:231")
    rep = intertwining_check(auto, lam, 1, identification=Identification.BASIS)
    assert rep.residual != 0 and not rep.holds


def test_paper_transport_separates_noninvolutive():
    lam = SL3.dual([1, 2, 3, 4, 5, 6, 7, 8])
    for label in ("permutation:231", "permutation:312"):
        auto = builtin_automorphism(SL3, label)
        rep = intertwining_check(
            auto, lam, 1, transport=TRANSPORT_LITERAL, identification=Identification.KILLING
        )
        assert rep.residual != 0
    # involutive mirrors cannot tell the transports apart
    auto = builtin_automorphism(SL3, "permutation:213")
    rep = intertwining_check(
        auto, lam, 1, transport=TRANSPORT_LITERAL, identification=Identification.KILLING
    )
    assert rep.residual == 0


def test_intertwining_needs_degree_one():
    auto = builtin_automorphism(SL2, "identity")
    with pytest.raises(MismatchError):
        intertwining_check(auto, SL2.dual([1, 0, 0]), 0)


# --- chain-map sign ----------------------------------------------------------


def test_sign_chain_sign_values():
    assert sign_chain_sign(0, 0) == 1
    assert sign_chain_sign(1, 1) == -1
    assert sign_chain_sign(2, 1) == -1
    assert sign_chain_sign(3, 2) == 1
    with pytest.raises(MismatchError):
        sign_chain_sign(-1, 0)


# --- JSON --------------------------------------------------------------------


def test_mirror_json_round_trip():
    t = sign_mirror()
    assert mirror_from_json(t.to_json(), SL2).kind == "sign"
    auto = builtin_automorphism(SL2, "negate_transpose")
    t2 = automorphism_mirror(auto)
    again = mirror_from_json(t2.to_json(), SL2)
    assert again.kind == "automorphism"
    assert again.automorphism.matrix == auto.matrix
