"""Finite-dimensional Lie algebras over exact rationals.

An algebra is stored by its structure constants c[i][j][k] with
[e_i, e_j] = sum_k c[i][j][k] e_k. All coefficients are Fractions, so
antisymmetry and Jacobi residuals are exact. Built-in families:

* ``so3``          cyclic constants [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
* ``sl2``          basis h, x, y with [h,x]=2x, [h,y]=-2y, [x,y]=h
* ``sl<n>``        traceless matrices, basis H_1..H_{n-1}, E_ij (i != j)
* ``su<n>``        real basis i*H_k, E_jk - E_kj, i(E_jk + E_kj)
* ``abelian(<n>)`` all brackets zero

The sl/su families carry their defining matrix realization (entries are
Gaussian rationals) so conjugation and transpose maps can be turned into
validated automorphisms.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FormatError, MismatchError, ValidationError
from .linalg import (
    ZERO,
    ONE,
    format_scalar,
    invert_dense,
    parse_scalar,
)


@dataclass(frozen=True)
class LieAlgebra:
    name: str
    dim: int
    structure: tuple  # structure[i][j][k] -> Fraction
    basis_labels: tuple
    # Matrix realization (tuple of matrices with (re, im) Fraction entries),
    # present for sl/su families; used to build conjugation automorphisms.
    matrix_basis: tuple | None = field(default=None, repr=False, compare=False)

    def vector(self, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != self.dim:
            raise MismatchError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return AlgebraVector(self, coeffs)

    def dual(self, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != self.dim:
            raise MismatchError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return DualVector(self, coeffs)

    def basis_vector(self, i):
        return self.vector(tuple(ONE if j == i else ZERO for j in range(self.dim)))

    def dual_basis_vector(self, i):
        return self.dual(tuple(ONE if j == i else ZERO for j in range(self.dim)))

    def zero_vector(self):
        return self.vector((ZERO,) * self.dim)

    def basis_vectors(self):
        return [self.basis_vector(i) for i in range(self.dim)]


@dataclass(frozen=True)
class AlgebraVector:
    algebra: LieAlgebra
    coeffs: tuple

    def __add__(self, other):
        _same_algebra(self, other)
        return AlgebraVector(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        _same_algebra(self, other)
        return AlgebraVector(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return self.scaled(Fraction(-1))

    def scaled(self, a):
        a = Fraction(a)
        return AlgebraVector(self.algebra, tuple(a * c for c in self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)


@dataclass(frozen=True)
class DualVector:
    algebra: LieAlgebra
    coeffs: tuple

    def __add__(self, other):
        _same_algebra(self, other)
        return DualVector(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        _same_algebra(self, other)
        return DualVector(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return self.scaled(Fraction(-1))

    def scaled(self, a):
        a = Fraction(a)
        return DualVector(self.algebra, tuple(a * c for c in self.coeffs))

    def is_nondegenerate(self):
        return any(self.coeffs)


def _same_algebra(a, b):
    if a.algebra is not b.algebra and a.algebra != b.algebra:
        raise MismatchError(
            f"operands live on different algebras: {a.algebra.name} vs {b.algebra.name}"
        )


def bracket(x, y):
    """Lie bracket [x, y] from the stored structure constants."""
    _same_algebra(x, y)
    alg = x.algebra
    out = [ZERO] * alg.dim
    for i, xi in enumerate(x.coeffs):
        if not xi:
            continue
        rows = alg.structure[i]
        for j, yj in enumerate(y.coeffs):
            if not yj:
                continue
            f = xi * yj
            for k, c in enumerate(rows[j]):
                if c:
                    out[k] += f * c
    return AlgebraVector(alg, tuple(out))


def pairing(xi, x):
    """Dual-basis pairing <xi, x> = sum_i xi_i x_i."""
    _same_algebra(xi, x)
    return sum((a * b for a, b in zip(xi.coeffs, x.coeffs)), ZERO)


def coadjoint(z, xi):
    """ad*_z xi under the convention <ad*_z xi, y> = -<xi, [z, y]>.

    With this sign, z -> ad*_z is a Lie algebra representation on the dual.
    """
    _same_algebra(z, xi)
    alg = z.algebra
    out = []
    for j in range(alg.dim):
        out.append(-pairing(xi, bracket(z, alg.basis_vector(j))))
    return DualVector(alg, tuple(out))


def coadjoint_matrix(z):
    """Matrix of ad*_z acting on dual coordinates."""
    alg = z.algebra
    cols = [coadjoint(z, alg.dual_basis_vector(m)).coeffs for m in range(alg.dim)]
    return tuple(tuple(cols[c][r] for c in range(alg.dim)) for r in range(alg.dim))


def adjoint_matrix(z):
    """Matrix of ad_z acting on vector coordinates."""
    alg = z.algebra
    cols = [bracket(z, alg.basis_vector(j)).coeffs for j in range(alg.dim)]
    return tuple(tuple(cols[c][r] for c in range(alg.dim)) for r in range(alg.dim))


def antisymmetry_residual(algebra):
    """max |c[i][j][k] + c[j][i][k]|; zero for a genuine bracket."""
    worst = ZERO
    c = algebra.structure
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            for k in range(algebra.dim):
                worst = max(worst, abs(c[i][j][k] + c[j][i][k]))
    return worst


def jacobi_residual(algebra, with_witness=False):
    """Max absolute Jacobi sum over all index quadruples (i, j, l, k)."""
    c = algebra.structure
    n = algebra.dim
    worst = ZERO
    witness = None
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for k in range(n):
                    s = ZERO
                    for m in range(n):
                        s += (
                            c[i][j][m] * c[m][l][k]
                            + c[j][l][m] * c[m][i][k]
                            + c[l][i][m] * c[m][j][k]
                        )
                    if abs(s) > worst:
                        worst = abs(s)
                        witness = (i, j, l, k)
    if with_witness:
        return worst, witness
    return worst


def killing_gram(algebra):
    """Killing form Gram matrix B_ij = tr(ad_i ad_j), dense Fraction rows."""
    c = algebra.structure
    n = algebra.dim
    gram = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = ZERO
            for m in range(n):
                for k in range(n):
                    s += c[i][m][k] * c[j][k][m]
            gram[i][j] = s
            gram[j][i] = s
    return tuple(tuple(row) for row in gram)


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LieAutomorphism:
    """Validated linear automorphism, stored with its exact inverse."""

    algebra: LieAlgebra
    matrix: tuple  # row-major tuple of tuples of Fraction
    inverse: tuple
    label: str

    def apply(self, x):
        return self.algebra.vector(_mat_vec(self.matrix, x.coeffs))

    def apply_inverse(self, x):
        return self.algebra.vector(_mat_vec(self.inverse, x.coeffs))


def _mat_vec(matrix, vec):
    return tuple(
        sum((row[j] * vec[j] for j in range(len(vec)) if vec[j]), ZERO) for row in matrix
    )


def make_automorphism(algebra, matrix, label):
    """Validate and wrap a candidate automorphism matrix.

    Checks exact invertibility and the bracket homomorphism A[e_i,e_j] =
    [Ae_i, Ae_j] on every basis pair; raises ValidationError with a witness
    pair on the first failure.
    """
    matrix = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    if len(matrix) != algebra.dim or any(len(row) != algebra.dim for row in matrix):
        raise MismatchError("automorphism matrix shape does not match the algebra")
    inverse = invert_dense([list(row) for row in matrix])
    if inverse is None:
        raise ValidationError(f"matrix for {label!r} is singular")
    inverse = tuple(tuple(row) for row in inverse)
    cols = [algebra.vector(tuple(matrix[r][c] for r in range(algebra.dim)))
            for c in range(algebra.dim)]
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            lhs = _mat_vec(matrix, bracket(algebra.basis_vector(i), algebra.basis_vector(j)).coeffs)
            rhs = bracket(cols[i], cols[j]).coeffs
            if lhs != rhs:
                raise ValidationError(
                    f"{label!r} is not a bracket homomorphism: "
                    f"A[{algebra.basis_labels[i]},{algebra.basis_labels[j]}] = {lhs} "
                    f"but [A{algebra.basis_labels[i]},A{algebra.basis_labels[j]}] = {rhs}",
                    witness=(i, j, lhs, rhs),
                )
    return LieAutomorphism(algebra, matrix, inverse, label)


# ---------------------------------------------------------------------------
# Built-in algebras
# ---------------------------------------------------------------------------

_GZERO = (ZERO, ZERO)


def _gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(
            _gsum(_gmul(a[i][k], b[k][j]) for k in range(n)) for j in range(n)
        )
        for i in range(n)
    )


def _gsum(items):
    re_, im = ZERO, ZERO
    for a, b in items:
        re_ += a
        im += b
    return (re_, im)


def _mat_sub(a, b):
    n = len(a)
    return tuple(
        tuple((a[i][j][0] - b[i][j][0], a[i][j][1] - b[i][j][1]) for j in range(n))
        for i in range(n)
    )


def _commutator(a, b):
    return _mat_sub(_mat_mul(a, b), _mat_mul(b, a))


def _flatten(mat):
    out = []
    for row in mat:
        for re_, im in row:
            out.append(re_)
            out.append(im)
    return out


def _elementary(n, i, j, re_=ONE, im=ZERO):
    return tuple(
        tuple((re_, im) if (r, c) == (i, j) else _GZERO for c in range(n)) for r in range(n)
    )


def _mat_add(a, b):
    n = len(a)
    return tuple(
        tuple((a[i][j][0] + b[i][j][0], a[i][j][1] + b[i][j][1]) for j in range(n))
        for i in range(n)
    )


def _sl_basis(n):
    labels = []
    mats = []
    for k in range(n - 1):
        labels.append(f"H{k + 1}")
        mats.append(_mat_add(_elementary(n, k, k), _elementary(n, k + 1, k + 1, Fraction(-1))))
    for i in range(n):
        for j in range(n):
            if i != j:
                labels.append(f"E{i + 1}{j + 1}")
                mats.append(_elementary(n, i, j))
    return labels, mats


def _su_basis(n):
    labels = []
    mats = []
    for k in range(n - 1):
        labels.append(f"iH{k + 1}")
        mats.append(
            _mat_add(
                _elementary(n, k, k, ZERO, ONE),
                _elementary(n, k + 1, k + 1, ZERO, Fraction(-1)),
            )
        )
    for i in range(n):
        for j in range(i + 1, n):
            labels.append(f"A{i + 1}{j + 1}")
            mats.append(_mat_add(_elementary(n, i, j), _elementary(n, j, i, Fraction(-1))))
            labels.append(f"S{i + 1}{j + 1}")
            mats.append(
                _mat_add(_elementary(n, i, j, ZERO, ONE), _elementary(n, j, i, ZERO, ONE))
            )
    return labels, mats


_LEFT_INVERSE_CACHE = {}


def _basis_left_inverse(mats):
    """Left inverse of the flattened-basis column matrix, cached.

    Turns each span decomposition into one matrix-vector product; solutions
    are verified against the original columns so out-of-span inputs fail.
    """
    key = id(mats)
    if key not in _LEFT_INVERSE_CACHE:
        dim = len(mats)
        coords = [_flatten(m) for m in mats]
        amb = len(coords[0])
        gram = [
            [sum(coords[p][r] * coords[q][r] for r in range(amb)) for q in range(dim)]
            for p in range(dim)
        ]
        gram_inv = invert_dense(gram)
        if gram_inv is None:
            raise ValidationError("matrix basis is linearly dependent")
        left = [
            [sum(gram_inv[p][q] * coords[q][r] for q in range(dim)) for r in range(amb)]
            for p in range(dim)
        ]
        # mats is kept in the value so the id key can never be reused
        _LEFT_INVERSE_CACHE[key] = (mats, coords, left)
    return _LEFT_INVERSE_CACHE[key][1:]


def _decompose_flat(mats, flat):
    coords, left = _basis_left_inverse(mats)
    amb = len(flat)
    sol = tuple(
        sum(left[p][r] * flat[r] for r in range(amb) if flat[r]) for p in range(len(mats))
    )
    for r in range(amb):
        if sum(sol[c] * coords[c][r] for c in range(len(mats))) != flat[r]:
            raise ValidationError("matrix does not lie in the algebra's span")
    return sol


def _structure_from_matrices(name, labels, mats):
    """Assemble structure constants by decomposing commutators in the basis."""
    dim = len(mats)
    mats = tuple(mats)
    structure = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            sol = _decompose_flat(mats, _flatten(_commutator(mats[i], mats[j])))
            for k, c in enumerate(sol):
                structure[i][j][k] = c
                structure[j][i][k] = -c
    structure = tuple(tuple(tuple(row) for row in plane) for plane in structure)
    return LieAlgebra(name, dim, structure, tuple(labels), matrix_basis=mats)


def _decompose_in_basis(algebra, mat):
    return _decompose_flat(algebra.matrix_basis, _flatten(mat))


def _so3():
    dim = 3
    structure = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        structure[i][j][k] = ONE
        structure[j][i][k] = -ONE
    structure = tuple(tuple(tuple(row) for row in plane) for plane in structure)
    return LieAlgebra("so3", dim, structure, ("e1", "e2", "e3"))


def _abelian(n):
    structure = tuple(
        tuple(tuple(ZERO for _ in range(n)) for _ in range(n)) for _ in range(n)
    )
    return LieAlgebra(f"abelian({n})", n, structure, tuple(f"e{i + 1}" for i in range(n)))


_BUILTIN_CACHE = {}


def builtin_algebra(name):
    """Construct a built-in algebra by name (so3, sl2, sl3, su2, abelian(4), ...)."""
    key = name.strip().lower()
    if key in _BUILTIN_CACHE:
        return _BUILTIN_CACHE[key]
    out = _build_named(key)
    _BUILTIN_CACHE[key] = out
    return out


def _build_named(key):
    if key == "so3":
        return _so3()
    m = re.fullmatch(r"abelian\((\d+)\)|abelian(\d+)", key)
    if m:
        n = int(m.group(1) or m.group(2))
        if n < 1:
            raise FormatError("abelian dimension must be >= 1")
        return _abelian(n)
    m = re.fullmatch(r"sl(\d+)|sln\((\d+)\)", key)
    if m:
        n = int(m.group(1) or m.group(2))
        if n < 2:
            raise FormatError("sl(n) needs n >= 2")
        labels, mats = _sl_basis(n)
        if n == 2:
            labels = ["h", "x", "y"]
        return _structure_from_matrices(f"sl{n}", labels, mats)
    m = re.fullmatch(r"su(\d+)|sun\((\d+)\)", key)
    if m:
        n = int(m.group(1) or m.group(2))
        if n < 2:
            raise FormatError("su(n) needs n >= 2")
        labels, mats = _su_basis(n)
        return _structure_from_matrices(f"su{n}", labels, mats)
    raise FormatError(f"unknown builtin algebra {key!r}")


# ---------------------------------------------------------------------------
# Built-in automorphisms
# ---------------------------------------------------------------------------


def _map_matrix_from_realization(algebra, mat_map, label):
    cols = [_decompose_in_basis(algebra, mat_map(m)) for m in algebra.matrix_basis]
    matrix = tuple(
        tuple(cols[c][r] for c in range(algebra.dim)) for r in range(algebra.dim)
    )
    return make_automorphism(algebra, matrix, label)


def _neg_transpose(mat):
    n = len(mat)
    return tuple(
        tuple((-mat[j][i][0], -mat[j][i][1]) for j in range(n)) for i in range(n)
    )


def _conjugate_by_permutation(mat, perm):
    # perm maps position p to perm[p]; conjugation moves entry (a,b) to
    # (perm[a], perm[b]), i.e. new[i][j] = old[inv(i)][inv(j)].
    n = len(mat)
    inv = [0] * n
    for p, q in enumerate(perm):
        inv[q] = p
    return tuple(tuple(mat[inv[i]][inv[j]] for j in range(n)) for i in range(n))


def builtin_automorphism(algebra, kind):
    """Build and validate a named automorphism.

    kinds: "identity", "negate_transpose" (sl/su families), "inverse_mirror"
    (rejected on non-abelian algebras with a witness), "permutation:<digits>"
    (conjugation by a permutation matrix on sl/su families).
    """
    kind = kind.strip().lower().replace("-", "_")
    if kind == "identity":
        ident = tuple(
            tuple(ONE if i == j else ZERO for j in range(algebra.dim))
            for i in range(algebra.dim)
        )
        return make_automorphism(algebra, ident, "identity")
    if kind == "inverse_mirror":
        neg = tuple(
            tuple(-ONE if i == j else ZERO for j in range(algebra.dim))
            for i in range(algebra.dim)
        )
        # X -> -X reverses brackets, so validation fails whenever some
        # [e_i, e_j] != 0; the error message carries the witness pair.
        return make_automorphism(algebra, neg, "inverse_mirror")
    if kind == "negate_transpose":
        if algebra.matrix_basis is None:
            raise FormatError(
                f"negate_transpose needs a matrix realization; {algebra.name} has none"
            )
        return _map_matrix_from_realization(algebra, _neg_transpose, "negate_transpose")
    m = re.fullmatch(r"permutation:(\d+)", kind)
    if m:
        digits = m.group(1)
        if algebra.matrix_basis is None:
            raise FormatError(
                f"permutation automorphisms need a matrix realization; {algebra.name} has none"
            )
        n = len(algebra.matrix_basis[0])
        if sorted(digits) != [str(d) for d in range(1, n + 1)]:
            raise FormatError(f"permutation {digits!r} is not a permutation of 1..{n}")
        perm = [int(d) - 1 for d in digits]
        return _map_matrix_from_realization(
            algebra,
            lambda mat: _conjugate_by_permutation(mat, perm),
            f"permutation:{digits}",
        )
    raise FormatError(f"unknown automorphism kind {kind!r}")


def weyl_mirrors(n):
    """All n! permutation-conjugation automorphisms of sl(n), validated."""
    if not 2 <= n <= 5:
        raise FormatError("weyl_mirrors supports 2 <= n <= 5")
    algebra = builtin_algebra(f"sl{n}")
    out = []
    seen = set()
    for perm in itertools.permutations(range(1, n + 1)):
        digits = "".join(str(d) for d in perm)
        auto = builtin_automorphism(algebra, f"permutation:{digits}")
        if auto.matrix in seen:
            raise ValidationError(f"duplicate Weyl mirror for {digits}")
        seen.add(auto.matrix)
        out.append(auto)
    return out


# ---------------------------------------------------------------------------
# JSON interfaces (all indices 0-based)
# ---------------------------------------------------------------------------


def algebra_to_json(algebra):
    triples = []
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            for k in range(algebra.dim):
                c = algebra.structure[i][j][k]
                if c:
                    triples.append([i, j, k, format_scalar(c)])
    return {
        "name": algebra.name,
        "dim": algebra.dim,
        "structure_constants": triples,
        "basis_labels": list(algebra.basis_labels),
    }


def algebra_from_json(data):
    try:
        name = str(data["name"])
        dim = int(data["dim"])
        triples = data["structure_constants"]
        labels = tuple(str(s) for s in data["basis_labels"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("algebra JSON needs name/dim/structure_constants/basis_labels") from exc
    if dim < 1 or len(labels) != dim:
        raise FormatError("basis_labels length must equal dim")
    structure = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for item in triples:
        try:
            i, j, k, v = item
            i, j, k = int(i), int(j), int(k)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad structure constant entry {item!r}") from exc
        if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
            raise FormatError(f"structure constant index out of range in {item!r}")
        structure[i][j][k] = parse_scalar(v)
    structure = tuple(tuple(tuple(row) for row in plane) for plane in structure)
    return LieAlgebra(name, dim, structure, labels)


def automorphism_to_json(auto):
    return {
        "algebra": auto.algebra.name,
        "matrix": [[format_scalar(v) for v in row] for row in auto.matrix],
        "label": auto.label,
    }


def automorphism_from_json(data, algebra):
    try:
        matrix = [[parse_scalar(v) for v in row] for row in data["matrix"]]
        label = str(data.get("label", "unnamed"))
    except (KeyError, TypeError) as exc:
        raise FormatError("automorphism JSON needs a matrix field") from exc
    return make_automorphism(algebra, matrix, label)
