"""Total complexes over a finite de Rham model and their exact cohomology.

A DGAModel is a finite commutative differential graded algebra standing in
for the forms on the base: per-degree bases, differentials d_i with
d.d = 0, and an optional product table for cup products. torus_model(n)
is the constant-coefficient exterior algebra on n one-forms (d = 0), whose
cohomology is that of the n-torus.

The tensor complex couples the model with the symmetric algebra of a Lie
algebra through the constraint-coupled operator. Two gradings exist:

* total (default): degree k space  sum_{i+j=k} Omega^i x S^j with
  differential  d x 1 + (-1)^i 1 x delta  (Koszul sign on the form degree).
  This is the standard tensor-product complex; its differential squares to
  zero exactly when d^2 = 0 and delta^2 = 0.
* diagonal: the literal spaces Omega^k x S^k. The image of the differential
  splits over Omega^{k+1} x S^k and Omega^k x S^{k+1}, which is not the
  next diagonal space, so the blocks are recorded per degree and no
  composition or dimension claims are made.

Cohomology dimensions are computed by exact rank-nullity over the rationals
and reported only when the squared differential is exactly zero.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateInputError, FormatError, MismatchError
from .linalg import (
    ZERO,
    OperatorMatrix,
    format_scalar,
    in_column_span,
    kron,
    parse_scalar,
    place_block,
)
from .mirror import (
    TRANSPORT_INVERSE,
    induced_tensor_map,
    mirror_lambda,
    sign_chain_sign,
)
from .spencer import Identification, LeibnizConvention, delta_matrix
from .symtensor import multisets, sym_dim

GRADING_TOTAL = "total"
GRADING_DIAGONAL = "diagonal"


@dataclass(frozen=True)
class DGAModel:
    """Finite CDGA: bases per degree, differentials, optional product table."""

    name: str
    basis: tuple  # basis[i] = tuple of labels in degree i
    diff: tuple  # diff[i]: OperatorMatrix from degree i to i+1
    product: dict | None = field(default=None, compare=False)
    # product[(i, a, j, b)] -> {c: coeff} in degree i+j

    @property
    def top_degree(self):
        return len(self.basis) - 1

    def dims(self):
        return [len(b) for b in self.basis]

    def d_squared_residual(self):
        worst = ZERO
        for i in range(len(self.diff) - 1):
            worst = max(worst, (self.diff[i + 1] @ self.diff[i]).max_abs())
        return worst

    def de_rham_dims(self):
        """H^i dims by rank-nullity on the stored differentials."""
        dims = []
        prev_rank = 0
        for i, labels in enumerate(self.basis):
            rank = self.diff[i].rank() if i < len(self.diff) else 0
            dims.append(len(labels) - rank - prev_rank)
            prev_rank = rank
        return dims

    def multiply(self, i, a, j, b):
        """Product of basis elements (degree i, index a) and (degree j, index b)."""
        if self.product is None:
            raise DegenerateInputError(f"model {self.name!r} has no product table")
        return self.product.get((i, a, j, b), {})

    def to_json(self):
        data = {
            "name": self.name,
            "basis": [list(labels) for labels in self.basis],
            "diff": [m.to_json() for m in self.diff],
        }
        if self.product is not None:
            data["product"] = [
                [i, a, j, b, [[c, format_scalar(v)] for c, v in sorted(table.items())]]
                for (i, a, j, b), table in sorted(self.product.items())
            ]
        return data

    @classmethod
    def from_json(cls, data):
        try:
            name = str(data["name"])
            basis = tuple(tuple(str(x) for x in row) for row in data["basis"])
            diff = tuple(OperatorMatrix.from_json(m) for m in data["diff"])
        except (KeyError, TypeError) as exc:
            raise FormatError("DGA JSON needs name/basis/diff") from exc
        product = None
        if "product" in data:
            product = {}
            for item in data["product"]:
                i, a, j, b, table = item
                product[(int(i), int(a), int(j), int(b))] = {
                    int(c): parse_scalar(v) for c, v in table
                }
        model = cls(name, basis, diff, product)
        if model.d_squared_residual() != 0:
            raise FormatError("DGA differential does not square to zero")
        return model


def torus_model(n):
    """Constant-coefficient exterior algebra on n one-form generators."""
    if not 1 <= n <= 4:
        raise FormatError("torus_model supports 1 <= n <= 4")
    subsets = [
        list(itertools.combinations(range(n), i)) for i in range(n + 1)
    ]
    labels = tuple(
        tuple("1" if not s else "d" + "".join(f"x{i + 1}" for i in s) for s in row)
        for row in subsets
    )
    diff = tuple(
        OperatorMatrix.zero(len(subsets[i + 1]), len(subsets[i])) for i in range(n)
    )
    product = {}
    for i, row_i in enumerate(subsets):
        for j, row_j in enumerate(subsets):
            if i + j > n:
                continue
            target_index = {s: c for c, s in enumerate(subsets[i + j])}
            for a, sa in enumerate(row_i):
                for b, sb in enumerate(row_j):
                    if set(sa) & set(sb):
                        continue
                    union = tuple(sorted(sa + sb))
                    sign = _merge_sign(sa, sb)
                    product[(i, a, j, b)] = {target_index[union]: sign}
    return DGAModel(f"torus{n}", labels, diff, product)


def _merge_sign(sa, sb):
    inversions = sum(1 for s in sa for t in sb if s > t)
    return Fraction(-1) ** inversions


# ---------------------------------------------------------------------------
# Complex assembly
# ---------------------------------------------------------------------------


@dataclass
class SpencerComplexInstance:
    dga: DGAModel
    algebra: object
    lam: object
    K: int
    convention: LeibnizConvention
    grading: str
    identification: Identification
    bases: list  # bases[k] = list of (form_degree, form_index, multiset)
    differentials: list  # total grading: D^k for k in 0..K-1
    diagonal_blocks: dict  # diagonal grading: k -> {"d_block", "delta_block"}
    delta_matrices: list  # delta^j for j in 0..K-1 (reused by diagnostics)

    def segment_offsets(self, k):
        """Start offset of each (form degree i) segment inside the degree-k basis."""
        offsets = {}
        pos = 0
        for i in range(min(k, self.dga.top_degree) + 1):
            j = k - i
            offsets[i] = pos
            pos += len(self.dga.basis[i]) * sym_dim(self.algebra.dim, j)
        return offsets, pos


def build_complex(dga, algebra, lam, K, convention=LeibnizConvention.UNSIGNED,
                  grading=GRADING_TOTAL, identification=Identification.BASIS):
    """Assemble the coupled complex up to total degree K (K >= 1)."""
    if K < 1:
        raise MismatchError("truncation K must be >= 1")
    if lam.algebra != algebra:
        raise MismatchError("lam does not live on the given algebra")
    if grading not in (GRADING_TOTAL, GRADING_DIAGONAL):
        raise FormatError(f"unknown grading {grading!r}")
    convention = LeibnizConvention(convention)
    identification = Identification(identification)
    deltas = [delta_matrix(lam, j, convention, identification) for j in range(K)]

    if grading == GRADING_DIAGONAL:
        blocks = {}
        top = dga.top_degree
        for k in range(min(K, top + 1)):
            n_forms = len(dga.basis[k])
            s_dim = sym_dim(algebra.dim, k)
            d_block = (
                kron(dga.diff[k], OperatorMatrix.identity(s_dim))
                if k < top
                else OperatorMatrix.zero(0, n_forms * s_dim)
            )
            delta_block = kron(
                OperatorMatrix.identity(n_forms), deltas[k]
            ).scaled(Fraction(-1) ** k) if k < K else None
            blocks[k] = {"d_block": d_block, "delta_block": delta_block}
        return SpencerComplexInstance(
            dga, algebra, lam, K, convention, grading, identification,
            [], [], blocks, deltas,
        )

    bases = []
    for k in range(K + 1):
        layer = []
        for i in range(min(k, dga.top_degree) + 1):
            j = k - i
            for a in range(len(dga.basis[i])):
                for ms in multisets(algebra.dim, j):
                    layer.append((i, a, ms))
        bases.append(layer)

    set_index = [
        {ms: p for p, ms in enumerate(multisets(algebra.dim, j))} for j in range(K + 1)
    ]
    set_list = [multisets(algebra.dim, j) for j in range(K + 1)]
    delta_cols = []
    for j in range(K):
        cols = {}
        for (r, c), v in deltas[j].entries.items():
            cols.setdefault(c, []).append((r, v))
        delta_cols.append(cols)
    diff_cols = []
    for i in range(len(dga.diff)):
        cols = {}
        for (r, c), v in dga.diff[i].entries.items():
            cols.setdefault(c, []).append((r, v))
        diff_cols.append(cols)

    differentials = []
    for k in range(K):
        out = OperatorMatrix.zero(len(bases[k + 1]), len(bases[k]))
        row_index = {key: r for r, key in enumerate(bases[k + 1])}
        for c, (i, a, ms) in enumerate(bases[k]):
            j = k - i
            # d-part: (d omega) x s, lands in form degree i+1
            if i < dga.top_degree:
                for b, v in diff_cols[i].get(a, ()):
                    out.set(row_index[(i + 1, b, ms)], c, v)
            # delta-part: (-1)^i omega x delta(s)
            sign = Fraction(-1) ** i
            for r, v in delta_cols[j].get(set_index[j][ms], ()):
                out.set(row_index[(i, a, set_list[j + 1][r])], c, sign * v)
        differentials.append(out)

    return SpencerComplexInstance(
        dga, algebra, lam, K, convention, grading, identification,
        bases, differentials, {}, deltas,
    )


def d_squared_residual(instance):
    """Max |entry| over all consecutive compositions of the differential."""
    if instance.grading == GRADING_DIAGONAL:
        raise DegenerateInputError(
            "diagonal grading does not compose; only block shapes are reported"
        )
    worst = ZERO
    for k in range(len(instance.differentials) - 1):
        worst = max(
            worst,
            (instance.differentials[k + 1] @ instance.differentials[k]).max_abs(),
        )
    return worst


@dataclass
class CohomologyReport:
    grading: str
    convention: LeibnizConvention
    K: int
    dims: list | None  # per degree k <= K-1; None when not a complex
    euler: int | None
    d_squared: Fraction
    flags: list

    def to_json(self):
        return {
            "grading": self.grading,
            "convention": self.convention.value,
            "K": self.K,
            "dims": self.dims if self.dims is not None else [],
            "euler": self.euler if self.euler is not None else 0,
            "d_squared_residual": str(self.d_squared),
            "flags": list(self.flags),
        }


def cohomology_report(instance):
    """Exact dims and Euler characteristic for k <= K-1, or a non-complex flag."""
    if instance.grading == GRADING_DIAGONAL:
        raise DegenerateInputError(
            "dimension claims are only made for the total grading"
        )
    residual = d_squared_residual(instance)
    if residual != 0:
        return CohomologyReport(
            instance.grading, instance.convention, instance.K,
            None, None, residual, ["not-a-complex: D^2 != 0; dims withheld"],
        )
    dims = []
    prev_rank = 0
    for k in range(instance.K):
        n_k = len(instance.bases[k])
        rank = instance.differentials[k].rank()
        dims.append(n_k - rank - prev_rank)
        prev_rank = rank
    euler = sum((-1) ** k * d for k, d in enumerate(dims))
    return CohomologyReport(
        instance.grading, instance.convention, instance.K, dims, euler, residual, [],
    )


# ---------------------------------------------------------------------------
# Cup products
# ---------------------------------------------------------------------------


def is_closed(instance, degree, vec):
    if degree >= len(instance.differentials):
        raise MismatchError(f"no differential stored at degree {degree}")
    return not any(instance.differentials[degree].apply(vec))


def cup_product(instance, deg1, rep1, deg2, rep2):
    """Product of two closed representatives; returns (degree, vector).

    Componentwise: (omega_a x e_M) . (omega_b x e_N) multiplies the forms in
    the base model (with its sign) and merges the multisets.
    """
    if instance.dga.product is None:
        raise DegenerateInputError("the base model has no product table")
    if not is_closed(instance, deg1, rep1) or not is_closed(instance, deg2, rep2):
        raise MismatchError("cup product needs closed representatives")
    target = deg1 + deg2
    if target > instance.K:
        raise MismatchError("product degree exceeds the truncation")
    out = [ZERO] * len(instance.bases[target])
    row_index = {key: r for r, key in enumerate(instance.bases[target])}
    for c1, v1 in enumerate(rep1):
        if not v1:
            continue
        i, a, ms1 = instance.bases[deg1][c1]
        for c2, v2 in enumerate(rep2):
            if not v2:
                continue
            j, b, ms2 = instance.bases[deg2][c2]
            if i + j > instance.dga.top_degree:
                continue
            merged = tuple(sorted(ms1 + ms2))
            for cc, coeff in instance.dga.multiply(i, a, j, b).items():
                out[row_index[(i + j, cc, merged)]] += v1 * v2 * coeff
    return target, tuple(out)


def classes_equal(instance, degree, vec1, vec2):
    """True iff vec1 - vec2 lies in the image of the previous differential."""
    diff = [a - b for a, b in zip(vec1, vec2)]
    if not any(diff):
        return True
    if degree == 0:
        return False
    return in_column_span(instance.differentials[degree - 1], diff)


def cup_well_defined_sample(instance, deg1, rep1, deg2, rep2, seed, trials=4):
    """Perturb inputs by exact boundaries and check the product class is stable."""
    rng = random.Random(seed)
    target, base = cup_product(instance, deg1, rep1, deg2, rep2)
    for _ in range(trials):
        if deg1 == 0:
            break
        prev = instance.differentials[deg1 - 1]
        noise = [Fraction(rng.randint(-3, 3)) for _ in range(prev.cols)]
        perturbed = tuple(
            a + b for a, b in zip(rep1, prev.apply(noise))
        )
        _, shifted = cup_product(instance, deg1, perturbed, deg2, rep2)
        if not classes_equal(instance, target, base, shifted):
            return False
    return True


# ---------------------------------------------------------------------------
# Mirror comparison and product-formula diagnostic
# ---------------------------------------------------------------------------


@dataclass
class MirrorInvarianceReport:
    transform_kind: str
    commutation_residuals: list  # per degree k <= K-1
    commutation_holds: bool
    dims_original: list | None
    dims_mirrored: list | None
    euler_original: int | None
    euler_mirrored: int | None
    dims_equal: bool | None  # None when either side is not a complex
    flags: list

    def to_json(self):
        return {
            "transform": self.transform_kind,
            "commutation_residuals": [str(r) for r in self.commutation_residuals],
            "commutation_holds": self.commutation_holds,
            "dims_original": self.dims_original or [],
            "dims_mirrored": self.dims_mirrored or [],
            "euler_original": self.euler_original,
            "euler_mirrored": self.euler_mirrored,
            "dims_equal": self.dims_equal,
            "flags": list(self.flags),
        }


def chain_map_matrix(instance, transform, k, base_maps=None):
    """Block-diagonal chain map on the degree-k space of the instance.

    Sign mirror: (-1)^{tensor degree} identity per segment. Automorphism
    mirror: identity (or a supplied invertible base-model map) on the form
    factor, the induced tensor map on the symmetric factor.
    """
    layer = instance.bases[k]
    out = OperatorMatrix.zero(len(layer), len(layer))
    offsets, total = instance.segment_offsets(k)
    assert total == len(layer)
    for i, start in offsets.items():
        j = k - i
        n_forms = len(instance.dga.basis[i])
        s_dim = sym_dim(instance.algebra.dim, j)
        if transform.kind == "sign":
            block = OperatorMatrix.identity(n_forms * s_dim).scaled(sign_chain_sign(i, j))
        else:
            tensor_map = induced_tensor_map(
                transform.automorphism, j, instance.identification
            )
            form_map = (
                base_maps[i] if base_maps is not None else OperatorMatrix.identity(n_forms)
            )
            block = kron(form_map, tensor_map)
        place_block(out, block, start, start)
    return out


def mirror_invariance_check(instance, transform, transport=TRANSPORT_INVERSE,
                            base_maps=None):
    """Build the mirrored complex, verify chain-map commutation, compare dims."""
    if instance.grading != GRADING_TOTAL:
        raise DegenerateInputError("mirror comparison needs the total grading")
    lam_m = mirror_lambda(transform, instance.lam, transport)
    mirrored = build_complex(
        instance.dga, instance.algebra, lam_m, instance.K,
        instance.convention, instance.grading, instance.identification,
    )
    residuals = []
    for k in range(instance.K):
        psi_k = chain_map_matrix(instance, transform, k, base_maps)
        psi_k1 = chain_map_matrix(instance, transform, k + 1, base_maps)
        lhs = psi_k1 @ instance.differentials[k]
        rhs = mirrored.differentials[k] @ psi_k
        residuals.append((lhs - rhs).max_abs())
    commutation_holds = all(r == 0 for r in residuals)

    rep_o = cohomology_report(instance)
    rep_m = cohomology_report(mirrored)
    flags = list(dict.fromkeys(rep_o.flags + rep_m.flags))
    if rep_o.dims is None or rep_m.dims is None:
        dims_equal = None
    else:
        dims_equal = rep_o.dims == rep_m.dims and rep_o.euler == rep_m.euler
    return MirrorInvarianceReport(
        transform.kind, residuals, commutation_holds,
        rep_o.dims, rep_m.dims, rep_o.euler, rep_m.euler, dims_equal, flags,
    )


@dataclass
class KunnethReport:
    per_degree: list  # [(k, total dim, product-formula dim)]
    matches: bool | None
    flags: list

    def to_json(self):
        return {
            "per_degree": [[k, a, b] for k, a, b in self.per_degree],
            "matches": self.matches,
            "flags": list(self.flags),
        }


def kunneth_diagnostic(instance):
    """Compare total-complex dims against the tensor-product formula.

    The right side is sum_{i+j=k} dim H^i(base) * dim H^j(delta), with the
    delta-only cohomology computed from the stored delta matrices. Reported
    only when both squared differentials vanish.
    """
    if instance.grading != GRADING_TOTAL:
        raise DegenerateInputError("the diagnostic needs the total grading")
    residual = d_squared_residual(instance)
    if residual != 0:
        return KunnethReport(
            [], None, [f"not applicable: D^2 residual = {residual}"]
        )
    rep = cohomology_report(instance)
    base_dims = instance.dga.de_rham_dims()
    delta_ranks = [m.rank() for m in instance.delta_matrices]
    delta_h = []
    prev = 0
    for j in range(instance.K):
        n_j = sym_dim(instance.algebra.dim, j)
        delta_h.append(n_j - delta_ranks[j] - prev)
        prev = delta_ranks[j]
    per_degree = []
    for k in range(instance.K):
        rhs = sum(
            base_dims[i] * delta_h[k - i]
            for i in range(min(k, instance.dga.top_degree) + 1)
            if k - i < len(delta_h)
        )
        per_degree.append((k, rep.dims[k], rhs))
    matches = all(a == b for _, a, b in per_degree)
    return KunnethReport(per_degree, matches, [])
