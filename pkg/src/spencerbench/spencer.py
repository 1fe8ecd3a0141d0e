"""Degree-raising operators on the symmetric algebra of a Lie algebra.

Two operators live here:

* the classical prolongation  s -> sum_i sum_j e_i . (s with [e_i, -] applied
  to the j-th factor), summed over the stored basis;
* the constraint-coupled operator delta^lam, determined by a generator rule
  (a symmetrized double-bracket pairing against a dual vector lam) plus a
  Leibniz extension.

The generator rule produces a quadratic form on test vectors; it is turned
back into a degree-2 tensor through an identification of the symmetric power
with its dual. Two identifications are supported:

* "basis":   e_i <-> e_i*, the coordinate identification (default);
* "killing": v <-> B(v, -) with B the Killing form (semisimple algebras
  only). Automorphisms are B-orthogonal, which makes the operator natural
  under automorphism transport; the coordinate identification does not have
  this property unless the automorphism matrix is orthogonal.

Both Leibniz conventions are implemented. UNSIGNED extends the generator rule
as an even derivation and is order-independent. PAPER_SIGNED inserts a sign
(-1)^p when the rule walks past a degree-p left factor; on a commutative
product that recipe depends on the factor ordering, so it is applied to the
canonical sorted factorization, and a separate audit measures the order
dependence instead of hiding it.

Whether (delta^lam)^2 = 0 is treated as a measurement, never an assumption:
nilpotency_report multiplies the assembled matrices and reports the exact
residuals per degree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateInputError, MismatchError
from .liealg import bracket, killing_gram, pairing
from .linalg import ZERO, OperatorMatrix, invert_dense
from .symtensor import (
    SymTensor,
    basis_tensor,
    multisets,
    sym_dim,
    sym_product,
    tensor_from_values,
    zero_tensor,
)


class LeibnizConvention(str, enum.Enum):
    UNSIGNED = "unsigned"
    PAPER_SIGNED = "paper-signed"


class Identification(str, enum.Enum):
    BASIS = "basis"
    KILLING = "killing"


_KILLING_INVERSE_CACHE = {}


def _killing_inverse(algebra):
    key = (algebra.name, algebra.dim, algebra.structure)
    if key not in _KILLING_INVERSE_CACHE:
        gram = killing_gram(algebra)
        inv = invert_dense([list(row) for row in gram])
        if inv is None:
            raise DegenerateInputError(
                f"Killing form of {algebra.name} is singular; "
                "the killing identification needs a semisimple algebra"
            )
        _KILLING_INVERSE_CACHE[key] = tuple(tuple(row) for row in inv)
    return _KILLING_INVERSE_CACHE[key]


def classical_prolongation(s):
    """Basis-summed prolongation; degree k -> k+1, zero on degree 0."""
    algebra = s.algebra
    if s.degree == 0:
        return zero_tensor(algebra, 1)
    out = zero_tensor(algebra, s.degree + 1)
    basis = algebra.basis_vectors()
    for key, coeff in s.coeffs.items():
        for i, e_i in enumerate(basis):
            for j in range(len(key)):
                replaced = bracket(e_i, basis[key[j]])
                if replaced.is_zero():
                    continue
                rest = key[:j] + key[j + 1 :]
                term = SymTensor(algebra, s.degree - 1, {tuple(rest): coeff})
                # e_i . [e_i, e_{key_j}] expanded into the multiset basis
                pair = {}
                for m, c in enumerate(replaced.coeffs):
                    if c:
                        ms = tuple(sorted((i, m)))
                        pair[ms] = pair.get(ms, ZERO) + c
                factor = SymTensor(algebra, 2, {k: v for k, v in pair.items() if v})
                out = out + sym_product(term, factor)
    return out


def _generator_values(lam, v):
    """Symmetrized nested-bracket pairing on all basis pairs, as a value map."""
    algebra = v.algebra
    basis = algebra.basis_vectors()
    values = {}
    for i in range(algebra.dim):
        for j in range(i, algebra.dim):
            w1, w2 = basis[i], basis[j]
            val = (
                pairing(lam, bracket(w1, bracket(w2, v)))
                + pairing(lam, bracket(w2, bracket(w1, v)))
            ) / 2
            values[(i, j)] = val
    return values


def _jacobi_values(lam, v):
    """Same quadratic form computed through the bracket-rewritten formula."""
    algebra = v.algebra
    basis = algebra.basis_vectors()
    values = {}
    for i in range(algebra.dim):
        for j in range(i, algebra.dim):
            w1, w2 = basis[i], basis[j]
            val = pairing(lam, bracket(w2, bracket(w1, v))) + pairing(
                lam, bracket(bracket(w1, w2), v)
            ) / 2
            values[(i, j)] = val
    return values


def _reconstruct(algebra, values, identification):
    tensor = tensor_from_values(algebra, 2, lambda key: values[key])
    if identification == Identification.KILLING:
        from .symtensor import apply_linear_map

        tensor = apply_linear_map(tensor, _killing_inverse(algebra))
    return tensor


def delta_lambda_generator(lam, v, identification=Identification.BASIS):
    """Image of a degree-1 element under the constraint-coupled operator."""
    if lam.algebra != v.algebra:
        raise MismatchError("lam and v live on different algebras")
    identification = Identification(identification)
    return _reconstruct(v.algebra, _generator_values(lam, v), identification)


def jacobi_form_generator(lam, v, identification=Identification.BASIS):
    """Generator rule computed via the rewritten double-bracket expression."""
    if lam.algebra != v.algebra:
        raise MismatchError("lam and v live on different algebras")
    identification = Identification(identification)
    return _reconstruct(v.algebra, _jacobi_values(lam, v), identification)


class _GeneratorTable:
    """Caches delta of every basis generator for a fixed (lam, identification)."""

    def __init__(self, lam, identification):
        self.lam = lam
        self.identification = Identification(identification)
        self.algebra = lam.algebra
        self._table = {}

    def __getitem__(self, i):
        if i not in self._table:
            self._table[i] = delta_lambda_generator(
                self.lam, self.algebra.basis_vector(i), self.identification
            )
        return self._table[i]


def _delta_sequence_unsigned(table, seq):
    """Even-derivation extension: replace one factor at a time, no signs."""
    algebra = table.algebra
    out = zero_tensor(algebra, len(seq) + 1)
    for t in range(len(seq)):
        rest = seq[:t] + seq[t + 1 :]
        term = table[seq[t]]
        for i in rest:
            term = sym_product(term, basis_tensor(algebra, (i,)))
        out = out + term
    return out


def _delta_sequence_signed(table, seq):
    """Left-to-right signed splitting of an ordered factor sequence."""
    algebra = table.algebra
    if len(seq) == 1:
        return table[seq[0]]
    head, rest = seq[0], seq[1:]
    first = sym_product(table[head], basis_tensor(algebra, tuple(sorted(rest))))
    second = sym_product(basis_tensor(algebra, (head,)), _delta_sequence_signed(table, rest))
    # the walked-past factor has degree 1, so the sign is (-1)^1
    return first - second


def delta_lambda(lam, s, convention=LeibnizConvention.UNSIGNED,
                 identification=Identification.BASIS):
    """Constraint-coupled operator on a tensor of any degree >= 1.

    Degree-0 input maps to zero. Each basis multiset is factorized in sorted
    index order; UNSIGNED is independent of that order, PAPER_SIGNED is made
    single-valued by it (see signed_leibniz_welldefinedness).
    """
    if lam.algebra != s.algebra:
        raise MismatchError("lam and s live on different algebras")
    convention = LeibnizConvention(convention)
    table = _GeneratorTable(lam, identification)
    out = zero_tensor(s.algebra, s.degree + 1)
    for key, coeff in s.coeffs.items():
        if not key:
            continue
        if convention is LeibnizConvention.UNSIGNED:
            img = _delta_sequence_unsigned(table, key)
        else:
            img = _delta_sequence_signed(table, key)
        out = out + img.scaled(coeff)
    return out


def delta_matrix(lam, k, convention=LeibnizConvention.UNSIGNED,
                 identification=Identification.BASIS):
    """Matrix of delta^lam from degree k to k+1 in sym_basis order."""
    if k < 0:
        raise MismatchError("degree must be >= 0")
    algebra = lam.algebra
    convention = LeibnizConvention(convention)
    table = _GeneratorTable(lam, identification)
    domain = multisets(algebra.dim, k)
    codomain_index = {key: r for r, key in enumerate(multisets(algebra.dim, k + 1))}
    out = OperatorMatrix.zero(sym_dim(algebra.dim, k + 1), sym_dim(algebra.dim, k))
    for c, key in enumerate(domain):
        if not key:
            continue
        if convention is LeibnizConvention.UNSIGNED:
            img = _delta_sequence_unsigned(table, key)
        else:
            img = _delta_sequence_signed(table, key)
        for row_key, v in img.coeffs.items():
            out.set(codomain_index[row_key], c, v)
    return out


def delta_matrix_to_json(matrix, k):
    data = matrix.to_json()
    data["domain_degree"] = k
    data["codomain_degree"] = k + 1
    return data


@dataclass
class NilpotencyReport:
    convention: LeibnizConvention
    identification: Identification
    residuals: list  # [(degree k, max |entry| of delta_{k+1} @ delta_k)]
    holds: bool
    witness: tuple | None  # (degree, multiset) of a nonzero composite column
    composites: list = field(repr=False, default_factory=list)

    def to_json(self):
        return {
            "convention": self.convention.value,
            "identification": self.identification.value,
            "residuals": [[k, str(r)] for k, r in self.residuals],
            "holds": self.holds,
            "witness": None
            if self.witness is None
            else {"degree": self.witness[0], "multiset": list(self.witness[1])},
        }


def nilpotency_report(lam, K, convention=LeibnizConvention.UNSIGNED,
                      identification=Identification.BASIS):
    """Measure delta^2 degree by degree up to the truncation K (K >= 2).

    The verdict is whatever the matrix products say; nothing is assumed.
    """
    if K < 2:
        raise MismatchError("nilpotency audit needs K >= 2")
    algebra = lam.algebra
    mats = [delta_matrix(lam, k, convention, identification) for k in range(K)]
    residuals = []
    composites = []
    witness = None
    for k in range(K - 1):
        comp = mats[k + 1] @ mats[k]
        composites.append(comp)
        residuals.append((k, comp.max_abs()))
        if witness is None and not comp.is_zero():
            col = min(c for (_, c) in comp.entries)
            witness = (k, multisets(algebra.dim, k)[col])
    holds = all(r == 0 for _, r in residuals)
    return NilpotencyReport(
        LeibnizConvention(convention),
        Identification(identification),
        residuals,
        holds,
        witness,
        composites,
    )


@dataclass
class OrderingWitness:
    multiset: tuple
    forward: tuple  # factor sequence used by the canonical rule
    reverse: tuple
    difference_max: Fraction

    def to_json(self):
        return {
            "multiset": list(self.multiset),
            "forward": list(self.forward),
            "reverse": list(self.reverse),
            "difference_max": str(self.difference_max),
        }


def signed_leibniz_welldefinedness(lam, k, identification=Identification.BASIS):
    """Order-dependence audit of the signed rule at degree k >= 2.

    Applies the signed splitting to the sorted factor sequence and to its
    reverse; returns a witness for every multiset where the two disagree.
    An empty list means the signed rule is order-independent there.
    """
    if k < 2:
        raise MismatchError("the ordering audit needs degree >= 2")
    table = _GeneratorTable(lam, identification)
    witnesses = []
    for key in multisets(lam.algebra.dim, k):
        forward = key
        reverse = tuple(reversed(key))
        diff = _delta_sequence_signed(table, forward) - _delta_sequence_signed(table, reverse)
        if not diff.is_zero():
            witnesses.append(OrderingWitness(key, forward, reverse, diff.max_abs()))
    return witnesses
