"""Lattice model of a trivial principal bundle over a flat torus.

Sites live on a periodic grid of shape (m_1, ..., m_n) with spacing
h_a = 1/m_a along axis a. The tangent model at every site is R^n + g with
the fiber direction kept algebraic: a connection sample assigns an algebra
vector to each site and base axis, and the connection form acts as
omega(u, X) = sum_a u_a * omega_a(site) + X.

Per-site diagnostics are exact: the constraint subspace is the kernel of
v -> <lam(site), omega(v)>, the flatness residual uses central differences,
and the two-term compatibility energy is evaluated as a lattice sum (no
optimization happens here). The transversality report is deliberately a
measurement: for fiber dimension > 1 the kernel arithmetic forces
dim(D & V) = dim(g) - 1 > 0, and the report states that outcome next to the
claim it audits instead of assuming either.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateInputError, FormatError, MismatchError
from .liealg import coadjoint, pairing
from .linalg import (
    ZERO,
    ONE,
    format_scalar,
    kernel_basis_dense,
    parse_scalar,
    rref,
    solve_dense,
)


@dataclass(frozen=True)
class GridBundle:
    shape: tuple  # sites per axis
    algebra: object
    omega: dict  # site -> tuple of AlgebraVector, one per axis
    lam_field: dict  # site -> DualVector

    @property
    def n_axes(self):
        return len(self.shape)

    def sites(self):
        return list(itertools.product(*(range(m) for m in self.shape)))

    def spacing(self, axis):
        return Fraction(1, self.shape[axis])

    def cell_volume(self):
        vol = ONE
        for m in self.shape:
            vol /= m
        return vol

    def shift(self, site, axis, step):
        out = list(site)
        out[axis] = (out[axis] + step) % self.shape[axis]
        return tuple(out)


def grid_bundle(shape, algebra, omega=None, lam_field=None):
    """Build a bundle from constant or per-site data.

    omega: None (flat), a sequence of per-axis coefficient lists applied at
    every site, or a {site: per-axis vectors} mapping. lam_field: a single
    coefficient list applied at every site, or a {site: coefficients} map.
    """
    shape = tuple(int(m) for m in shape)
    if not shape or any(m < 1 for m in shape):
        raise FormatError("grid shape needs positive extents")
    sites = list(itertools.product(*(range(m) for m in shape)))
    n = len(shape)

    def as_vector(coeffs):
        return algebra.vector(coeffs) if not hasattr(coeffs, "algebra") else coeffs

    if omega is None:
        const = tuple(algebra.zero_vector() for _ in range(n))
        omega_map = {site: const for site in sites}
    elif isinstance(omega, dict):
        omega_map = {}
        for site in sites:
            vecs = omega.get(tuple(site))
            if vecs is None:
                omega_map[site] = tuple(algebra.zero_vector() for _ in range(n))
            else:
                if len(vecs) != n:
                    raise MismatchError("need one connection sample per axis")
                omega_map[site] = tuple(as_vector(v) for v in vecs)
    else:
        if len(omega) != n:
            raise MismatchError("need one connection sample per axis")
        const = tuple(as_vector(v) for v in omega)
        omega_map = {site: const for site in sites}

    if lam_field is None:
        raise FormatError("a dual field is required")
    if isinstance(lam_field, dict):
        lam_map = {}
        for site in sites:
            coeffs = lam_field.get(tuple(site))
            if coeffs is None:
                raise FormatError(f"missing dual value at site {site}")
            lam_map[site] = coeffs if hasattr(coeffs, "algebra") else algebra.dual(coeffs)
    else:
        const = lam_field if hasattr(lam_field, "algebra") else algebra.dual(lam_field)
        lam_map = {site: const for site in sites}
    return GridBundle(shape, algebra, omega_map, lam_map)


def constraint_functional(bundle, site):
    """Row vector of v = (u, X) -> <lam(site), omega(v)> on R^n + g."""
    lam = bundle.lam_field[site]
    row = []
    for a in range(bundle.n_axes):
        row.append(pairing(lam, bundle.omega[site][a]))
    row.extend(lam.coeffs)
    return row


def constraint_distribution(bundle, site):
    """Canonical exact kernel basis of the constraint functional at a site."""
    lam = bundle.lam_field[site]
    if not lam.is_nondegenerate():
        raise DegenerateInputError(f"degenerate dual value at site {site}")
    row = constraint_functional(bundle, site)
    return kernel_basis_dense([row], len(row))


@dataclass
class TransversalityReport:
    per_site: dict  # site -> (dim D, dim D&V, dim D+V)
    tangent_dim: int
    fiber_dim: int
    zero_intersection: bool
    full_sum: bool
    degenerate_sites: list

    def to_json(self):
        return {
            "per_site": {
                ",".join(map(str, site)): list(v) for site, v in sorted(self.per_site.items())
            },
            "tangent_dim": self.tangent_dim,
            "fiber_dim": self.fiber_dim,
            "zero_intersection": self.zero_intersection,
            "full_sum": self.full_sum,
            "degenerate_sites": [list(s) for s in self.degenerate_sites],
        }


def transversality_report(bundle):
    """Exact per-site subspace arithmetic for D against the fiber directions."""
    n = bundle.n_axes
    dim_g = bundle.algebra.dim
    tangent = n + dim_g
    degenerate = [
        site for site in bundle.sites() if not bundle.lam_field[site].is_nondegenerate()
    ]
    if degenerate:
        raise DegenerateInputError(
            f"degenerate dual value at sites {degenerate[:4]}"
            + ("..." if len(degenerate) > 4 else "")
        )
    vertical = [
        tuple(ONE if c == n + i else ZERO for c in range(tangent)) for i in range(dim_g)
    ]
    per_site = {}
    zero_intersection = True
    full_sum = True
    for site in bundle.sites():
        dist = constraint_distribution(bundle, site)
        stacked = [list(v) for v in dist] + [list(v) for v in vertical]
        dim_sum = len(rref(stacked)[1])
        dim_int = len(dist) + dim_g - dim_sum
        per_site[site] = (len(dist), dim_int, dim_sum)
        if dim_int != 0:
            zero_intersection = False
        if dim_sum != tangent:
            full_sum = False
    return TransversalityReport(
        per_site, tangent, dim_g, zero_intersection, full_sum, [],
    )


@dataclass
class CartanResidualReport:
    field: dict  # (site, axis) -> residual coefficients (dual coordinates)
    max_abs: Fraction

    def to_json(self):
        return {
            "max_abs": str(self.max_abs),
            "field": [
                [list(site), axis, [format_scalar(v) for v in coeffs]]
                for (site, axis), coeffs in sorted(self.field.items())
            ],
        }


def cartan_residual(bundle):
    """Central-difference flatness residual of the dual field.

    Per site and axis a: (lam(site+a) - lam(site-a)) / (2 h_a)
    + ad*_{omega_a(site)} lam(site). Exact for constant fields.
    """
    for m in bundle.shape:
        if m < 3:
            raise MismatchError("central differences need at least 3 sites per axis")
    field = {}
    worst = ZERO
    for site in bundle.sites():
        lam = bundle.lam_field[site]
        for a in range(bundle.n_axes):
            plus = bundle.lam_field[bundle.shift(site, a, 1)]
            minus = bundle.lam_field[bundle.shift(site, a, -1)]
            scale = 1 / (2 * bundle.spacing(a))
            diff = (plus - minus).scaled(scale)
            res = diff + coadjoint(bundle.omega[site][a], lam)
            field[(site, a)] = res.coeffs
            m = max((abs(v) for v in res.coeffs), default=ZERO)
            worst = max(worst, m)
    return CartanResidualReport(field, worst)


def equivariance_residual(bundle, order=8, steps=(0.1, 0.2)):
    """Group-law consistency of the truncated equivariant transport (float).

    For each basis generator and step t the dual field is transported by the
    coadjoint exponential in one step of size t and in two steps of t/2; the
    residual is the max coefficient deviation. Zero steps and abelian fibers
    give exactly zero; otherwise the defect is the series truncation error.
    """
    if order < 4:
        raise MismatchError("series order must be >= 4")
    alg = bundle.algebra
    dim = alg.dim

    def coad_float(z):
        # columns are ad*_z applied to the dual basis vectors
        cols = [coadjoint(z, alg.dual_basis_vector(m)).coeffs for m in range(dim)]
        return [[float(cols[c][r]) for c in range(dim)] for r in range(dim)]

    def mat_mul(a, b):
        return [
            [sum(a[i][k] * b[k][j] for k in range(dim)) for j in range(dim)]
            for i in range(dim)
        ]

    def mat_apply(a, v):
        return [sum(a[i][k] * v[k] for k in range(dim)) for i in range(dim)]

    def expm(mat, t):
        out = [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]
        term = [row[:] for row in out]
        for p in range(1, order + 1):
            term = mat_mul(term, mat)
            term = [[x * t / p for x in row] for row in term]
            for i in range(dim):
                for j in range(dim):
                    out[i][j] += term[i][j]
        return out

    worst = 0.0
    for i in range(dim):
        gen = coad_float(alg.basis_vector(i))
        for t in steps:
            one_step = expm(gen, t)
            half = expm(gen, t / 2)
            two_step = mat_mul(half, half)
            for site in bundle.sites():
                lam = [float(c) for c in bundle.lam_field[site].coeffs]
                a = mat_apply(one_step, lam)
                b = mat_apply(two_step, lam)
                worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    return worst


def compatibility_functional_terms(bundle, dist_target=None):
    """The two lattice energies of the compatibility functional (no solve).

    First term: half the volume-weighted sum of squared flatness residuals.
    Second term: volume-weighted squared distance from the dual value to the
    annihilator of omega(D) at each site, with D the supplied per-site bases
    (defaults to the constraint kernel itself, which makes the term vanish).
    Distances use the dual-coordinate Euclidean norm.
    """
    residuals = cartan_residual(bundle)
    vol = bundle.cell_volume()
    first = ZERO
    for coeffs in residuals.field.values():
        first += sum((v * v for v in coeffs), ZERO)
    first = first * vol / 2

    if dist_target is None:
        dist_target = {site: constraint_distribution(bundle, site) for site in bundle.sites()}

    dim_g = bundle.algebra.dim
    n = bundle.n_axes
    second = ZERO
    for site in bundle.sites():
        lam = bundle.lam_field[site]
        # omega applied to the distribution basis spans a subspace of g
        images = []
        for vec in dist_target[site]:
            img = [ZERO] * dim_g
            for a in range(n):
                if vec[a]:
                    for r, c in enumerate(bundle.omega[site][a].coeffs):
                        img[r] += vec[a] * c
            for r in range(dim_g):
                img[r] += vec[n + r]
            images.append(img)
        # annihilator of that subspace inside the dual
        ann = kernel_basis_dense(images, dim_g) if images else []
        if not ann:
            dist_sq = sum((v * v for v in lam.coeffs), ZERO)
        else:
            cols = len(ann)
            gram = [
                [sum((ann[p][r] * ann[q][r] for r in range(dim_g)), ZERO) for q in range(cols)]
                for p in range(cols)
            ]
            rhs = [sum((ann[p][r] * lam.coeffs[r] for r in range(dim_g)), ZERO) for p in range(cols)]
            sol = solve_dense(gram, rhs)
            proj = [
                sum((sol[p] * ann[p][r] for p in range(cols)), ZERO) for r in range(dim_g)
            ]
            dist_sq = sum(((lam.coeffs[r] - proj[r]) ** 2 for r in range(dim_g)), ZERO)
        second += vol * dist_sq
    return first, second


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------


def bundle_to_json(bundle):
    return {
        "grid": list(bundle.shape),
        "algebra": bundle.algebra.name,
        "omega_base": [
            [list(site), a, [format_scalar(v) for v in vec.coeffs]]
            for site in bundle.sites()
            for a, vec in enumerate(bundle.omega[site])
            if not vec.is_zero()
        ],
        "lambda_field": [
            [list(site), [format_scalar(v) for v in bundle.lam_field[site].coeffs]]
            for site in bundle.sites()
        ],
    }


def bundle_from_json(data, algebra):
    try:
        shape = tuple(int(m) for m in data["grid"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("bundle JSON needs a grid field") from exc
    n = len(shape)

    omega_raw = data.get("omega_base")
    if omega_raw is None:
        omega = None
    elif isinstance(omega_raw, dict):
        if "constant" not in omega_raw:
            raise FormatError("omega_base shorthand must use a 'constant' key")
        omega = [
            algebra.vector([parse_scalar(v) for v in coeffs])
            for coeffs in omega_raw["constant"]
        ]
    else:
        omega = {}
        for item in omega_raw:
            site, a, coeffs = item
            site = tuple(int(s) for s in site)
            vecs = omega.get(site)
            if vecs is None:
                vecs = [algebra.zero_vector() for _ in range(n)]
            else:
                vecs = list(vecs)
            vecs[int(a)] = algebra.vector([parse_scalar(v) for v in coeffs])
            omega[site] = tuple(vecs)

    lam_raw = data.get("lambda_field")
    if lam_raw is None:
        raise FormatError("bundle JSON needs a lambda_field")
    if isinstance(lam_raw, dict):
        if "constant" not in lam_raw:
            raise FormatError("lambda_field shorthand must use a 'constant' key")
        lam_field = [parse_scalar(v) for v in lam_raw["constant"]]
    else:
        lam_field = {
            tuple(int(s) for s in site): algebra.dual([parse_scalar(v) for v in coeffs])
            for site, coeffs in lam_raw
        }
    return grid_bundle(shape, algebra, omega, lam_field)
