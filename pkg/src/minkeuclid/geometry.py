"""Riemannian layer: exact metric and volume density with invariance checks,
divergence-form Laplacian assembly, and floating-point geodesics and distance.

The metric is ``A tr(Y^-1 dY Y^-1 dY) + B tr(Y^-1 t(dV) dV)`` over the
coordinate order y_1_1, y_1_2, ..., y_n_n, v_1_1, ..., v_m_n.  Exact work
stays in rational arithmetic; the square root of det Y needed by the volume
density and the Laplacian assembly is carried as a formal symbol ``u`` with
u^2 = det Y, and must cancel from every final result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .matrices import Mat, ShapeError
from .polynomials import (
    DEFAULT_PARAMS,
    Polynomial,
    RationalFunction,
    coordinate_table,
    num_coords,
    sym_pairs,
    y_name,
)
from .weyl import ActionMap, DiffOperator
from .grouplie import Point


class AssemblyError(RuntimeError):
    """An exact identity the assembly relies on failed to hold."""


# -- exact metric and volume -------------------------------------------------------


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric matrix of exact rational-function entries, block diagonal in
    the y- and v-coordinates."""

    n: int
    m: int
    table: object
    names: tuple
    entries: tuple
    a_value: Fraction | None
    b_value: Fraction | None

    @property
    def dim(self) -> int:
        return len(self.names)

    def entry(self, i: int, j: int) -> RationalFunction:
        return self.entries[i][j]

    def as_mat(self) -> Mat:
        return Mat(self.dim, self.dim, [list(r) for r in self.entries])


def _sym_basis(n: int):
    """Constant symmetric matrices dual to the y_i_j coordinates, in order."""
    out = []
    for (i, j) in sym_pairs(n):
        rows = [[Fraction(0)] * n for _ in range(n)]
        rows[i - 1][j - 1] += 1
        rows[j - 1][i - 1] += 1 if i != j else 0
        out.append(Mat(n, n, rows))
    return out


def _coordinate_y(table, n) -> Mat:
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            row.append(RationalFunction.variable(table, y_name(a, b)))
        rows.append(row)
    return Mat(n, n, rows)


def metric_matrix(n: int, m: int, a_value=None, b_value=None) -> MetricTensor:
    """The invariant metric as an exact matrix over coordinate_table(n, m).

    ``a_value``/``b_value`` fix the scale parameters to rationals; ``None``
    keeps them as the formal symbols A and B.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    table = coordinate_table(n, m)
    zero = RationalFunction.constant(table, 0)
    a_rf = (RationalFunction.variable(table, "A") if a_value is None
            else RationalFunction.constant(table, Fraction(a_value)))
    b_rf = (RationalFunction.variable(table, "B") if b_value is None
            else RationalFunction.constant(table, Fraction(b_value)))

    ymat = _coordinate_y(table, n)
    yinv = ymat.inv()
    basis = [s.map(lambda c: RationalFunction.constant(table, c)) for s in _sym_basis(n)]
    ny = n * (n + 1) // 2
    dim = num_coords(n, m)
    rows = [[zero] * dim for _ in range(dim)]

    mixed = [yinv.mul(s, zero) for s in basis]
    for a in range(ny):
        for b in range(a, ny):
            val = mixed[a].mul(mixed[b], zero).trace(zero) * a_rf
            rows[a][b] = val
            rows[b][a] = val
    # v-block: the (k,l),(k',l') entry is B * delta_{kk'} * (Y^-1)_{l,l'}
    for k in range(m):
        for l in range(n):
            for l2 in range(n):
                rows[ny + k * n + l][ny + k * n + l2] = yinv[l, l2] * b_rf

    names = tuple(table.names[:dim])
    entries = tuple(tuple(r) for r in rows)
    a_val = None if a_value is None else Fraction(a_value)
    b_val = None if b_value is None else Fraction(b_value)
    return MetricTensor(n=n, m=m, table=table, names=names, entries=entries,
                        a_value=a_val, b_value=b_val)


def extended_table(n: int, m: int):
    """coordinate_table(n, m) with the extra square-root symbol u appended."""
    return coordinate_table(n, m, params=DEFAULT_PARAMS + ("u",))


def volume_density(n: int, m: int) -> RationalFunction:
    """(det Y)^(-(n+m+1)/2) as 1/u^(n+m+1) over extended_table(n, m)."""
    table = extended_table(n, m)
    u = Polynomial.variable(table, "u")
    return RationalFunction(Polynomial.one(table), u ** (n + m + 1))


def det_y_polynomial(table, n: int) -> Polynomial:
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            row.append(Polynomial.variable(table, y_name(a, b)))
        rows.append(row)
    return Mat(n, n, rows).det(Polynomial.zero(table))


def metric_and_volume_invariance(n: int, m: int, action: ActionMap, points: int = 5,
                                 seed=0) -> bool:
    """Exact pointwise invariance of the metric and of the volume density.

    Metric: tJ * G(phi(p)) * J == G(p) with J the (constant) Jacobian of the
    action, at seeded rational points.  Volume: the density comparison is done
    on squares, (det Y*)^-(n+m+1) * (det J)^2 == (det Y)^-(n+m+1), so the
    whole check stays inside the rationals.
    """
    from .grouplie import sample_point

    metric = metric_matrix(n, m)
    table = metric.table
    dim = metric.dim
    if action.table != table or action.ncoords != dim:
        raise ValueError("action must act on coordinate_table(n, m)")

    jrows = action.jacobian()
    detj = Mat(dim, dim, jrows).det()
    if detj == 0:
        raise ValueError("singular action")
    jmat = Mat(dim, dim, [[RationalFunction.constant(table, c) for c in row]
                          for row in jrows])
    zero = RationalFunction.constant(table, 0)
    power = n + m + 1

    for idx in range(points):
        point = sample_point(n, m, seed=f"{seed}:metric:{idx}")
        values = point.coordinates()
        star = {table.names[i]: action.bindings[i].eval_rational(values)
                for i in range(dim)}

        here = metric.as_mat().map(lambda rf: rf.subst(values))
        there = metric.as_mat().map(lambda rf: rf.subst(star))
        pulled = jmat.T.mul(there.mul(jmat, zero), zero)
        if pulled != here:
            return False

        dety = point.Y.det()
        ymat_star = [[star[y_name(min(i, j), max(i, j))] for j in range(1, n + 1)]
                     for i in range(1, n + 1)]
        dety_star = Mat(n, n, ymat_star).det()
        if detj ** 2 * dety ** power != dety_star ** power:
            return False
    return True


# -- Laplace-Beltrami assembly -----------------------------------------------------


def _lift(p: Polynomial, ext) -> Polynomial:
    return Polynomial._make(ext, {e + (0,): c for e, c in p.terms.items()})


def _lift_rf(rf: RationalFunction, ext) -> RationalFunction:
    return RationalFunction._make(_lift(rf.num, ext), _lift(rf.den, ext))


def _lower(p: Polynomial, std) -> Polynomial:
    terms = {}
    for e, c in p.terms.items():
        if e[-1]:
            raise AssemblyError("residual square-root symbol u in the assembled operator")
        terms[e[:-1]] = c
    return Polynomial._make(std, terms)


def laplace_beltrami(metric: MetricTensor, force: bool = False) -> DiffOperator:
    """Assembles (1/sqrt(det G)) sum_i d_i (sqrt(det G) G^{ij} d_j) exactly.

    sqrt(det Y) is carried as the formal symbol u (u^2 = det Y,
    du/dy_ij = (u/2) tr(Y^-1 dY/dy_ij)); the assembly fails loudly if any u
    survives in the output, or if det G is not a constant multiple of the
    expected power of det Y.
    """
    n, m = metric.n, metric.m
    if (n > 2 or m > 1) and not force:
        raise ValueError(
            f"symbolic assembly for (n, m) = ({n}, {m}) exceeds the default "
            "cost guard (n <= 2, m <= 1); pass force=True to override")

    std = metric.table
    ext = extended_table(n, m)
    dim = metric.dim
    ny = n * (n + 1) // 2
    zero = RationalFunction.constant(ext, 0)

    g_full = [[_lift_rf(metric.entries[i][j], ext) for j in range(dim)]
              for i in range(dim)]
    for i in range(ny):
        for j in range(ny, dim):
            if not g_full[i][j].is_zero():
                raise AssemblyError("metric cross block is not zero")

    y_block = Mat(ny, ny, [row[:ny] for row in g_full[:ny]])
    y_inv = y_block.inv()
    det_g = y_block.det(zero)
    if m:
        v_block = Mat(dim - ny, dim - ny,
                      [row[ny:] for row in g_full[ny:]])
        v_inv = v_block.inv()
        det_g = det_g * v_block.det(zero)
    g_inv = [[zero] * dim for _ in range(dim)]
    for i in range(ny):
        for j in range(ny):
            g_inv[i][j] = y_inv[i, j]
    if m:
        for i in range(dim - ny):
            for j in range(dim - ny):
                g_inv[ny + i][ny + j] = v_inv[i, j]

    dety = _lift(det_y_polynomial(std, n), ext)
    power = n + m + 1
    shape = det_g * RationalFunction.from_poly(dety ** power)
    if (shape.num.total_degree_in(range(dim)) != 0
            or shape.den.total_degree_in(range(dim)) != 0):
        raise AssemblyError(
            "det G is not a constant multiple of (det Y)^-(n+m+1)")

    # du/dx_i = (u/2) tr(Y^-1 S_i) for y-coordinates, 0 for v-coordinates
    u_rf = RationalFunction.variable(ext, "u")
    yinv_ext = _coordinate_y(ext, n).inv()
    basis = [s.map(lambda c: RationalFunction.constant(ext, c)) for s in _sym_basis(n)]
    du = []
    for i in range(dim):
        if i < ny:
            du.append(yinv_ext.mul(basis[i], zero).trace(zero) * u_rf / 2)
        else:
            du.append(zero)

    def total_deriv(rf: RationalFunction, i: int) -> RationalFunction:
        out = rf.diff(ext.names[i])
        if not du[i].is_zero():
            out = out + rf.diff("u") * du[i]
        return out

    sqrt_det = RationalFunction(Polynomial.one(ext),
                                Polynomial.variable(ext, "u") ** power)
    sqrt_det_inv = RationalFunction.from_poly(Polynomial.variable(ext, "u") ** power)

    terms = {}
    for j in range(dim):
        acc = zero
        for i in range(dim):
            acc = acc + total_deriv(sqrt_det * g_inv[i][j], i)
        first = sqrt_det_inv * acc
        if not first.is_zero():
            alpha = [0] * dim
            alpha[j] = 1
            terms[tuple(alpha)] = first
    for i in range(dim):
        for j in range(i, dim):
            coeff = g_inv[i][j] if i == j else g_inv[i][j] * 2
            if coeff.is_zero():
                continue
            alpha = [0] * dim
            alpha[i] += 1
            alpha[j] += 1
            terms[tuple(alpha)] = coeff

    lowered = {}
    for alpha, rf in terms.items():
        lowered[alpha] = RationalFunction._make(_lower(rf.num, std), _lower(rf.den, std))
    return DiffOperator(std, lowered)


@dataclass(frozen=True)
class LaplaceComparison:
    """Divergence-form assembly vs the closed second-order formula."""

    n: int
    m: int
    assembled: DiffOperator
    closed: DiffOperator
    difference: DiffOperator

    @property
    def equal(self) -> bool:
        return self.difference.is_zero()

    def __str__(self):
        verdict = "agree" if self.equal else f"differ by {self.difference}"
        return f"Laplacian comparison (n={self.n}, m={self.m}): {verdict}"


def laplace_comparison(n: int, m: int, convention: str = "lower") -> LaplaceComparison:
    from .constructors import build_operator

    metric = metric_matrix(n, m)
    assembled = laplace_beltrami(metric)
    closed = build_operator(f"Laplacian:convention={convention}", n, m, metric.table)
    return LaplaceComparison(n=n, m=m, assembled=assembled, closed=closed,
                             difference=assembled - closed)


# -- floating-point geodesics and distance ------------------------------------------


@dataclass(frozen=True)
class FloatPoint:
    y: np.ndarray
    v: np.ndarray


def _as_float_matrix(value) -> np.ndarray:
    if isinstance(value, Mat):
        return np.array([[float(value[i, j]) for j in range(value.cols)]
                         for i in range(value.rows)], dtype=float)
    return np.asarray(value, dtype=float)


def _point_arrays(p, n=None):
    if isinstance(p, Point):
        return _as_float_matrix(p.Y), _as_float_matrix(p.V)
    if isinstance(p, FloatPoint):
        return np.asarray(p.y, dtype=float), np.asarray(p.v, dtype=float)
    y, v = p
    y = _as_float_matrix(y)
    v = _as_float_matrix(v) if v is not None else np.zeros((0, y.shape[0]))
    return y, v


@dataclass(frozen=True)
class GeodesicParams:
    """Data for a geodesic through the base point (I, 0): an orthogonal frame,
    exponent rates for the Y part, and a linear rate matrix for the V part."""

    k: np.ndarray
    lam: tuple
    z: np.ndarray

    def __post_init__(self):
        k = _as_float_matrix(self.k)
        n = k.shape[0]
        if k.shape != (n, n):
            raise ShapeError("frame must be square")
        if float(np.max(np.abs(k.T @ k - np.eye(n)))) > 1e-12:
            raise ValueError("frame is not orthogonal to 1e-12")
        lam = tuple(float(x) for x in self.lam)
        if len(lam) != n:
            raise ValueError("need one exponent rate per row")
        z = _as_float_matrix(self.z) if self.z is not None else np.zeros((0, n))
        if z.size and z.shape[1] != n:
            raise ShapeError("rate matrix must have n columns")
        if all(x == 0 for x in lam) and not np.any(z):
            raise ValueError("zero initial velocity does not define a geodesic")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.k.shape[0]

    @property
    def m(self) -> int:
        return self.z.shape[0]


def geodesic_eval(params: GeodesicParams, t: float) -> FloatPoint:
    """The geodesic point at parameter t.

    Y(t) = tk diag(e^{2 lam_j t}) k and V(t) = z tk J(t) k with
    J(t) = diag of the integral of e^{lam_j (t-s)} over [0, t], evaluated in
    closed form entrywise: (e^{lam_j t} - 1)/lam_j, and t itself at lam_j = 0.
    """
    k = params.k
    lam = np.asarray(params.lam)
    y = k.T @ np.diag(np.exp(2.0 * lam * t)) @ k
    integral = np.array([math.expm1(l * t) / l if l else float(t) for l in params.lam])
    v = params.z @ (k.T @ np.diag(integral) @ k)
    return FloatPoint(y=y, v=v)


def geodesic_tangent0(params: GeodesicParams):
    """The initial tangent: (tk diag(2 lam_j) k, z)."""
    k = params.k
    d = np.diag(2.0 * np.asarray(params.lam))
    return k.T @ d @ k, params.z.copy()


def metric_value_float(y, y_dot, v_dot, a: float = 1.0, b: float = 1.0) -> float:
    """ds^2 evaluated on a tangent vector, in floating point."""
    sy = np.linalg.solve(y, y_dot)
    total = a * float(np.trace(sy @ sy))
    if v_dot.size:
        total += b * float(np.trace(np.linalg.solve(y, v_dot.T @ v_dot)))
    return total


def path_length(params: GeodesicParams, t0: float = 0.0, t1: float = 1.0,
                a: float = 1.0, b: float = 1.0, h: float = 1e-5) -> float:
    """Arc length of the geodesic over [t0, t1] by quadrature, with the
    velocity taken from central differences (an oracle independent of the
    closed-form tangent)."""

    def speed(t):
        plus = geodesic_eval(params, t + h)
        minus = geodesic_eval(params, t - h)
        y_dot = (plus.y - minus.y) / (2 * h)
        v_dot = (plus.v - minus.v) / (2 * h)
        y = geodesic_eval(params, t).y
        return math.sqrt(metric_value_float(y, y_dot, v_dot, a, b))

    value, abserr = integrate.quad(speed, t0, t1, epsabs=1e-9, limit=200)
    return value


@dataclass(frozen=True)
class DistanceResult:
    value: float
    t: tuple
    deltas: tuple
    g: np.ndarray
    convention: str


def distance(p0, p1, a: float = 1.0, b: float = 1.0,
             convention: str = "as-printed") -> DistanceResult:
    """Length of the connecting geodesic between two points.

    Normalizes with g such that g Y0 tg = I and g Y1 tg is diagonal, takes
    t_j from the diagonal (the zeros of det(t Y0 - Y1)), and evaluates

        A (sum_j (ln t_j)^2)^(1/2)
          + B integral_0^1 (sum_j Delta_j e^{-(ln t_j) t})^(1/2) dt

    with Delta_j the squared column norms of (V1 - V0) tg.  The prefactors
    are used exactly as written; convention "sqrt-scaled" replaces A, B by
    their square roots (scaling the metric by A scales lengths by sqrt(A)).
    """
    if convention not in ("as-printed", "sqrt-scaled"):
        raise ValueError(f"unknown convention {convention!r}")
    y0, v0 = _point_arrays(p0)
    y1, v1 = _point_arrays(p1)
    n = y0.shape[0]
    try:
        chol = np.linalg.cholesky(y0)
    except np.linalg.LinAlgError:
        raise ValueError("first argument is not positive definite") from None
    g = np.linalg.inv(chol)
    w = g @ y1 @ g.T
    w = (w + w.T) / 2
    eigvals, q = np.linalg.eigh(w)
    if np.min(eigvals) <= 0:
        raise ValueError("second argument is not positive definite")
    g = q.T @ g
    logs = np.log(eigvals)

    vt = (v1 - v0) @ g.T if v0.size else np.zeros((0, n))
    deltas = np.sum(vt * vt, axis=0) if vt.size else np.zeros(n)

    a_eff = math.sqrt(a) if convention == "sqrt-scaled" else a
    b_eff = math.sqrt(b) if convention == "sqrt-scaled" else b

    y_part = a_eff * math.sqrt(float(np.sum(logs * logs)))
    v_part = 0.0
    if np.any(deltas > 0):
        def integrand(t):
            return math.sqrt(float(np.sum(deltas * np.exp(-logs * t))))

        value, abserr = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-10, limit=200)
        if abserr > 1e-8:
            raise RuntimeError(f"quadrature did not converge (abserr={abserr:.3e})")
        v_part = b_eff * value

    return DistanceResult(value=y_part + v_part, t=tuple(float(x) for x in eigvals),
                          deltas=tuple(float(x) for x in deltas), g=g,
                          convention=convention)
