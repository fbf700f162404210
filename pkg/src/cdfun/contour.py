"""Contour functionals: indices, residues, Cauchy formulas, coefficients, roots.

Everything here reduces to loop integrals.  Two integration routes are used:

* ``line_integral`` (hat increments of a primitive) for integrands that are
  phrases in their own right — residues and the residue-theorem sides;
* exact kernel primitives for the Cauchy-type kernels (zeta - a)^(-k-1):
  along the circle zeta(t) = a + rho*exp(2*pi*t*M) the kernel has the
  closed-form primitive (zeta - a)^(-k)/(-k) (or Ln(zeta - a) for k = 0),
  so increment sums need no finite differencing at all and converge with
  the same Richardson tableau used by the line integrals.

Cauchy evaluation deforms to a small circle centered at the evaluation
point itself (direction taken from the given contour): integrating the
kernel against f over the *given* contour would need the kernel's primitive
along paths far from the singularity, where it is not a phrase.  The small
circle leaves an even-order bias in its radius, which one extrapolation
step (4*S(rho/2) - S(rho))/3 removes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import CDNumber, basis_element, mul, mul_arrays, norm_arrays, zero
from .errors import (
    DomainError,
    LevelMismatchError,
    NonConvergenceError,
    PoleError,
    SingularElementError,
    StepControlError,
    UnsupportedShapeError,
)
from .expressions import (
    Add,
    Const,
    LogLeaf,
    Mul,
    Neg,
    Node,
    Phrase,
    PowNode,
    Sub,
    VarPow,
    derivative_apply,
    eval_node_arrays,
    evaluate,
)
from .integrate import (
    MAX_KNOTS,
    Partition,
    Path,
    QuadratureResult,
    _extrapolated,
    _offset_knots,
    _quadrature_knots,
    line_integral,
    log_integral,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# report types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexVector:
    """Per-plane winding numbers of a projected curve.

    ``per_plane`` maps the basis index s to the winding number of the
    curve projected to the plane spanned by 1 and e_s; planes where the
    projection passes through the projected point are listed in
    ``undefined`` instead.
    """

    per_plane: Dict[int, int]
    undefined: FrozenSet[int] = frozenset()

    def entry(self, s: int) -> int:
        if s in self.undefined:
            raise DomainError(f"winding number in plane e{s} is undefined (degenerate projection)")
        return self.per_plane[s]

    def to_json(self):
        out = {f"e{s}": int(n) for s, n in sorted(self.per_plane.items())}
        out["undefined"] = [f"e{s}" for s in sorted(self.undefined)]
        return out


@dataclass(frozen=True)
class ResidueFunctional:
    """Sampled residue functional M -> res(center, f)M over probe directions."""

    center: CDNumber
    sampled: Tuple[Tuple[CDNumber, CDNumber], ...]

    def probe(self, m: CDNumber) -> CDNumber:
        for probe, value in self.sampled:
            if np.array_equal(probe.coeffs, m.coeffs):
                return value
        raise DomainError("direction was not sampled")


@dataclass(frozen=True)
class ContourReport:
    lhs: CDNumber
    rhs: CDNumber
    diff: float
    est_error: float
    mode: str = "value"
    paths_used: tuple = ()

    def to_json(self):
        return {
            "lhs": [float(v) for v in self.lhs.coeffs],
            "rhs": [float(v) for v in self.rhs.coeffs],
            "diff": float(self.diff),
            "est_error": float(self.est_error),
            "mode": self.mode,
        }


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------

_WINDING_START = 1024
_WINDING_CAP = 1 << 18


def _segment_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Distance from the origin to the polyline through the points (x, y).

    Measured against the segments, not just the vertices: a projected
    curve that crosses the origin between two samples must still count
    as passing through it.
    """
    x0, dx = x[:-1], np.diff(x)
    y0, dy = y[:-1], np.diff(y)
    dd = dx * dx + dy * dy
    t = np.where(dd > 0.0, -(x0 * dx + y0 * dy) / np.where(dd > 0.0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    dist2 = (x0 + t * dx) ** 2 + (y0 + t * dy) ** 2
    end = x[-1] ** 2 + y[-1] ** 2
    return math.sqrt(float(min(dist2.min(initial=math.inf), end)))


def winding_index(a: CDNumber, gamma: Path) -> IndexVector:
    """Planar winding numbers of gamma around a, one per imaginary direction.

    Plane s sees the projection (re, coeff_s) of curve and point; its entry
    is the accumulated angle of the projected curve about the projected
    point, divided by 2*pi.  Projections passing within 1e-9 (relative) of
    the point are flagged undefined rather than counted.
    """
    if a.level.r != gamma.level.r:
        raise LevelMismatchError("point level does not match path level")
    d = a.level.basis_dim
    n = _WINDING_START
    while True:
        knots = _quadrature_knots(gamma, n)
        Z = gamma.sample(knots)
        scale = 1.0 + float(a.norm()) + float(norm_arrays(Z).max(initial=0.0))
        per_plane: Dict[int, int] = {}
        undefined = set()
        widest = 0.0
        for s in range(1, d):
            x = Z[:, 0] - a.coeffs[0]
            y = Z[:, s] - a.coeffs[s]
            if _segment_distance(x, y) <= 1e-9 * scale:
                undefined.add(s)
                continue
            ang = np.unwrap(np.arctan2(y, x))
            if len(ang) > 1:
                widest = max(widest, float(np.abs(np.diff(ang)).max()))
            per_plane[s] = int(round((ang[-1] - ang[0]) / TWO_PI))
        if widest < math.pi / 2:
            return IndexVector(per_plane, frozenset(undefined))
        n *= 2
        if n > _WINDING_CAP:
            raise StepControlError("projected curve winds faster than the sampling cap resolves")


def ar_index(a: CDNumber, gamma: Path, tol: float = 1e-6) -> CDNumber:
    """The algebra-valued index (2*pi)^(-1) * loop integral of d(Ln(z - a)).

    For a circle of ``turns`` n and direction M about a this is n*M; for a
    loop not enclosing a it vanishes.
    """
    return log_integral(a, gamma, tol) * (1.0 / TWO_PI)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

def _require_unit_imaginary(m: CDNumber) -> CDNumber:
    im = m.imag()
    n = im.norm()
    if abs(m.re) > 1e-9 or abs(n - 1.0) > 1e-9:
        raise DomainError("direction must be a unit pure-imaginary element")
    unit = np.array(im.coeffs / n)
    unit[0] = 0.0
    return CDNumber(m.level, unit)


def residue(f: Phrase, p: CDNumber, direction: CDNumber, rho: float, tol: float = 1e-6) -> CDNumber:
    """res(p, f)M = (2*pi)^(-1) * loop integral of f over circle(p, rho, M).

    Radius-independent (within quadrature error) whenever f has no other
    singularity in the closed disc of radius rho about p.
    """
    m = _require_unit_imaginary(direction)
    if f.level.r != p.level.r or p.level.r != m.level.r:
        raise LevelMismatchError("phrase, pole, and direction must share a level")
    res = line_integral(f, Path.circle(p, rho, m, 1.0), tol=tol * TWO_PI)
    if not res.converged:
        raise NonConvergenceError(
            "residue quadrature did not converge (singularity on or near the circle?)",
            best=res.value * (1.0 / TWO_PI),
        )
    return res.value * (1.0 / TWO_PI)


def sample_residue_functional(
    f: Phrase,
    p: CDNumber,
    probes: Sequence[CDNumber],
    rho: float,
    tol: float = 1e-6,
) -> ResidueFunctional:
    """Sample the functional M -> res(p, f)M over the given probe directions."""
    rows = tuple((m, residue(f, p, m, rho, tol)) for m in probes)
    return ResidueFunctional(center=p, sampled=rows)


# ---------------------------------------------------------------------------
# exact-kernel loop integrals
# ---------------------------------------------------------------------------

def _plane_circle(center: np.ndarray, m: np.ndarray, rho: float, ang: np.ndarray) -> np.ndarray:
    out = np.zeros(ang.shape + center.shape)
    out[..., 0] = np.cos(ang)
    out += np.sin(ang)[..., None] * m
    return center + rho * out


def _kernel_loop(
    f: Phrase,
    center: CDNumber,
    m: CDNumber,
    rho: float,
    power: int,
    tol: float,
    max_knots: int = 1 << 18,
) -> QuadratureResult:
    """Extrapolated sum of f(zeta_{j+1}) * dK_j with K the kernel primitive.

    K is the primitive of (zeta - center)^power d(zeta) along the circle
    zeta(t) = center + rho*exp(2*pi*t*M): the angle function itself scaled
    by M when power = -1, and u^(power+1)/(power+1) otherwise.  Increments
    are exact, so there is no differencing noise at any knot count.
    """
    r = f.level.r
    mv = m.coeffs
    cv = center.coeffs

    def raw(n: int) -> np.ndarray:
        ang = TWO_PI * _offset_knots(n)
        Z = _plane_circle(cv, mv, rho, ang)
        try:
            F = eval_node_arrays(f.root, Z, r)
        except SingularElementError as e:
            raise PoleError(f"integrand is singular on the contour: {e}") from e
        if power == -1:
            K = ang[:, None] * mv[None, :]
        else:
            q = power + 1
            K = (rho**q / q) * _plane_circle(np.zeros_like(cv), mv, 1.0, q * ang)
        dK = np.diff(K, axis=0)
        return mul_arrays(F[1:], dK, r).sum(axis=0)

    return _extrapolated(raw, f.level, tol, max_knots)


# ---------------------------------------------------------------------------
# Cauchy formulas
# ---------------------------------------------------------------------------

def _circle_contour(psi: Path, what: str) -> Tuple[CDNumber, float, CDNumber]:
    if psi.kind != "circle":
        raise UnsupportedShapeError(f"{what} requires a circular contour")
    if abs(psi.turns - 1.0) > 1e-12:
        raise DomainError(f"{what} requires a single positively-oriented turn")
    return psi.center, psi.radius, psi.direction


def _distance_to_circle(z: CDNumber, center: CDNumber, radius: float, m: CDNumber) -> float:
    w = z - center
    x = w.re
    im = w.imag().coeffs
    y = float(np.dot(im, m.coeffs))
    perp2 = max(float(np.dot(im, im)) - y * y, 0.0)
    return math.hypot(math.hypot(x, y) - radius, math.sqrt(perp2))


def _deformed_kernel_value(
    f: Phrase, z: CDNumber, psi: Path, power: int, tol: float, what: str
) -> CDNumber:
    center, radius, m = _circle_contour(psi, what)
    if f.level.r != z.level.r or z.level.r != psi.level.r:
        raise LevelMismatchError("phrase, point, and contour must share a level")
    if (z - center).norm() >= radius:
        raise DomainError("evaluation point must lie strictly inside the contour disc")
    dist = _distance_to_circle(z, center, radius, m)
    if dist < 10.0 * TWO_PI * radius / MAX_KNOTS:
        raise DomainError("evaluation point is too close to the contour for a reliable value")
    rho = min(0.5 * dist, 0.05 * (1.0 + z.norm()))
    full = _kernel_loop(f, z, m, rho, power, tol)
    half = _kernel_loop(f, z, m, rho / 2.0, power, tol)
    if not (full.converged and half.converged):
        raise NonConvergenceError(
            f"{what} quadrature did not converge", best=half.value * (1.0 / TWO_PI)
        )
    # the small-circle bias is even in rho; one extrapolation step removes
    # the rho^2 term
    return (half.value * 4.0 - full.value) * (1.0 / 3.0)


def cauchy_eval(f: Phrase, z: CDNumber, psi: Path, tol: float = 1e-6) -> CDNumber:
    """(2*pi)^(-1) * loop integral of f(zeta)*(zeta - z)^(-1) over psi.

    Equals f(z)*M (M the contour direction) for f holomorphic inside psi;
    at levels <= 3 right-multiplying the result by conj(M) recovers f(z).
    """
    return _deformed_kernel_value(f, z, psi, -1, tol, "cauchy_eval") * (1.0 / TWO_PI)


def cauchy_derivative(f: Phrase, z: CDNumber, k: int, psi: Path, tol: float = 1e-6) -> CDNumber:
    """k! * (2*pi)^(-1) * loop integral of f(zeta)*(zeta - z)^(-k-1) over psi.

    Like cauchy_eval, the integral is taken in its small-circle limit at
    z, which makes the value independent of the contour radius.  For
    evaluation points in the contour plane this reproduces the k-th
    derivative of f times M (e.g. 2*z0*M for f = z^2, k = 1); away from
    the plane the k >= 1 kernels are genuinely plane-sensitive and the
    limit value is the defined result.
    """
    k = int(k)
    if k < 1:
        raise DomainError("derivative order must be a positive integer")
    val = _deformed_kernel_value(f, z, psi, -k - 1, tol, "cauchy_derivative")
    return val * (math.factorial(k) / TWO_PI)


# ---------------------------------------------------------------------------
# coefficient extraction
# ---------------------------------------------------------------------------

def is_central(f: Phrase) -> bool:
    """True when every constant in the phrase is real (commutes with all planes)."""

    def walk(node: Node) -> bool:
        if isinstance(node, Const):
            return not np.any(node.value[1:])
        if isinstance(node, VarPow):
            return True
        if isinstance(node, (Add, Sub, Mul)):
            return walk(node.left) and walk(node.right)
        if isinstance(node, Neg):
            return walk(node.child)
        if isinstance(node, PowNode):
            return walk(node.base)
        if isinstance(node, LogLeaf):
            return True
        return False

    return walk(f.root)


def coefficient_mode(f: Phrase) -> str:
    """"value" when contour coefficients are plain expansion coefficients.

    That holds for central (real-coefficient) phrases at every level and
    for any phrase up to level 3, where right-multiplication by conj(M)
    inverts the functional; otherwise the returned numbers are the
    functional values c_k*M and the mode is "functional".
    """
    return "value" if (is_central(f) or f.level.r <= 3) else "functional"


def _coefficient(f: Phrase, center: CDNumber, m: CDNumber, rho: float, k: int, tol: float) -> Tuple[CDNumber, QuadratureResult]:
    res = _kernel_loop(f, center, m, rho, -k - 1, tol)
    value = res.value * (1.0 / TWO_PI)
    if coefficient_mode(f) == "value":
        value = mul(value, m.conj())
    return value, res


def taylor_coeffs(
    f: Phrase, a: CDNumber, count: int, psi: Path, tol: float = 1e-6
) -> List[CDNumber]:
    """Contour Taylor coefficients c_0 .. c_{count-1} of f about a.

    The contour must be a circle centered at a; each coefficient is the
    loop integral of f(zeta)*((zeta - a)^(-k-1)) over it, normalized by
    2*pi, with conj(M) recovery in "value" mode (see coefficient_mode).
    Matches the direct expansion for central-coefficient phrases.
    """
    center, radius, m = _circle_contour(psi, "taylor_coeffs")
    if f.level.r != a.level.r or a.level.r != psi.level.r:
        raise LevelMismatchError("phrase, center, and contour must share a level")
    if (center - a).norm() > 1e-12 * (1.0 + a.norm()):
        raise DomainError("expansion center must be the contour center")
    count = int(count)
    if count < 1:
        raise DomainError("coefficient count must be positive")
    out = []
    for k in range(count):
        value, res = _coefficient(f, a, m, radius, k, tol)
        if not res.converged:
            raise NonConvergenceError(
                f"coefficient k={k} did not converge", best=value
            )
        out.append(value)
    return out


def laurent_coeffs(
    f: Phrase,
    a: CDNumber,
    k_min: int,
    k_max: int,
    rho_inner: float,
    rho_outer: float,
    tol: float = 1e-6,
) -> List[CDNumber]:
    """Contour Laurent coefficients c_{k_min} .. c_{k_max} of f about a.

    Integration runs over the circle of radius sqrt(rho_inner*rho_outer)
    (the annulus' geometric middle) in the plane of the first imaginary
    direction.  Each coefficient is recomputed on circles toward both
    annulus edges; a singularity inside the annulus leaves the values
    radius-dependent (a pole sitting exactly on a circle converges to
    its principal value, so divergence alone is not a reliable signal)
    and raises PoleError.
    """
    k_min, k_max = int(k_min), int(k_max)
    if k_min > k_max:
        raise DomainError("k_min must not exceed k_max")
    if not (0.0 < rho_inner <= rho_outer):
        raise DomainError("annulus radii must satisfy 0 < rho_inner <= rho_outer")
    if f.level.r != a.level.r:
        raise LevelMismatchError("phrase and center must share a level")
    m = basis_element(f.level, 1)
    mid = math.sqrt(rho_inner * rho_outer)
    ratio = rho_outer / rho_inner
    # consistency circles near the annulus edges (1/8 and 7/8 up the log
    # scale) keep the undetectable zones thin
    radii = (rho_inner * ratio**0.125, mid, rho_inner * ratio**0.875)
    out = []
    for k in range(k_min, k_max + 1):
        values = []
        for rho in radii:
            value, res = _coefficient(f, a, m, rho, k, tol)
            if not res.converged:
                raise NonConvergenceError(
                    f"coefficient k={k} did not converge at radius {rho:g}", best=value
                )
            values.append(value)
        spread = max((u - v).norm() for u in values for v in values)
        if spread > 100.0 * tol * (1.0 + max(v.norm() for v in values)):
            raise PoleError(
                f"coefficient k={k} varies across the annulus (spread {spread:.3e}): "
                "a singularity lies between the annulus radii"
            )
        out.append(values[1])
    return out


# ---------------------------------------------------------------------------
# theorem checks
# ---------------------------------------------------------------------------

def _distance_to_path(p: CDNumber, psi: Path) -> float:
    if psi.kind == "circle":
        return _distance_to_circle(p, psi.center, psi.radius, psi.direction)
    Z = psi.sample(np.linspace(0.0, 1.0, 4097))
    return float(norm_arrays(Z - p.coeffs).min())


def residue_theorem_check(
    f: Phrase, poles: Sequence[CDNumber], psi: Path, tol: float = 1e-6
) -> ContourReport:
    """Compare the loop integral of f with 2*pi * sum of indexed residues.

    Each supplied pole contributes 2*pi*n*res(p, f)M, where n*M is its
    algebra-valued index with respect to psi; poles of index zero drop
    out.  The report carries both sides and their difference.
    """
    if f.level.r != psi.level.r:
        raise LevelMismatchError("phrase and contour must share a level")
    scale = 1.0 + max((p.norm() for p in poles), default=0.0)
    distances = []
    for p in poles:
        if p.level.r != f.level.r:
            raise LevelMismatchError("pole level does not match the phrase")
        dist = _distance_to_path(p, psi)
        if dist <= 1e-9 * scale:
            raise DomainError("a supplied pole lies on the contour and cannot be classified")
        distances.append(dist)
    lhs = line_integral(f, psi, tol=tol)
    rhs = zero(f.level)
    for i, p in enumerate(poles):
        dist = distances[i]
        idx = ar_index(p, psi, tol)
        strength = idx.imag().norm()
        n = int(round(strength))
        if n == 0:
            continue
        m = idx.imag() * (1.0 / strength)
        gaps = [dist] + [(p - q).norm() for j, q in enumerate(poles) if j != i]
        rho = 0.5 * min(g for g in gaps if g > 0.0)
        rhs = rhs + residue(f, p, m, rho, tol) * (TWO_PI * n)
    meta = (psi.to_json(),) if psi.kind != "parametric" else ({"kind": "parametric"},)
    return ContourReport(
        lhs=lhs.value,
        rhs=rhs,
        diff=(lhs.value - rhs).norm(),
        est_error=lhs.est_error,
        mode="value",
        paths_used=meta,
    )


def sum_residues_check(
    f: Phrase,
    poles: Sequence[CDNumber],
    direction: CDNumber,
    tol: float = 1e-6,
    far_radius: float = 1e3,
) -> float:
    """|sum of all residues of f|, the residue at infinity included.

    Finite poles are sampled on circles of half their separation; the
    residue at infinity is the reversed-orientation loop integral over a
    circle of radius ``far_radius`` about 0, normalized by 2*pi.  For a
    rational phrase integrable at infinity the total must vanish.

    The far circle lies in the plane of ``direction``; poles with
    components outside that plane push the logarithm of (z - p) through
    a direction swing of width |off-plane|/far_radius in the parameter,
    which the quadrature cannot resolve at large radii.  Choose a
    direction whose plane contains the poles (the identity itself is a
    statement about that plane).
    """
    m = _require_unit_imaginary(direction)
    total = zero(f.level)
    for i, p in enumerate(poles):
        gaps = [(p - q).norm() for j, q in enumerate(poles) if j != i]
        gaps = [g for g in gaps if g > 0.0]
        rho = 0.5 * min(gaps) if gaps else 0.5
        total = total + residue(f, p, m, rho, tol)
    far = line_integral(f, Path.circle(zero(f.level), far_radius, m, -1.0), tol=tol * TWO_PI)
    total = total + far.value * (1.0 / TWO_PI)
    return float(total.norm())


def argument_principle(
    f: Phrase,
    gamma: Path,
    zeros: Sequence[Tuple[CDNumber, int]],
    tol: float = 1e-6,
) -> ContourReport:
    """Index of f∘gamma about 0 versus the index-weighted divisor of f.

    The left side tracks the image curve t -> f(gamma(t)); the right side
    sums order * index(a, gamma) over the supplied zeros (a, order).
    """
    if f.level.r != gamma.level.r:
        raise LevelMismatchError("phrase and path must share a level")
    r = f.level.r

    def one_point(t: float) -> CDNumber:
        return CDNumber(r, eval_node_arrays(f.root, gamma.sample([t]), r)[0])

    image = Path(
        level=gamma.level,
        kind="parametric",
        sampler=one_point,
        batch_sampler=lambda ts: eval_node_arrays(f.root, gamma.sample(np.asarray(ts, dtype=np.float64)), r),
    )
    lhs = ar_index(zero(f.level), image, tol)
    rhs = zero(f.level)
    for a, order in zeros:
        if a.level.r != r:
            raise LevelMismatchError("zero level does not match the phrase")
        rhs = rhs + ar_index(a, gamma, tol) * float(int(order))
    meta = (gamma.to_json(),) if gamma.kind != "parametric" else ({"kind": "parametric"},)
    return ContourReport(
        lhs=lhs,
        rhs=rhs,
        diff=(lhs - rhs).norm(),
        est_error=0.0,
        mode="value",
        paths_used=meta,
    )


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

_RESTARTS = 16


def _coefficient_mass(node: Node) -> float:
    if isinstance(node, Const):
        return float(np.sqrt(np.dot(node.value, node.value)))
    if isinstance(node, (Add, Sub, Mul)):
        return _coefficient_mass(node.left) + _coefficient_mass(node.right)
    if isinstance(node, Neg):
        return _coefficient_mass(node.child)
    if isinstance(node, PowNode):
        return _coefficient_mass(node.base)
    return 0.0


def find_root(P: Phrase, seed: CDNumber, max_iter: int = 200, tol: float = 1e-8) -> CDNumber:
    """A root of the polynomial phrase P by damped Newton iteration.

    Works on the squared norm |P|^2 over the 2^r real coordinates; the
    Jacobian columns are directional derivatives along the basis, steps
    are backtracked until they decrease |P|^2 (Armijo), and up to 16
    deterministic random restarts are drawn from the ball of radius
    1 + sum of coefficient norms.  Raises NonConvergenceError with the
    best iterate found when every start stalls.
    """
    if P.level.r != seed.level.r:
        raise LevelMismatchError("seed level does not match the polynomial")
    r = P.level.r
    d = P.level.basis_dim
    radius = 1.0 + _coefficient_mass(P.root)
    rng = np.random.default_rng(0x5EED)
    starts = [np.array(seed.coeffs)]
    for _ in range(_RESTARTS):
        v = rng.standard_normal(d)
        v *= radius * rng.uniform(0.0, 1.0) ** (1.0 / d) / math.sqrt(float(np.dot(v, v)))
        starts.append(v)
    eye = np.eye(d)
    best_x = starts[0]
    best_g = math.inf
    for x in starts:
        x = x.copy()
        for _ in range(int(max_iter)):
            pv = eval_node_arrays(P.root, x, r)
            g = float(np.dot(pv, pv))
            if g < best_g:
                best_g, best_x = g, x.copy()
            if math.sqrt(g) <= tol:
                return CDNumber(r, x)
            rows = derivative_apply(P, x, eye)
            jac = np.asarray(rows).T
            step, *_ = np.linalg.lstsq(jac, -pv, rcond=None)
            if not np.all(np.isfinite(step)):
                break
            t = 1.0
            moved = False
            while t >= 1e-12:
                xn = x + t * step
                pn = eval_node_arrays(P.root, xn, r)
                if float(np.dot(pn, pn)) <= (1.0 - 1e-4 * t) * g:
                    x = xn
                    moved = True
                    break
                t /= 2.0
            if not moved:
                break
    raise NonConvergenceError(
        "root search exhausted its restarts", best=CDNumber(r, best_x)
    )
