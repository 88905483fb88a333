"""Moduli of continuity and certificate machinery.

The modulus family is the piecewise-defined concave function

    omega(xi) = xi - xi^{3/2}                             for 0 <= xi <= delta,
    omega'(xi) = gamma / (xi * (4 + log(xi/delta)))       for xi > delta,

integrated in closed form on the outer branch:

    omega(xi) = delta - delta^{3/2}
                + gamma * log((4 + log(xi/delta)) / 4)    for xi > delta,

together with its rescalings omega_B(xi) = omega(B*xi). A field "has"
omega_B when |theta(y) - theta(z)| <= omega_B(d(y, z)) for every pair of
points, with d the torus metric (wrapped coordinate differences). The
smallest such B is the certificate this module computes.

The induced modulus for the Riesz-transform velocity is

    Omega(xi) = C * ( int_0^xi omega(eta)/eta deta
                      + xi * int_xi^inf omega(eta)/eta^2 deta ),

with Omega_B(xi) = Omega(B*xi) by a change of variables. The constant C is
not pinned down by theory at this level of generality; it is exposed as
``c_omega`` (default 1) with a calibration helper, and audits report
measured/bound ratios rather than asserting them.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .fields import ScalarField
from .operators import riesz_transform

# Exhaustive pair scans are O(n^4); above this resolution callers must use
# seeded sampling.
EXHAUSTIVE_LIMIT = 96

_CHECK_TOL = 1e-12
_LOG_XI_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True)
class ModulusParams:
    """Constants (gamma, delta) of the modulus family plus the velocity
    modulus constant c_omega.

    Constraints: 0 < gamma < delta <= 0.4 keeps the inner branch strictly
    increasing, and gamma < 4*delta*(1 - 1.5*sqrt(delta)) makes the left
    derivative at delta exceed the right one, so omega is concave with a
    genuine corner at delta.
    """

    gamma: float = 0.01
    delta: float = 0.02
    c_omega: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.gamma < self.delta:
            raise ValueError("need 0 < gamma < delta")
        if self.delta > 0.4:
            raise ValueError("delta must not exceed 0.4")
        left = 1.0 - 1.5 * math.sqrt(self.delta)
        right = self.gamma / (4.0 * self.delta)
        if right >= left:
            raise ValueError(
                "derivative jump violated: need gamma/(4*delta) < 1 - 1.5*sqrt(delta)"
            )
        if self.c_omega <= 0:
            raise ValueError("c_omega must be positive")


@dataclass(frozen=True)
class PairWitness:
    """Grid-point pair with the smallest modulus slack.

    ``y`` and ``z`` are (i, j) grid indices, ``xi`` their torus separation,
    ``jump`` the increment |theta(y) - theta(z)|, and ``slack`` the margin
    omega_B(xi) - jump (negative when the modulus is violated).
    """

    y: tuple[int, int]
    z: tuple[int, int]
    xi: float
    jump: float
    slack: float


@dataclass(frozen=True)
class ModulusCertificate:
    """Smallest scaling b_min for which the field has omega_B, with the
    witness pair that pins it down. ``witness`` is None for constant
    fields (b_min = 0)."""

    b_min: float
    witness: PairWitness | None
    slack: float


@dataclass(frozen=True)
class AuditReport:
    """Numerical snapshot of the breakthrough inequalities at the tightest
    pair. ``lhs_breakthrough`` is max over pairs of theta(y) - theta(z)
    - omega_B(|y-z|); ``derivative_bound`` is (-omega_B'(xi) + A) * Omega_B(xi);
    the dispersive entries compare the measured increment of A*u2 against
    its bound A*Omega_B(xi). ``saturation`` is jump/omega_B(xi) at the
    witness."""

    xi: float
    lhs_breakthrough: float
    derivative_bound: float
    disp_measured: float
    disp_bound: float
    disp_ratio: float
    saturation: float


def _validate_separations(xi) -> np.ndarray:
    arr = np.asarray(xi, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("separation must be nonnegative")
    return arr


def modulus(xi, p: ModulusParams):
    """Evaluate omega(xi). Accepts scalars or arrays."""
    arr = _validate_separations(xi)
    d, g = p.delta, p.gamma
    inner = np.minimum(arr, d)
    outer = np.maximum(arr, d)
    head = inner - inner**1.5
    tail = (d - d**1.5) + g * np.log1p(np.log(outer / d) / 4.0)
    out = np.where(arr <= d, head, tail)
    return out if arr.ndim else float(out)


def modulus_slope(xi, p: ModulusParams):
    """Evaluate omega'(xi); at xi = delta this is the left derivative
    1 - 1.5*sqrt(delta). Accepts scalars or arrays."""
    arr = _validate_separations(xi)
    d, g = p.delta, p.gamma
    inner = np.minimum(arr, d)
    outer = np.maximum(arr, d)
    head = 1.0 - 1.5 * np.sqrt(inner)
    tail = g / (outer * (4.0 + np.log(outer / d)))
    out = np.where(arr <= d, head, tail)
    return out if arr.ndim else float(out)


def modulus_inverse(v: float, p: ModulusParams) -> float:
    """Unique xi with omega(xi) = v, by branch-wise bisection to relative
    tolerance 1e-12.

    omega grows doubly logarithmically on the outer branch, so the inverse
    overflows float64 for moderate v (about 0.069 at the default
    parameters); +inf is returned in that case.
    """
    if v < 0:
        raise ValueError("modulus values are nonnegative")
    if v == 0.0:
        return 0.0
    d, g = p.delta, p.gamma
    at_delta = d - d**1.5
    if v <= at_delta:
        lo, hi = 0.0, d
        while hi - lo > 1e-12 * hi:
            mid = 0.5 * (lo + hi)
            if mid - mid**1.5 < v:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    # Outer branch: solve gamma*log1p(s/4) = v - omega(delta) for
    # s = log(xi/delta).
    target = (v - at_delta) / g
    s_cap = _LOG_XI_MAX - math.log(d)  # beyond this xi = delta*e^s overflows
    if math.log1p(s_cap / 4.0) < target:
        return math.inf
    s_hi = 8.0
    while math.log1p(s_hi / 4.0) < target:
        s_hi = min(2.0 * s_hi, s_cap)
    s_lo = 0.0
    while s_hi - s_lo > 1e-12 * max(1.0, s_hi):
        mid = 0.5 * (s_lo + s_hi)
        if math.log1p(mid / 4.0) < target:
            s_lo = mid
        else:
            s_hi = mid
    return d * math.exp(0.5 * (s_lo + s_hi))


def scaled_modulus(xi, b: float, p: ModulusParams):
    """omega_B(xi) = omega(b*xi); b = 0 gives the zero function."""
    if b < 0:
        raise ValueError("modulus scaling must be nonnegative")
    arr = _validate_separations(xi)
    if b == 0.0:
        out = np.zeros_like(arr)
        return out if arr.ndim else 0.0
    return modulus(b * arr, p)


def scaled_modulus_slope(xi, b: float, p: ModulusParams):
    """omega_B'(xi) = b * omega'(b*xi)."""
    if b < 0:
        raise ValueError("modulus scaling must be nonnegative")
    arr = _validate_separations(xi)
    if b == 0.0:
        out = np.zeros_like(arr)
        return out if arr.ndim else 0.0
    return b * modulus_slope(b * arr, p)


def velocity_modulus(xi: float, p: ModulusParams) -> float:
    """Modulus of continuity inherited by the Riesz velocity,

        Omega(xi) = c_omega * (I1 + I2),
        I1 = int_0^xi omega(eta)/eta deta,
        I2 = xi * int_xi^inf omega(eta)/eta^2 deta.

    I1 uses the closed form xi - (2/3)*xi^{3/2} on the inner branch and
    adaptive quadrature beyond delta. I2 is mapped to the unit interval by
    eta = xi/t, giving int_0^1 omega(xi/t) dt, whose log-log growth at
    t -> 0 is integrable; quadrature is anchored with breakpoints near 0.
    Callers obtain Omega_B via the scaling identity Omega_B(xi) =
    Omega(B*xi).
    """
    x = float(_validate_separations(xi))
    if x == 0.0:
        return 0.0
    d = p.delta
    if x <= d:
        near = x - (2.0 / 3.0) * x**1.5
    else:
        head = d - (2.0 / 3.0) * d**1.5
        tail, _ = quad(lambda eta: modulus(eta, p) / eta, d, x,
                       epsabs=1e-10, epsrel=1e-10, limit=400)
        near = head + tail

    breakpoints = [1e-8, 1e-4, 1e-2]
    if x < d:
        breakpoints.append(x / d)  # branch switch of omega(x/t) at t = x/delta
    far, _ = quad(lambda t: modulus(x / t, p), 0.0, 1.0,
                  epsabs=1e-9, epsrel=1e-9, limit=400,
                  points=sorted(breakpoints))
    return p.c_omega * (near + far)


def breakthrough_b(a: float, d_bound: float, p: ModulusParams) -> float:
    """Scaling threshold A / omega'(omega^{-1}(2*D)) above which the
    breakthrough derivative is strictly negative for any field bounded by
    D in sup norm. Returns +inf when omega^{-1}(2*D) overflows (see
    :func:`modulus_inverse`)."""
    if a < 0:
        raise ValueError("amplitude must be nonnegative")
    if d_bound <= 0:
        raise ValueError("sup-norm bound must be positive")
    if a == 0.0:
        return 0.0
    xi = modulus_inverse(2.0 * d_bound, p)
    if math.isinf(xi):
        return math.inf
    return a / modulus_slope(xi, p)


# ---------------------------------------------------------------------------
# Pair scans


class _ExhaustiveScan:
    """Max increment per wrapped displacement class, computed with rolls.

    Classes (di, dj) and (n-di, n-dj) contain the same unordered pairs, so
    only half the classes are scanned and the table is mirrored.
    """

    def __init__(self, theta: ScalarField):
        vals = theta.values
        n = theta.grid.n
        dx = theta.grid.dx
        off = np.minimum(np.arange(n), n - np.arange(n)) * dx
        xi_table = np.hypot(off[:, None], off[None, :])
        jump_table = np.zeros((n, n))
        for di in range(n // 2 + 1):
            rolled = np.roll(vals, di, axis=0)
            dj_range = range(n) if 0 < di < n - di else range(n // 2 + 1)
            for dj in dj_range:
                if di == 0 and dj == 0:
                    continue
                jump = float(np.abs(vals - np.roll(rolled, dj, axis=1)).max())
                jump_table[di, dj] = jump
                jump_table[(n - di) % n, (n - dj) % n] = jump
        self._n = n
        self._values = vals
        # Flat views skip the degenerate (0, 0) class at flat index 0.
        self.xi = xi_table.ravel()[1:]
        self.jump = jump_table.ravel()[1:]

    def witness(self, idx: int) -> tuple[tuple[int, int], tuple[int, int]]:
        n = self._n
        flat = idx + 1
        di, dj = divmod(flat, n)
        shifted = np.roll(np.roll(self._values, di, axis=0), dj, axis=1)
        at = int(np.argmax(np.abs(self._values - shifted)))
        iy, jy = divmod(at, n)
        return (iy, jy), ((iy - di) % n, (jy - dj) % n)


class _SampledScan:
    """Seeded uniform sample of point pairs for grids too large to scan."""

    def __init__(self, theta: ScalarField, samples: int, seed: int):
        n = theta.grid.n
        dx = theta.grid.dx
        rng = np.random.default_rng(seed)
        y = rng.integers(0, n * n, size=samples)
        z = rng.integers(0, n * n, size=samples)
        distinct = y != z
        y, z = y[distinct], z[distinct]
        flat = theta.values.ravel()
        self.jump = np.abs(flat[y] - flat[z])
        d1 = np.abs(y // n - z // n)
        d2 = np.abs(y % n - z % n)
        d1 = np.minimum(d1, n - d1) * dx
        d2 = np.minimum(d2, n - d2) * dx
        self.xi = np.hypot(d1, d2)
        self._y = y
        self._z = z
        self._n = n

    def witness(self, idx: int) -> tuple[tuple[int, int], tuple[int, int]]:
        n = self._n
        return tuple(divmod(int(self._y[idx]), n)), tuple(divmod(int(self._z[idx]), n))


def _pair_scan(theta: ScalarField, mode: str, samples: int, seed: int):
    if mode == "exhaustive":
        if theta.grid.n > EXHAUSTIVE_LIMIT:
            raise ValueError(
                f"exhaustive pair scan refused for n > {EXHAUSTIVE_LIMIT} "
                "(O(n^4) cost); use mode='sampled'"
            )
        return _ExhaustiveScan(theta)
    if mode == "sampled":
        if samples < 1:
            raise ValueError("sample count must be positive")
        return _SampledScan(theta, samples, seed)
    raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")


def _worst_pair(scan, b: float, p: ModulusParams) -> PairWitness:
    slack = scaled_modulus(scan.xi, b, p) - scan.jump
    idx = int(np.argmin(slack))
    y, z = scan.witness(idx)
    return PairWitness(y=y, z=z, xi=float(scan.xi[idx]),
                       jump=float(scan.jump[idx]), slack=float(slack[idx]))


def check_modulus(
    theta: ScalarField,
    b: float,
    p: ModulusParams,
    *,
    mode: str = "exhaustive",
    samples: int = 2_000_000,
    seed: int = 0,
) -> tuple[bool, PairWitness]:
    """Does theta have the modulus omega_B?

    Scans all unordered grid-point pairs (or a seeded sample) under the
    torus metric and reports the pair with the least slack. Passing is
    monotone in b because omega is increasing.
    """
    if b < 0:
        raise ValueError("modulus scaling must be nonnegative")
    scan = _pair_scan(theta, mode, samples, seed)
    worst = _worst_pair(scan, b, p)
    return worst.slack >= -_CHECK_TOL, worst


def minimal_b(
    theta: ScalarField,
    p: ModulusParams,
    *,
    mode: str = "exhaustive",
    samples: int = 2_000_000,
    seed: int = 0,
    rel_tol: float = 1e-6,
) -> ModulusCertificate:
    """Smallest scaling for which theta has omega_B, by bisection.

    The upper bracket is doubled from 1 until the check passes; the
    returned value is the passing end of a bracket of relative width
    ``rel_tol``. Constant fields certify at b_min = 0. Returns b_min =
    +inf when no representable scaling passes (oscillation beyond the
    float64 range of omega, about 0.069 at default parameters).
    """
    scan = _pair_scan(theta, mode, samples, seed)

    def passes(b: float) -> bool:
        slack = scaled_modulus(scan.xi, b, p) - scan.jump
        return bool(slack.min() >= -_CHECK_TOL)

    if float(scan.jump.max()) <= _CHECK_TOL:
        return ModulusCertificate(b_min=0.0, witness=None, slack=0.0)

    hi = 1.0
    while not passes(hi):
        hi *= 2.0
        if hi > 1e280:
            return ModulusCertificate(b_min=math.inf,
                                      witness=_worst_pair(scan, hi, p),
                                      slack=-math.inf)
    lo = 0.5 * hi if hi > 1.0 else 0.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    worst = _worst_pair(scan, hi, p)
    return ModulusCertificate(b_min=hi, witness=worst, slack=worst.slack)


def audit_breakthrough(
    theta: ScalarField,
    b: float,
    a: float,
    p: ModulusParams,
    *,
    mode: str = "exhaustive",
    samples: int = 2_000_000,
    seed: int = 0,
) -> AuditReport:
    """Measure the breakthrough-scenario quantities at the tightest pair.

    This is a report, not an assertion: c_omega is calibrated, so the
    dispersive bound is checked as a ratio. The advective and dissipative
    increments of the breakthrough derivative need the saturating-pair
    structure or singular-integral representations and are not measured
    here.
    """
    if b < 0:
        raise ValueError("modulus scaling must be nonnegative")
    scan = _pair_scan(theta, mode, samples, seed)
    worst = _worst_pair(scan, b, p)
    xi = worst.xi

    omega_at = scaled_modulus(xi, b, p)
    slope_at = scaled_modulus_slope(xi, b, p)
    big = velocity_modulus(b * xi, p)
    rhs = (-slope_at + a) * big

    u2 = riesz_transform(theta, 1).values
    du2 = abs(float(u2[worst.y]) - float(u2[worst.z]))
    disp_measured = a * du2
    disp_bound = a * big
    disp_ratio = du2 / big if big > 0 else 0.0
    saturation = worst.jump / omega_at if omega_at > 0 else 0.0

    return AuditReport(
        xi=xi,
        lhs_breakthrough=-worst.slack,
        derivative_bound=float(rhs),
        disp_measured=disp_measured,
        disp_bound=disp_bound,
        disp_ratio=disp_ratio,
        saturation=saturation,
    )


def calibrate_c_omega(
    thetas,
    p: ModulusParams,
    *,
    b_margin: float = 1e-3,
    mode: str = "exhaustive",
    samples: int = 2_000_000,
    seed: int = 0,
) -> float:
    """Smallest constant making the velocity-modulus bound hold on a corpus.

    For each field the certificate b_min is computed, the velocity
    component u2 = R_1(theta) is scanned over all pairs, and the largest
    ratio of velocity increment to Omega_B(xi) with c_omega = 1 is
    recorded. The returned maximum is the corpus-calibrated c_omega;
    audits of comparable fields should then report disp_ratio <= 1 up to
    sampling fluctuation.
    """
    reference = replace(p, c_omega=1.0)
    worst = 0.0
    for theta in thetas:
        cert = minimal_b(theta, reference, mode=mode, samples=samples, seed=seed)
        if cert.b_min == 0.0 or math.isinf(cert.b_min):
            continue
        b = cert.b_min * (1.0 + b_margin)
        u2 = riesz_transform(theta, 1)
        scan = _pair_scan(u2, mode, samples, seed)
        targets = b * scan.xi
        unique, inverse = np.unique(targets, return_inverse=True)
        bounds = np.array([velocity_modulus(t, reference) for t in unique])[inverse]
        ratio = float((scan.jump / bounds).max())
        worst = max(worst, ratio)
    return worst
