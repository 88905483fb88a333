"""Run diagnostics: norms, the three-way energy budget, the Chebyshev
measure bound, and assembled per-sample records.

The energy budget splits d/dt (1/2 ||theta||^2) into its three parts:

- nonlinear flux   integral(theta * u.grad(theta)) dx, zero for
  incompressible u (measured, not assumed);
- dispersive flux  A * sum_{k != 0} (k1/|k|) |theta_hat(k)|^2, zero by
  conjugate symmetry of real fields (the multiplier is odd in k);
- dissipation      -sum_k |k| |theta_hat(k)|^2 = -||Lambda^{1/2} theta||^2,
  always nonpositive.

Spectral sums use series normalization: with c(k) the unnormalized DFT,
||theta||^2 = (2*pi)^2 sum |c(k)/n^2|^2. The dissipation sum applies the
same Nyquist-zeroed |k| multiplier as the dynamics, which is identical for
any field without Nyquist content and keeps the discrete budget
self-consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField
from .grid import TWO_PI
from .integrator import SolverState
from .modulus import AuditReport, ModulusParams, audit_breakthrough, minimal_b
from .operators import advect, gradient


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sampled row of run diagnostics. ``b_min`` and ``audit`` are only
    present at the certification cadence (they cost a pair scan)."""

    t: float
    l2: float
    linf: float
    max_grad: float
    mean: float
    nonlinear_flux: float
    dispersive_flux: float
    dissipation: float
    b_min: float | None = None
    audit: AuditReport | None = None


@dataclass(frozen=True)
class SampleConfig:
    """Cadence and parameters for assembling records. ``certify_every`` in
    units of samples; 0 disables certification."""

    modulus_params: ModulusParams | None = None
    certify_every: int = 0
    with_audit: bool = False
    pair_mode: str = "exhaustive"
    pair_samples: int = 2_000_000
    pair_seed: int = 0


def norms(theta: ScalarField) -> tuple[float, float, float, float]:
    """(l2, linf, max_grad, mean) over one period cell.

    l2 uses the rectangle rule, max_grad is the grid maximum of the
    Euclidean magnitude of the spectral gradient. Grid maxima are lower
    bounds on the continuum suprema with an O(dx^2) gap for smooth fields.
    """
    vals = theta.values
    l2 = math.sqrt(float((vals * vals).sum()) * theta.grid.cell_area)
    linf = float(np.abs(vals).max())
    grad = gradient(theta)
    max_grad = float(np.hypot(grad.u1.values, grad.u2.values).max())
    mean = float(vals.mean())
    return l2, linf, max_grad, mean


def energy_budget(theta: ScalarField, A: float) -> tuple[float, float, float]:
    """(nonlinear_flux, dispersive_flux, dissipation) as defined above.

    The first two are identically zero in exact arithmetic; their measured
    values quantify discretization and rounding residue.
    """
    g = theta.grid
    nonlinear = float((theta.values * advect(theta).values).sum()) * g.cell_area

    weight = TWO_PI**2 / g.n**4
    power = np.abs(theta.hat) ** 2
    dispersive = A * weight * float((g.k1_over_k * power).sum())
    dissipation = -weight * float((g.lam * power).sum())
    return nonlinear, dispersive, dissipation


def chebyshev_check(theta: ScalarField, M: float, l2_initial: float) -> tuple[float, float, bool]:
    """Measure of {|theta| >= M/2} against the bound 4*||theta_0||^2 / M^2.

    The monotone L2 norm makes the bound valid with the initial-time norm.
    The pass flag allows an O(dx) slack of 4*pi*dx for the discrete count.
    """
    if M <= 0:
        raise ValueError("threshold M must be positive")
    g = theta.grid
    measure = float(np.count_nonzero(np.abs(theta.values) >= 0.5 * M)) * g.cell_area
    bound = 4.0 * l2_initial**2 / M**2
    ok = measure <= bound + 4.0 * math.pi * g.dx
    return measure, bound, ok


def sample(state: SolverState, cfg: SampleConfig, index: int) -> DiagnosticsRecord:
    """Assemble a record for the given sample index.

    Certification (and optionally an audit at b = b_min*(1 + 1e-3), just
    above the certificate boundary so the witness is near-saturating) runs
    only when ``index`` is a multiple of ``certify_every``.
    """
    l2, linf, max_grad, mean = norms(state.theta)
    nonlinear, dispersive, dissipation = energy_budget(state.theta, state.A)
    b_min = None
    audit = None
    certify = (
        cfg.modulus_params is not None
        and cfg.certify_every > 0
        and index % cfg.certify_every == 0
    )
    if certify:
        cert = minimal_b(
            state.theta,
            cfg.modulus_params,
            mode=cfg.pair_mode,
            samples=cfg.pair_samples,
            seed=cfg.pair_seed,
        )
        b_min = cert.b_min
        if cfg.with_audit:
            b_audit = b_min * (1.0 + 1e-3) if math.isfinite(b_min) else 0.0
            audit = audit_breakthrough(
                state.theta,
                b_audit,
                state.A,
                cfg.modulus_params,
                mode=cfg.pair_mode,
                samples=cfg.pair_samples,
                seed=cfg.pair_seed,
            )
    return DiagnosticsRecord(
        t=state.t,
        l2=l2,
        linf=linf,
        max_grad=max_grad,
        mean=mean,
        nonlinear_flux=nonlinear,
        dispersive_flux=dispersive,
        dissipation=dissipation,
        b_min=b_min,
        audit=audit,
    )
