"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the vectorized/superoperator route:
the master equation is integrated directly in matrix form with classic
fourth-order Runge-Kutta, so agreement with the production propagator is
a genuine two-sided check.
"""
import numpy as np


def lindblad_rhs(rho, h, lindblad_ops, rates):
    """Right-hand side of the master equation, evaluated element-wise."""
    out = -1j * (h @ rho - rho @ h)
    for op, gamma in zip(lindblad_ops, rates):
        ld = op.conj().T
        ldl = ld @ op
        out = out + 0.5 * gamma * (2.0 * op @ rho @ ld - ldl @ rho - rho @ ldl)
    return out


def rk4_propagate(rho0, hamiltonians, control_samples, horizon, channel,
                  substeps=20):
    """Integrate the master equation with RK4 under piecewise-constant controls.

    ``control_samples`` has shape (n_controls, n_steps); each interval
    is subdivided into ``substeps`` RK4 steps.
    """
    rho = rho0.astype(complex)
    n_steps = control_samples.shape[1]
    dt = horizon / n_steps
    h_sub = dt / substeps
    for n in range(n_steps):
        h = sum(control_samples[k, n] * hamiltonians[k]
                for k in range(len(hamiltonians)))
        for _ in range(substeps):
            k1 = lindblad_rhs(rho, h, channel.lindblad_ops, channel.rates)
            k2 = lindblad_rhs(rho + 0.5 * h_sub * k1, h, channel.lindblad_ops, channel.rates)
            k3 = lindblad_rhs(rho + 0.5 * h_sub * k2, h, channel.lindblad_ops, channel.rates)
            k4 = lindblad_rhs(rho + h_sub * k3, h, channel.lindblad_ops, channel.rates)
            rho = rho + (h_sub / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho
