"""Primal-dual hybrid gradient baseline with a uniform running average."""

import numpy as np

from .core import SolverResult, SolverState, Trace, initial_center

__all__ = ["run_chambolle_pock", "STEP_PRODUCT_TOL"]

#: Rounding allowance on ``sigma * tau * ||A||^2 <= 1``.
STEP_PRODUCT_TOL = 1e-12


def run_chambolle_pock(problem, config, callback=None):
    """Run the primal-dual hybrid gradient scheme.

    Per iteration: ``y = prox_{sigma g*}(y + sigma A xbar)``,
    ``x+ = prox_{tau f}(x - tau (A^T y + grad h(x)))``, ``xbar = 2 x+ - x``.
    Step sizes default to ``1/||A||``. The result carries ``trace`` (last
    iterate) and ``trace_average`` (uniform average of ``x^1 .. x^k``).
    """
    A, f, dual = problem.A, problem.f, problem.dual
    normA = A.norm()
    sigma, tau = config.sigma, config.tau_step
    if sigma is None or tau is None:
        if normA == 0:
            raise ValueError("default step sizes need a nonzero operator norm")
        sigma = 1.0 / normA if sigma is None else sigma
        tau = 1.0 / normA if tau is None else tau
    if sigma * tau * normA ** 2 > 1.0 + STEP_PRODUCT_TOL:
        raise ValueError(f"step sizes violate sigma*tau*||A||^2 <= 1 "
                         f"({sigma * tau * normA ** 2:.6g})")
    h = problem.h
    if h is not None and h.lipschitz > 0 and 1.0 / tau - sigma * normA ** 2 < h.lipschitz / 2.0:
        raise ValueError("step sizes too large for the smooth term: need 1/tau - sigma ||A||^2 >= L_h/2")
    x = problem.x0.copy()
    xbar = x.copy()
    y = initial_center(problem)
    xsum = np.zeros_like(x)
    trace = Trace(problem, "chambolle_pock")
    trace_avg = Trace(problem, "chambolle_pock_average")
    st = SolverState(xbar=xbar, xhat=x, xtilde=x, ytilde=y, ycenter=y, beta_s=0.0)
    xavg = x.copy()
    for k in range(config.iter_budget):
        y = dual.prox_conjugate(y + sigma * A.apply(xbar), sigma)
        v = A.adjoint_apply(y)
        if h is not None:
            v = v + h.grad(x)
        x_new = f.prox(x - tau * v, tau)
        xbar = 2.0 * x_new - x
        x = x_new
        xsum = xsum + x
        xavg = xsum / (k + 1)
        st.k = k + 1
        st.xbar, st.xhat, st.ytilde = x, xbar, y
        rec = trace.record(k + 1, x, 0.0)
        trace_avg.record(k + 1, xavg, 0.0)
        if callback is not None and callback(st, rec):
            break
    return SolverResult(x=x.copy(), trace=trace, state=st, trace_average=trace_avg,
                        x_average=xavg, algorithm="chambolle_pock")
