"""Smoothed primal-dual gap-reduction solvers: single loop and double loop."""

import numpy as np

from .core import Boundary, SolverResult, SolverState, Trace, f_plus_h, initial_center
from .schedules import next_inner_length, schedule_constrained, solve_tau_cubic

__all__ = [
    "run_asgard", "run_asgard_restart_heuristic", "run_asgard_dl", "run_asgard_dl_three_term",
]


def _prox_step(f, x, v, gamma):
    """``prox_{gamma f}(x - gamma v)``; an infinite step is allowed only when ``v = 0``."""
    if np.isinf(gamma):
        if np.any(v):
            raise ValueError("zero operator with a nonzero linear term: the step is unbounded")
        return f.prox(x, gamma)
    return f.prox(x - gamma * v, gamma)


def _smooth_lipschitz(problem, use_h):
    if not use_h:
        return 0.0
    if problem.h is None:
        raise ValueError("the three-term solver needs a smooth term h")
    L_h = getattr(problem.h, "lipschitz", None)
    if L_h is None or not L_h >= 0:
        raise ValueError("the smooth term must carry a Lipschitz constant L_h >= 0")
    return float(L_h)


def _direction(problem, ytilde, xtilde, use_h):
    v = problem.A.adjoint_apply(ytilde)
    if use_h:
        v = v + problem.h.grad(xtilde)
    return v


def _step(beta, L_eff, scale=1.0):
    denom = L_eff * scale
    return np.inf if denom == 0 else beta / denom


# ------------------------------------------------------------------ single loop

def _run_single_loop(problem, config, restart_every, callback, label):
    config.resolve_mode(problem)
    use_h = problem.h is not None
    L_h = _smooth_lipschitz(problem, use_h)
    A, f, dual = problem.A, problem.f, problem.dual
    normA2 = A.norm() ** 2
    L_b = config.L_b
    x0 = problem.x0
    y0 = initial_center(problem)
    st = SolverState(xbar=x0.copy(), xhat=x0.copy(), xtilde=x0.copy(), ytilde=y0.copy(),
                     ycenter=y0, beta_s=float(config.beta0), tau_k=1.0)
    trace = Trace(problem, label)
    for k in range(config.iter_budget):
        if restart_every is not None and k > 0 and k % restart_every == 0:
            st.xhat = st.xbar.copy()
            st.tau_k = 1.0
            st.beta_s = float(config.beta0)
            st.s += 1
            st.K_s = k
        tau, beta = st.tau_k, st.beta_s
        xtilde = st.xbar + tau * (st.xhat - st.xbar)
        ytilde = dual.maximizer(A.apply(xtilde), beta, st.ycenter)
        v = _direction(problem, ytilde, xtilde, use_h)
        xbar_new = _prox_step(f, xtilde, v, _step(beta, normA2 + beta * L_h))
        st.xhat = st.xhat + (xbar_new - xtilde) / tau
        st.xbar, st.xtilde, st.ytilde = xbar_new, xtilde, ytilde
        st.k = k + 1
        rec = None
        if st.k % config.trace_every == 0 or st.k == config.iter_budget:
            rec = trace.record(st.k, xbar_new, beta)
        if callback is not None and callback(st, rec):
            break
        st.tau_k = solve_tau_cubic(tau, L_b)
        st.beta_s = beta / (1.0 + st.tau_k / L_b)
    return SolverResult(x=st.xbar.copy(), trace=trace, state=st, algorithm=label)


def run_asgard(problem, config, callback=None):
    """Single-loop method with the cubic momentum rule and continuous ``beta`` decrease.

    Runs ``config.iter_budget`` iterations and returns the last iterate.
    ``callback(state, record)`` is called after every iteration (``record`` is
    ``None`` on iterations that are not traced); a truthy return value stops
    the run.
    A smooth term ``h`` on the problem is handled through its gradient with
    step ``beta / (||A||^2 + beta L_h)``.
    """
    return _run_single_loop(problem, config, None, callback, "asgard")


def run_asgard_restart_heuristic(problem, config, restart_every, callback=None):
    """Single-loop method whose ``xhat``, ``tau`` and ``beta`` are reset every `restart_every` steps."""
    if int(restart_every) != restart_every or restart_every < 1:
        raise ValueError("restart_every must be a positive integer")
    return _run_single_loop(problem, config, int(restart_every), callback, "asgard_restart")


# ------------------------------------------------------------------ double loop

def _run_double_loop(problem, config, use_h, callback, label):
    mode = config.resolve_mode(problem)
    L_h = _smooth_lipschitz(problem, use_h)
    A, f, dual = problem.A, problem.f, problem.dual
    normA2 = A.norm() ** 2
    variant = config.inner_variant
    beta0, omega = float(config.beta0), config.omega
    x0 = problem.x0
    y0 = initial_center(problem)
    st = SolverState(xbar=x0.copy(), xhat=x0.copy(), xtilde=x0.copy(), ytilde=y0.copy(),
                     ycenter=y0, beta_s=beta0, m_s=config.m0, tau_k=1.0)
    trace = Trace(problem, label)
    boundaries = []
    x_last = x0.copy()
    budget = config.iter_budget
    beta, m = beta0, config.m0
    while st.k < budget and (config.max_outer is None or st.s < config.max_outer):
        if mode == "bounded_dual":
            beta = beta0 / omega ** st.s
        st.beta_s, st.m_s = beta, m
        L_eff = normA2 + beta * L_h
        xbar, xhat = st.xbar, st.xhat
        xtilde = xhat.copy()
        completed = True
        for j in range(m):
            if st.k >= budget:
                completed = False
                break
            tau = 2.0 / (j + 2)
            st.tau_k = tau
            if variant != "fista":
                xtilde = xbar + tau * (xhat - xbar)
            ytilde = dual.maximizer(A.apply(xtilde), beta, st.ycenter)
            v = _direction(problem, ytilde, xtilde, use_h)
            if variant == "fista":
                xbar_new = _prox_step(f, xtilde, v, _step(beta, L_eff))
                xhat = xhat + (xbar_new - xtilde) / tau
                tau_next = 2.0 / (j + 3)
                xtilde_next = xbar_new + ((1.0 - tau) * tau_next / tau) * (xbar_new - xbar)
            else:
                xhat_new = _prox_step(f, xhat, v, _step(beta, L_eff, tau))
                if variant == "apg_averaging":
                    xbar_new = xtilde + tau * (xhat_new - xhat)
                else:
                    xbar_new = _prox_step(f, xtilde, v, _step(beta, L_eff))
                xhat = xhat_new
            st.xtilde, st.ytilde = xtilde, ytilde
            xbar = xbar_new
            st.xbar, st.xhat = xbar, xhat
            st.k += 1
            rec = None
            if st.k % config.trace_every == 0 or st.k == budget or (
                    j == m - 1 and config.max_outer is not None and st.s == config.max_outer - 1):
                rec = trace.record(st.k, xbar, beta)
            if callback is not None and callback(st, rec):
                completed = False
                break
            if variant == "fista":
                xtilde = xtilde_next
        x_last = xbar
        if not completed:
            break
        K_next = st.K_s + m
        Ax = A.apply(xbar)
        boundaries.append(Boundary(
            s=st.s, K=K_next, beta=beta, m=m, xbar=xbar.copy(), ycenter=st.ycenter.copy(),
            objective=problem.objective(xbar, Ax), f_value=f_plus_h(problem, xbar),
            feasibility=problem.feasibility(xbar, Ax)))
        st.ycenter = dual.maximizer(Ax, beta, st.ycenter)
        st.xbar = xhat.copy()
        st.tau_k = 1.0
        st.s += 1
        st.K_s = K_next
        if mode == "bounded_dual":
            m = next_inner_length(m, omega)
        else:
            beta, m = schedule_constrained(beta, m, omega)
    return SolverResult(x=np.array(x_last, copy=True), trace=trace, state=st,
                        boundaries=boundaries, algorithm=label)


def run_asgard_dl(problem, config, callback=None):
    """Self-adaptive double-loop method.

    Each outer round ``s`` runs ``m_s`` accelerated steps on the smoothed
    problem with fixed ``(beta_s, ycenter^s)`` and ``tau = 2/(j+2)``, then
    restarts the momentum, moves the dual center to the smoothed maximizer
    at the round's last iterate and updates ``(beta, m)`` by the schedule of
    the mode. If the problem has a smooth term ``h`` it is handled as in
    :func:`run_asgard_dl_three_term`.

    The returned ``x`` is the last inner iterate; ``boundaries`` holds a
    snapshot at the end of every completed round.
    """
    use_h = problem.h is not None
    return _run_double_loop(problem, config, use_h, callback, "asgard_dl")


def run_asgard_dl_three_term(problem, config, callback=None):
    """Double-loop method for ``f + g(A.) + h`` with ``h`` smooth.

    The momentum-side step becomes ``beta / (tau (||A||^2 + beta L_h))``
    and ``grad h(xtilde)`` joins ``A^T ytilde`` in the linear term.
    """
    return _run_double_loop(problem, config, True, callback, "asgard_dl_three_term")
