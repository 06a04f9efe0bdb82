"""
Closed-form barrier budget and approximation bounds.

With n = |V| - r, m edges and a budget n < ell < m, the greedy selection guarantees

    lambda_min(A_ell) > F(T_hat) / (1 + F(T_hat)),
    F(T_hat) = (1 - n/T_hat) * ell / (m - (ell-1)/2 + T_hat - n) - n/T_hat,

for every T_hat > n. F is maximized on (n, inf) at

    T_hat* = (n D + sqrt(n ell E D)) / (ell - n),  D = m + (ell+1)/2 - n,  E = m - (ell-1)/2,

and the run uses T = T_hat* (1 + F(T_hat*)). The resulting 1/kappa equals the closed form
(ell-n)^2 / ((sqrt(n D) + sqrt(ell E))^2 + (ell-n)^2). Some printed versions of that
closed form carry ell (m - (ell+1)/2) under the second radical instead of ell E; that
variant does not agree with F/(1+F) and is kept only for comparison tables.
"""

import math
from numbers import Integral
from typing import NamedTuple, Optional

from ..errors import ParameterDomainError


class BarrierBudget(NamedTuple):
    T_hat_star: float
    F_at_star: float
    T: float


class BoundReport(NamedTuple):
    n: int
    m: int
    ell: int
    T_hat_star: float
    F_at_star: float
    T: float
    kappa_inv_ucs: float
    kappa_inv_ddsss: float
    ramanujan_factor: Optional[float]
    kappa_inv_approx: Optional[float]
    kappa_inv_printed: float


def _check_triple(n: int, m: int, ell: int) -> None:
    if not all(isinstance(x, Integral) and x > 0 for x in (n, m, ell)):
        raise ParameterDomainError(f"n, m, ell must be positive integers, got ({n}, {m}, {ell}).")
    if not n < ell < m:
        raise ParameterDomainError(f"Budget requires n < ell < m, got n={n}, ell={ell}, m={m}.")


def objective(T_hat: float, n: int, m: int, ell: int) -> float:
    """F(T_hat), the quantity whose maximizer fixes the barrier budget."""
    return (1 - n / T_hat) * ell / (m - (ell - 1) / 2 + T_hat - n) - n / T_hat


def optimal_T_hat(n: int, m: int, ell: int) -> float:
    _check_triple(n, m, ell)
    D = m + (ell + 1) / 2 - n
    E = m - (ell - 1) / 2
    return (n * D + math.sqrt(n * ell * E * D)) / (ell - n)


def choose_T(n: int, m: int, ell: int) -> BarrierBudget:
    """Returns (T_hat*, F(T_hat*), T = T_hat* (1 + F(T_hat*)))."""
    T_hat_star = optimal_T_hat(n, m, ell)
    F_star = objective(T_hat_star, n, m, ell)
    return BarrierBudget(T_hat_star=T_hat_star, F_at_star=F_star, T=T_hat_star * (1 + F_star))


def kappa_lower_bound(n: int, m: int, ell: int) -> float:
    """1/kappa = F(T_hat*) / (1 + F(T_hat*))."""
    F_star = choose_T(n, m, ell).F_at_star
    return F_star / (1 + F_star)


def kappa_closed_form(n: int, m: int, ell: int) -> float:
    """Independent closed-form evaluation of kappa_lower_bound."""
    _check_triple(n, m, ell)
    D = m + (ell + 1) / 2 - n
    E = m - (ell - 1) / 2
    gap = (ell - n) ** 2
    return gap / ((math.sqrt(n * D) + math.sqrt(ell * E)) ** 2 + gap)


def kappa_closed_form_as_printed(n: int, m: int, ell: int) -> float:
    """The closed form with ell (m - (ell+1)/2) under the second radical; comparison only."""
    _check_triple(n, m, ell)
    D = m + (ell + 1) / 2 - n
    gap = (ell - n) ** 2
    return gap / ((math.sqrt(n * D) + math.sqrt(ell * (m - (ell + 1) / 2))) ** 2 + gap)


def ddsss_bound(n: int, m: int, ell: int) -> float:
    """
    1/kappa of the dual-set column selection bound,
    (sqrt(ell) - sqrt(n))^2 / ((sqrt(ell) + sqrt(m - n))^2 + (sqrt(ell) - sqrt(n))^2).

    Defined for n <= ell <= m; it vanishes at ell = n.
    """
    if not all(isinstance(x, Integral) and x > 0 for x in (n, m, ell)):
        raise ParameterDomainError(f"n, m, ell must be positive integers, got ({n}, {m}, {ell}).")
    if not n <= ell <= m:
        raise ParameterDomainError(f"Dual-set bound requires n <= ell <= m, got n={n}, ell={ell}, m={m}.")
    gap = (math.sqrt(ell) - math.sqrt(n)) ** 2
    return gap / ((math.sqrt(ell) + math.sqrt(m - n)) ** 2 + gap)


def ramanujan_degree(n: int, ell: int) -> Optional[float]:
    """d from ell = ceil(d (n - 1)), inverted as the real d = ell / (n - 1)."""
    return ell / (n - 1) if n > 1 else None


def ramanujan_factor(n: int, ell: int) -> Optional[float]:
    """((sqrt(d) + 1) / (sqrt(d) - 1))^2, the weighted-sparsifier approximation factor; None if d <= 1."""
    d = ramanujan_degree(n, ell)
    if d is None or d <= 1:
        return None
    return ((math.sqrt(d) + 1) / (math.sqrt(d) - 1)) ** 2


def kappa_approximation(n: int, m: int, ell: int) -> Optional[float]:
    """(sqrt(d) - 1)^2 / (m/n + d/2 + (sqrt(d) - 1)^2), the large-graph reading of 1/kappa."""
    d = ramanujan_degree(n, ell)
    if d is None:
        return None
    gap = (math.sqrt(d) - 1) ** 2
    return gap / (m / n + d / 2 + gap)


def bound_report(n: int, m: int, ell: int) -> BoundReport:
    budget = choose_T(n, m, ell)
    return BoundReport(
        n=n,
        m=m,
        ell=ell,
        T_hat_star=budget.T_hat_star,
        F_at_star=budget.F_at_star,
        T=budget.T,
        kappa_inv_ucs=budget.F_at_star / (1 + budget.F_at_star),
        kappa_inv_ddsss=ddsss_bound(n, m, ell),
        ramanujan_factor=ramanujan_factor(n, ell),
        kappa_inv_approx=kappa_approximation(n, m, ell),
        kappa_inv_printed=kappa_closed_form_as_printed(n, m, ell),
    )
