"""Closed-form growth bounds, the constants behind them, and the numeric
checks supporting the asymptotic argument (base case, inductive step, and
the optimality analysis of the leading coefficient).

Log scale everywhere: a returned value v bounds ln of the growth factor,
so the growth bound itself is e^v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

SQRT2 = math.sqrt(2.0)
BETA = 0.41


def alpha_constant() -> float:
    """1/(2(2+(2-sqrt(2))ln 2)), the ln^2 n coefficient of theorem1_bound."""
    return 1.0 / (2.0 * (2.0 + (2.0 - SQRT2) * math.log(2.0)))


def wilkinson_bound_closed_form(n: int):
    """(exact sum, simplified value): the first is
    (1/2)(ln n + sum_{k=2..n} ln k/(k-1)) on log scale, the second the
    weaker explicit form 2 sqrt(n) n^{ln(n)/4}."""
    if n < 1:
        raise ValueError("n >= 1 required")
    s = sum(math.log(k) / (k - 1) for k in range(2, n + 1))
    exact = 0.5 * (math.log(n) + s)
    simplified = 2.0 * math.sqrt(n) * n ** (0.25 * math.log(n))
    return exact, simplified


def theorem1_bound(n: int) -> float:
    """alpha ln^2 n + 0.91 ln n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    ln = math.log(n)
    return alpha_constant() * ln * ln + 0.91 * ln


def gamma_of_t(t: float) -> float:
    """Decay coefficient forced by a constraint family at aspect t = l/k."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    return 1.0 / (4.0 * (1.0 + (1.0 - t) * math.log1p(t)))


def lambert_w(x: float, tol: float = 1e-14) -> float:
    """Principal branch by Newton iteration from a log-based guess."""
    if x <= 0:
        raise ValueError("positive argument required")
    w = math.log(x) if x > math.e else x / math.e
    for _ in range(200):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol * abs(x):
            return w
        w -= f / (ew * (1.0 + w))
    raise ArithmeticError("Lambert W iteration did not converge")


def optimal_t():
    """(t*, gamma(t*)): the minimizer of gamma_of_t on [0, 1],
    t* = exp(W(2e) - 1) - 1."""
    w = lambert_w(2.0 * math.e)
    t_star = math.exp(w - 1.0) - 1.0
    return t_star, gamma_of_t(t_star)


@dataclass(frozen=True)
class ConstantsTable:
    alpha: float
    beta: float
    gamma_star: float
    t_star: float
    wilkinson_exponent: float

    def as_dict(self) -> dict:
        return {
            "alpha": {
                "value": self.alpha,
                "formula": "1/(2(2+(2-sqrt(2))ln 2))",
            },
            "beta": {"value": self.beta, "formula": "0.41 (ln n coefficient is beta + 1/2)"},
            "gamma_star": {
                "value": self.gamma_star,
                "formula": "min over t in [0,1] of 1/(4(1+(1-t)ln(1+t)))",
            },
            "t_star": {"value": self.t_star, "formula": "exp(W(2e) - 1) - 1"},
            "wilkinson_exponent": {
                "value": self.wilkinson_exponent,
                "formula": "classical ln^2 n coefficient 1/4",
            },
        }


def constants_table() -> ConstantsTable:
    t_star, gamma_star = optimal_t()
    return ConstantsTable(
        alpha=alpha_constant(),
        beta=BETA,
        gamma_star=gamma_star,
        t_star=t_star,
        wilkinson_exponent=0.25,
    )


def _grid_golden_max(f, points: int = 4096):
    """Maximize f on (0, 1): coarse grid, then golden-section refinement."""
    grid = [i / points for i in range(1, points)]
    t0 = max(grid, key=f)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = t0 - 1.0 / points, t0 + 1.0 / points
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    for _ in range(200):
        if f(c) >= f(d):
            b = d
        else:
            a = c
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        if b - a < 1e-15:
            break
    return 0.5 * (a + b)


def relaxation_max_aspect() -> float:
    """max over t in (0,1) of (1/t)^(t/2) (1/(1-t))^((1-t)/2); equals
    sqrt(2) at t = 1/2 (binary-entropy maximum)."""

    def f(t):
        return math.exp(-0.5 * (t * math.log(t) + (1 - t) * math.log(1 - t)))

    return f(_grid_golden_max(f))


def relaxation_max_band_term() -> float:
    """max over t in (0,1) of (1 + (2/sqrt(11))^(1/(1-t)))^t, about 1.168."""

    def f(t):
        return t * math.log1p((2.0 / math.sqrt(11.0)) ** (1.0 / (1.0 - t)))

    return math.exp(f(_grid_golden_max(f)))


def base_case_lower(x: float) -> float:
    """Explicit lower bound for the averaged profile at x, from the two
    classical inequalities; valid for x > 1."""
    if x <= 1.0:
        raise ValueError("x > 1 required")
    lx = math.log(x)
    u = lx + 1.0 / x
    return -(u * u / 4.0 + u / 2.0 + math.log(2.0)) / x - (lx * lx / 4.0 + math.log(2.0))


def base_case_margin(x: float, beta: float = BETA) -> float:
    """base_case_lower(x) + alpha ln^2 x + beta ln x; positive means the
    base-case inequality holds at x."""
    lx = math.log(x)
    return base_case_lower(x) + alpha_constant() * lx * lx + beta * lx


def g_beta_y(beta: float, y: float) -> float:
    """The explicit O(ln^2 y / y) remainder of the inductive step."""
    if y <= 0:
        raise ValueError("y > 0 required")
    ln2 = math.log(2.0)
    denom = 2.0 + (2.0 - SQRT2) * ln2
    ly = math.log(y)
    term1 = -(2.0 + SQRT2) / denom * ly * ly / y
    term2 = -((4.0 + 2.0 * SQRT2) * beta + (5.0 + 3.0 * SQRT2) * ln2 / denom) * ly / y
    term3 = (
        (11.0 + 7.0 * SQRT2) * ln2 * ln2 / (4.0 * denom)
        - (5.0 + 3.0 * SQRT2) * beta * ln2
        - (SQRT2 + 1.0) * ln2 / 2.0
    ) / y
    term4 = -SQRT2 / denom / (y * y)
    return term1 + term2 + term3 + term4


def induction_constant(beta: float = BETA) -> float:
    """The beta-linear constant term of the inductive step; the step
    closes when this exceeds -g(beta, y) for all y past the base case."""
    ln2 = math.log(2.0)
    ln114 = math.log(11.0 / 4.0)
    denom = 2.0 + (2.0 - SQRT2) * ln2
    first = ((SQRT2 - 1.0) * ln2 + SQRT2) / SQRT2 * beta
    second = ((2.0 - SQRT2) * ln2 * ln2 - 4.0 * (2.0 - SQRT2) * (ln114 - 1.0) * ln2 - 8.0 * ln114) / (8.0 * denom)
    return first + second


class GrowthProfile:
    """A nonpositive log-pivot profile with q_1 = 0, plus its continuous
    extension f and running average F.

    f(x) = q_ceil(x) - q_1 and F(x) = (1/x) * integral of f over (0, x],
    evaluated by exact piecewise summation so F at integer m is the plain
    discrete mean.
    """

    def __init__(self, q, allow_positive: bool = False):
        q = [float(v) for v in q]
        if not q:
            raise ValueError("empty profile")
        if q[0] != 0.0:
            raise ValueError("profiles are normalized to q_1 = 0")
        if not allow_positive and any(v > 0.0 for v in q):
            raise ValueError("positive entries need allow_positive=True")
        self.q = q

    @classmethod
    def from_solution(cls, q, extend_to: int = 0, allow_positive: bool = False):
        """Normalize a solver q to q_1 = 0 and pad with the last value."""
        q = [float(v) for v in q]
        base = q[0]
        q = [v - base for v in q]
        if extend_to > len(q):
            q = q + [q[-1]] * (extend_to - len(q))
        return cls(q, allow_positive=allow_positive)

    @property
    def n(self) -> int:
        return len(self.q)

    def f(self, x: float) -> float:
        if x <= 0:
            raise ValueError("x > 0 required")
        k = math.ceil(x)
        if k > self.n:
            raise IndexError("profile too short; pad with from_solution(extend_to=...)")
        return self.q[k - 1] - self.q[0]

    def F(self, x: float) -> float:
        if x <= 0:
            raise ValueError("x > 0 required")
        m = math.floor(x)
        if math.ceil(x) > self.n:
            raise IndexError("profile too short; pad with from_solution(extend_to=...)")
        total = sum(self.q[k] - self.q[0] for k in range(min(m, self.n)))
        if x > m:
            total += (x - m) * self.f(x)
        return total / x


def induction_rhs_check(profile: GrowthProfile, x: float, tol: float = 1e-9) -> bool:
    """Whether the averaged-profile inequality at x holds:
    F(ceil(x)) <= ln(11x/4)/2 + 1/(2x) + (sqrt2 - 1 - sqrt2/x)(sqrt2 f(sqrt2 x) + f(x)).
    Requires the profile to cover index ceil(sqrt(2) x)."""
    if x <= 0:
        raise ValueError("x > 0 required")
    if math.ceil(SQRT2 * x) > profile.n:
        raise ValueError("profile does not cover ceil(sqrt(2) x); pad it first")
    lhs = profile.F(math.ceil(x))
    rhs = (
        0.5 * math.log(2.75 * x)
        + 0.5 / x
        + (SQRT2 - 1.0 - SQRT2 / x) * (SQRT2 * profile.f(SQRT2 * x) + profile.f(x))
    )
    return lhs <= rhs + tol


def candidate_profile(gamma: float, n: int) -> GrowthProfile:
    """q_k = -gamma ln^2 k, the shape the optimality analysis predicts."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    return GrowthProfile([-gamma * math.log(k) ** 2 for k in range(1, n + 1)])


def _lp_worst_normalized_slack(q) -> float:
    """Most negative slack over every row of the strengthened program, each
    scaled by max(1, |lhs|); 0 when fully feasible."""
    import numpy as np

    q = np.asarray(q, dtype=float)
    n = len(q)
    s = np.cumsum(q)
    scale = np.maximum(1.0, np.abs(s))
    kk = np.arange(1, n + 1, dtype=float)
    worst = float(np.min((0.5 * kk * np.log(kk) + kk * q - s) / scale))
    for k in range(2, n):
        lmax = min(k - 1, n - k)
        if lmax < 1:
            continue
        l = np.arange(1, lmax + 1, dtype=float)
        rhs = 0.5 * k * math.log(2.75 * k) + l * q[k - 1] + (k - l) * q[k : k + lmax]
        worst = min(worst, float(np.min(rhs - s[k - 1])) / max(1.0, abs(s[k - 1])))
    return min(worst, 0.0)


def candidate_shift_feasible(gamma: float, n: int, shifts: int = 160, tol: float = 1e-9):
    """Search additive shifts c of the clipped profile
    q_k = min(0, c - gamma ln^2 k) for one that satisfies every row of the
    strengthened program.  Feasibility is not monotone in c (the clip at
    zero bends the profile), so this scans a grid and refines around the
    best margin rather than bisecting.  Returns (feasible, best_shift)."""
    if n < 2:
        return True, 0.0
    top = gamma * math.log(n) ** 2

    def worst(c: float) -> float:
        q = [min(0.0, c - gamma * math.log(k) ** 2) for k in range(1, n + 1)]
        return _lp_worst_normalized_slack(q)

    best_c, best_m = 0.0, worst(0.0)
    for i in range(1, shifts + 1):
        c = top * i / shifts
        m = worst(c)
        if m > best_m:
            best_c, best_m = c, m
        if best_m >= -tol:
            return True, best_c
    # refine around the best coarse point
    step = top / shifts
    for c in (best_c + step * (j / 16.0 - 0.5) for j in range(17)):
        if c < 0:
            continue
        m = worst(c)
        if m > best_m:
            best_c, best_m = c, m
        if best_m >= -tol:
            return True, best_c
    return best_m >= -tol, best_c
