"""Powell's conjugate-direction method with a recorded trajectory.

One *update* is one line search that moved the parameters to a strictly
lower objective; ``max_updates`` caps those.  Every function evaluation is
also logged so the running best can be audited.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

GOLD = 1.618033988749895
CGOLD = 0.3819660112501051
GLIMIT = 100.0
TINY = 1e-21


class ObjectiveError(FloatingPointError):
    """The objective returned NaN or infinity."""


@dataclass
class OptimizerConfig:
    max_updates: int = 2000
    value_tolerance: float = 1e-8
    line_search_tolerance: float = 1e-8
    initial_step: float = 0.1
    seed: int = 0
    init_noise: float = 0.01
    max_evaluations: int = 200_000

    def __post_init__(self):
        if self.max_updates < 1:
            raise ValueError("max_updates must be >= 1")
        if self.value_tolerance <= 0 or self.line_search_tolerance <= 0:
            raise ValueError("tolerances must be > 0")
        if self.initial_step <= 0:
            raise ValueError("initial_step must be > 0")
        if self.init_noise < 0:
            raise ValueError("init_noise must be >= 0")

    def initial_point(self, k: int, seed: int | None = None) -> np.ndarray:
        """Zeros plus uniform noise in ``[-init_noise, init_noise]``."""
        rng = np.random.default_rng(self.seed if seed is None else seed)
        return rng.uniform(-self.init_noise, self.init_noise, size=k)


@dataclass
class Trace:
    """Accepted updates (index, objective, parameters) plus every evaluation."""

    update_values: list[float] = field(default_factory=list)
    update_params: list[np.ndarray] = field(default_factory=list)
    evaluations: list[float] = field(default_factory=list)
    converged: bool = False
    unbracketed: int = 0

    @property
    def updates_used(self) -> int:
        return len(self.update_values)

    def running_best(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.evaluations)) if self.evaluations else np.array([])

    def updates_to_convergence(self, tol: float = 1e-4) -> int:
        """Update count after which the objective stays within ``tol`` of its final value.

        The starting point counts as update 0, so a run that begins inside
        the tolerance band reports 0.
        """
        if not self.update_values:
            return 0
        start = self.evaluations[:1] if self.evaluations else []
        vals = np.asarray(start + self.update_values)
        above = np.flatnonzero(vals > vals[-1] + tol)
        return int(above[-1] + 1) if above.size else 0


@dataclass
class LineResult:
    t: float
    value: float
    bracketed: bool


@dataclass
class PowellResult:
    x: np.ndarray
    fun: float
    trace: Trace
    nfev: int

    def __iter__(self):
        return iter((self.x, self.fun, self.trace))


class _Counted:
    def __init__(self, f: Callable, trace: Trace, limit: int):
        self.f = f
        self.trace = trace
        self.limit = limit
        self.nfev = 0

    def __call__(self, x: np.ndarray) -> float:
        if self.nfev >= self.limit:
            raise _Budget()
        val = float(self.f(x))
        self.nfev += 1
        if not math.isfinite(val):
            raise ObjectiveError(f"objective returned {val} at theta={np.array2string(np.asarray(x), precision=17)}")
        self.trace.evaluations.append(val)
        return val


class _Budget(Exception):
    pass


def bracket_and_minimize_line(f: Callable, point, direction, cfg: OptimizerConfig | None = None,
                              f0: float | None = None, max_expansions: int = 50) -> LineResult:
    """Minimize ``f(point + t * direction)`` over ``t``.

    Downhill golden-ratio bracketing from ``t = 0``, then Brent's
    parabolic/golden-section search.  If no bracket appears within
    ``max_expansions`` steps the best sampled ``t`` is returned with
    ``bracketed=False``.
    """
    cfg = cfg or OptimizerConfig()
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if not np.any(direction):
        raise ValueError("line direction must be nonzero")

    def g(t: float) -> float:
        return float(f(point + t * direction))

    a, fa = 0.0, g(0.0) if f0 is None else float(f0)
    b = float(cfg.initial_step)
    fb = g(b)
    if fb > fa:
        a, b, fa, fb = b, a, fb, fa
    c = b + GOLD * (b - a)
    fc = g(c)
    best = min((fa, a), (fb, b), (fc, c))
    n = 0
    while fb > fc:
        if n >= max_expansions:
            fbest, tbest = min((fa, a), (fb, b), (fc, c))
            return LineResult(tbest, fbest, False)
        n += 1
        r = (b - a) * (fb - fc)
        q = (b - c) * (fb - fa)
        ulim = b + GLIMIT * (c - b)
        num = (b - c) * q - (b - a) * r
        denom = 2.0 * math.copysign(max(abs(q - r), TINY), q - r)
        # parabolic step, clipped to the extrapolation limit
        u = b - num / denom if abs(num) < GLIMIT * abs(c - b) * abs(denom) else ulim
        if (b - u) * (u - c) > 0.0:
            fu = g(u)
            if fu < fc:
                a, b, fa, fb = b, u, fb, fu
                break
            if fu > fb:
                c, fc = u, fu
                break
            u = c + GOLD * (c - b)
            fu = g(u)
        elif (c - u) * (u - ulim) > 0.0:
            fu = g(u)
            if fu < fc:
                b, c, u = c, u, u + GOLD * (u - c)
                fb, fc, fu = fc, fu, g(u)
        elif (u - ulim) * (ulim - c) >= 0.0:
            u = ulim
            fu = g(u)
        else:
            u = c + GOLD * (c - b)
            fu = g(u)
        a, b, c = b, c, u
        fa, fb, fc = fb, fc, fu
    t, ft = _brent(g, a, b, c, fb, cfg.line_search_tolerance)
    fbest, tbest = min((ft, t), best)
    return LineResult(tbest, fbest, True)


def _brent(g: Callable, ax: float, bx: float, cx: float, fbx: float, tol: float, itmax: int = 200):
    a, b = min(ax, cx), max(ax, cx)
    x = w = v = bx
    fx = fw = fv = fbx
    d = e = 0.0
    for _ in range(itmax):
        xm = 0.5 * (a + b)
        tol1 = tol * abs(x) + 1e-12
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            break
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if abs(p) >= abs(0.5 * q * etemp) or p <= q * (a - x) or p >= q * (b - x):
                e = (a - x) if x >= xm else (b - x)
                d = CGOLD * e
            else:
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = math.copysign(tol1, xm - x)
        else:
            e = (a - x) if x >= xm else (b - x)
            d = CGOLD * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = g(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def powell_minimize(f: Callable, theta0, cfg: OptimizerConfig | None = None,
                    callback: Callable | None = None) -> PowellResult:
    """Minimize ``f`` from ``theta0``; returns the best point seen.

    Each cycle line-minimizes along every direction of the set, then tries
    the extrapolated cycle direction and, when Powell's test accepts it,
    swaps it in for the direction of largest decrease.  Stops when a cycle
    lowers the objective by less than ``value_tolerance``, or when
    ``max_updates`` updates have been made.

    ``callback(x, fx)`` is invoked after every accepted update.
    """
    cfg = cfg or OptimizerConfig()
    x = np.array(theta0, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("theta0 must be finite")
    k = x.size
    trace = Trace()
    fc = _Counted(f, trace, cfg.max_evaluations)
    dirs = [row.copy() for row in np.eye(k)]

    def accept(xn, fn):
        trace.update_values.append(fn)
        trace.update_params.append(xn.copy())
        if callback is not None:
            callback(xn, fn)

    try:
        fx = fc(x)
        if k == 0:
            trace.converged = True
            return PowellResult(x, fx, trace, fc.nfev)
        pt = x.copy()
        while True:
            fp = fx
            ibig, delta = 0, 0.0
            for i, d in enumerate(dirs):
                before = fx
                res = bracket_and_minimize_line(fc, x, d, cfg, f0=fx)
                trace.unbracketed += not res.bracketed
                if res.value < fx:
                    x = x + res.t * d
                    fx = res.value
                    accept(x, fx)
                    if trace.updates_used >= cfg.max_updates:
                        return PowellResult(x, fx, trace, fc.nfev)
                if before - fx > delta:
                    delta, ibig = before - fx, i
            if fp - fx < cfg.value_tolerance:
                trace.converged = True
                break
            xit = x - pt
            ptt = x + xit
            pt = x.copy()
            fptt = fc(ptt)
            if fptt < fp:
                t = 2.0 * (fp - 2.0 * fx + fptt) * (fp - fx - delta) ** 2 - delta * (fp - fptt) ** 2
                if t < 0.0:
                    res = bracket_and_minimize_line(fc, x, xit, cfg, f0=fx)
                    trace.unbracketed += not res.bracketed
                    if res.value < fx:
                        x = x + res.t * xit
                        fx = res.value
                        accept(x, fx)
                        if trace.updates_used >= cfg.max_updates:
                            return PowellResult(x, fx, trace, fc.nfev)
                    dirs[ibig] = dirs[-1]
                    dirs[-1] = xit / np.linalg.norm(xit)
    except _Budget:
        logger.warning("evaluation budget of %d exhausted", cfg.max_evaluations)
    return PowellResult(x, fx, trace, fc.nfev)
