"""Potential function, hyperbolicity equations and the complex volume.

The potential is ``V(z) = sum_g sigma(g) Li_2(z(beta(g)) / z(alpha(g)))``
over the surviving tetrahedra.  Newton iteration runs in log coordinates
``w = log z`` where the Jacobian of ``z dV/dz`` is the symmetric matrix
``sum_g sigma(g) x_g / (1 - x_g) e_g e_g^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diagram import QuadrantLabeling
from .special import bloch_wigner, dilog
from .triangulation import IdealTriangulation

__all__ = [
    "SingularArgument",
    "NoConvergence",
    "PotentialSpec",
    "Solution",
    "SolverOptions",
    "VOLUME_SIGN",
    "build_potential",
    "potential_value",
    "grad_log",
    "jacobian_log",
    "solve",
    "complex_volume",
]

PI2 = math.pi ** 2
# Im(V-hat) is the volume at the geometric solution for the checkerboard sigma
VOLUME_SIGN = 1


class SingularArgument(ArithmeticError):
    pass


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class PotentialSpec:
    c: int
    terms: tuple  # (g, sigma, alpha, beta)
    fixed: tuple  # indices with z = 1
    lambda_: tuple  # unknowns, sorted
    constant: complex = 0j  # sigma * Li_2(1) over the tetrahedra in R_0 and R_{c+1}

    def __post_init__(self):
        object.__setattr__(self, "_pos", {l: i for i, l in enumerate(self.lambda_)})

    @property
    def size(self) -> int:
        return len(self.lambda_)

    def assignment(self, z) -> dict:
        """Full map index -> z value from a vector over ``lambda_``."""
        full = {l: 1 + 0j for l in self.fixed}
        full.update({l: complex(v) for l, v in zip(self.lambda_, z)})
        return full


def build_potential(it: IdealTriangulation, q: QuadrantLabeling) -> PotentialSpec:
    c = q.c
    fixed = sorted({q.alpha[g] for g in q.preimage(q.mu, [0, c + 1])})
    lam = tuple(l for l in range(2, 2 * c - 1) if l not in fixed)
    terms = tuple((g, q.sigma[g], q.alpha[g], q.beta[g]) for g in it.gamma)
    # The tetrahedra meeting the two regions next to P_0 collapse with shape
    # parameter 1; they drop out of the equations but each leaves
    # sigma * pi^2 / 6 in the complex volume.
    flat = sum(q.sigma[g] for g in q.preimage(q.mu, [0, c + 1]))
    known = set(lam) | set(fixed)
    for g, _, a, b in terms:
        if a not in known or b not in known:
            raise ValueError(f"term S_{g} uses an index outside the variable set")
    return PotentialSpec(c=c, terms=terms, fixed=tuple(fixed), lambda_=lam,
                         constant=complex(flat * PI2 / 6))


def _ratios(ps: PotentialSpec, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.size and (not np.all(np.isfinite(z)) or np.any(z == 0)):
        raise SingularArgument("a variable is zero or not finite")
    full = ps.assignment(z)
    return np.array([full[b] / full[a] for _, _, a, b in ps.terms], dtype=complex)


def potential_value(ps: PotentialSpec, z) -> complex:
    """V(z) over the surviving terms; ``ps.constant`` is not included."""
    x = _ratios(ps, z)
    return sum(s * dilog(xi) for (_, s, _, _), xi in zip(ps.terms, x))


def _incidence(ps: PotentialSpec) -> np.ndarray:
    # e_g = indicator(alpha) - indicator(beta), restricted to the unknowns
    e = np.zeros((len(ps.terms), ps.size))
    pos = ps._pos
    for k, (_, _, a, b) in enumerate(ps.terms):
        if a in pos:
            e[k, pos[a]] += 1
        if b in pos:
            e[k, pos[b]] -= 1
    return e


def grad_log(ps: PotentialSpec, z) -> np.ndarray:
    """``z(l) dV/dz(l)`` for every unknown, principal logs."""
    x = _ratios(ps, z)
    one_minus = 1 - x
    if np.any(np.abs(one_minus) == 0):
        raise SingularArgument("a dilogarithm argument equals 1")
    sig = np.array([s for _, s, _, _ in ps.terms], dtype=float)
    return _incidence(ps).T @ (sig * np.log(one_minus))


def jacobian_log(ps: PotentialSpec, z) -> np.ndarray:
    """Derivative of ``grad_log`` with respect to ``log z``."""
    x = _ratios(ps, z)
    sig = np.array([s for _, s, _, _ in ps.terms], dtype=float)
    e = _incidence(ps)
    return (e.T * (sig * x / (1 - x))) @ e


def residual(ps: PotentialSpec, z) -> float:
    return float(np.max(np.abs(np.exp(grad_log(ps, z)) - 1), initial=0.0))


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-12
    seed: int = 0
    restarts: int = 16
    max_iter: int = 100
    max_halvings: int = 40
    theta_range: tuple = (0.2, 1.2)
    volume_floor: float = 1e-6


@dataclass(frozen=True)
class Solution:
    crossings: int
    gamma_size: int
    lambda_: tuple
    zeta: dict
    branch_integers: dict
    residual: float
    v_hat: complex
    volume: float
    cs_mod_pi2: float
    restarts_used: int
    seed: int
    geometric: bool = True
    trace: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "crossings": self.crossings,
            "gamma_size": self.gamma_size,
            "lambda": list(self.lambda_),
            "z": [{"l": l, "re": v.real, "im": v.imag} for l, v in self.zeta.items()],
            "residual": self.residual,
            "v_hat": {"re": self.v_hat.real, "im": self.v_hat.imag},
            "volume": self.volume,
            "cs_mod_pi2": self.cs_mod_pi2,
            "restarts_used": self.restarts_used,
            "seed": self.seed,
        }


def _newton(ps: PotentialSpec, w: np.ndarray, opts: SolverOptions):
    """Damped Newton on ``grad_log(exp w) = 0`` with principal logarithms.

    Holding every branch integer at zero keeps the iteration on one sheet;
    letting it hop between sheets was found to shrink the basin of the
    geometric solution.
    """
    trace = []

    def merit(wv):
        try:
            # overflow lands in the non-finite check below
            with np.errstate(over="ignore", invalid="ignore"):
                f = grad_log(ps, np.exp(wv))
        except SingularArgument:
            return None, math.inf
        if not np.all(np.isfinite(f)):
            return None, math.inf
        return f, float(np.linalg.norm(f))

    f, nf = merit(w)
    for _ in range(opts.max_iter):
        z = np.exp(w)
        if f is None:
            return None, trace
        if residual(ps, z) < opts.tol:
            return w, trace
        jac = jacobian_log(ps, z)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        t = 1.0
        for _ in range(opts.max_halvings + 1):
            cand = w + t * step
            fc, nc = merit(cand)
            if nc < nf:
                break
            t *= 0.5
        else:
            return None, trace
        w, f, nf = cand, fc, nc
        trace.append(nf)
    z = np.exp(w)
    if f is not None and residual(ps, z) < opts.tol:
        return w, trace
    return None, trace


def _finish(ps: PotentialSpec, z: np.ndarray) -> tuple[complex, dict]:
    g = grad_log(ps, z)
    k = np.round(g.imag / (2 * math.pi)).astype(int)
    v_hat = ps.constant + potential_value(ps, z) - complex(np.sum(np.log(z) * g))
    return v_hat, {l: int(kl) for l, kl in zip(ps.lambda_, k)}


def complex_volume(sol_or_vhat) -> tuple[float, float]:
    """(volume, Chern-Simons representative in [0, pi^2))."""
    v_hat = sol_or_vhat.v_hat if isinstance(sol_or_vhat, Solution) else complex(sol_or_vhat)
    vol = VOLUME_SIGN * v_hat.imag
    cs = math.fmod(v_hat.real, PI2)
    if cs < 0:
        cs += PI2
    if cs >= PI2:
        cs -= PI2
    return vol, cs


def solve(ps: PotentialSpec, opts: SolverOptions | None = None) -> Solution:
    """Multi-start damped Newton; keeps the critical point of largest volume.

    Every restart draws ``z(l) = exp(i theta_l)`` with ``theta_l`` uniform
    in ``opts.theta_range`` from one seeded generator, so a fixed seed
    reproduces the run exactly.
    """
    opts = opts or SolverOptions()
    rng = np.random.default_rng(opts.seed)
    n = ps.size
    best = None
    traces = []
    wanted = max(1, opts.restarts)
    converged = attempt = 0
    # stalled starts are retried and do not count towards ``restarts``
    while converged < wanted and attempt < 4 * wanted:
        theta = rng.uniform(*opts.theta_range, size=n)
        w0 = 1j * theta
        w, trace = _newton(ps, w0, opts)
        traces.append(tuple(trace))
        attempt += 1
        if w is None:
            continue
        converged += 1
        # the equations have real coefficients, so the conjugate also solves them
        for z in (np.exp(w), np.exp(w.conj())):
            try:
                if residual(ps, z) >= opts.tol:
                    continue
            except SingularArgument:
                continue
            v_hat, k = _finish(ps, z)
            vol, _ = complex_volume(v_hat)
            if best is None or vol > best[0] + 1e-9:
                best = (vol, z, v_hat, k, attempt - 1)
    if best is None:
        raise NoConvergence(f"no restart converged ({attempt} attempts)")
    vol, z, v_hat, k, _ = best
    vol, cs = complex_volume(v_hat)
    return Solution(
        crossings=ps.c,
        gamma_size=len(ps.terms),
        lambda_=ps.lambda_,
        zeta={l: complex(v) for l, v in zip(ps.lambda_, z)},
        branch_integers=k,
        residual=residual(ps, z),
        v_hat=v_hat,
        volume=vol,
        cs_mod_pi2=cs,
        restarts_used=attempt,
        seed=opts.seed,
        geometric=vol > opts.volume_floor,
        trace=tuple(traces),
    )


def bloch_wigner_volume(ps: PotentialSpec, z) -> float:
    """Sum of sigma * D(x_g); branch-free cross-check of Im(V-hat)."""
    return sum(s * bloch_wigner(x) for (_, s, _, _), x in zip(ps.terms, _ratios(ps, z)))

