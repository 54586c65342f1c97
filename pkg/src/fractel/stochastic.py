"""Random samplers and the Monte Carlo harness.

Conventions
-----------
* A subordinator H with exponent alpha satisfies E exp(-u H(t)) = exp(-t u^alpha).
* A process attached to the symbol m has E exp(i <xi, X(t)>) = exp(-t m(|xi|));
  for the Laplacian that is B(2t) with B a standard Brownian motion.
* The inverse clock L(t) = inf{s : H1(s) + (2 lam)^(1/a) H2(s) >= t} with
  H1 of exponent 2a and H2 of exponent a, a <= 1/2, has
  int_0^inf e^{-st} E e^{-m L(t)} dt = (s^{2a-1} + 2 lam s^{a-1}) / (s^{2a} + 2 lam s^a + m).
"""

from __future__ import annotations

import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from fractel.errors import BudgetError, ConvergenceError, DomainError, UnsupportedError
from fractel.fields import Delta
from fractel.numlab import euler_invert
from fractel.symbols import (
    BesselRieszProcess,
    BrownianMotion,
    FracParams,
    InhomTelegraphProcess,
    IsotropicStableProcess,
    RelativisticProcess,
    TelegraphProcess,
    process_for_symbol,
)

__all__ = [
    "RngStream",
    "MCEstimate",
    "Histogram",
    "SubordinatorPath",
    "sample_stable_subordinator",
    "stable_subordinator_path",
    "sample_inverse_L",
    "sample_process",
    "sample_telegraph",
    "sample_telegraph_inhomogeneous",
    "sample_halfnormal_clock",
    "bessel_riesz_table",
    "mc_mean",
    "mc_solve_telegraph",
    "mc_solve_halftime",
    "histogram_density",
    "DEFAULT_CHUNKS",
    "TOL_L",
]

log = logging.getLogger(__name__)

DEFAULT_CHUNKS = 16
TOL_L = 1e-4
RELATIVISTIC_MAX_MASS_T = 20.0
BR_TABLE_JMIN = -20
BR_TABLE_JMAX = 6


class RngStream:
    """Deterministic random stream identified by ``(seed, stream_id)``.

    Backed by PCG64 seeded through ``SeedSequence(seed, spawn_key=(stream_id,))``,
    so equal identifiers give bit-identical draw sequences.
    """

    def __init__(self, seed, stream_id=0):
        seed, stream_id = int(seed), int(stream_id)
        if not (0 <= seed < 2**64 and 0 <= stream_id < 2**64):
            raise DomainError("seed and stream_id must be 64-bit unsigned integers")
        self.seed = seed
        self.stream_id = stream_id
        ss = np.random.SeedSequence(seed, spawn_key=(stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def split(self, k):
        """``k`` child streams with distinct ids derived from this stream's id."""
        if k < 1:
            raise DomainError("split needs k >= 1")
        ids = []
        for i in range(k):
            ss = np.random.SeedSequence(self.stream_id, spawn_key=(i,))
            ids.append(int(ss.generate_state(1, np.uint64)[0]))
        if len(set(ids)) != k or self.stream_id in ids:
            raise RuntimeError("stream id collision in split")
        return [RngStream(self.seed, sid) for sid in ids]

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _gen(rng):
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError("rng must be an RngStream or numpy Generator")


@dataclass
class MCEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    n: int
    seed: int | None = None
    stream_id: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if self.n < 1:
            raise DomainError("MCEstimate needs n >= 1")
        if np.any(self.stderr < 0):
            raise DomainError("stderr must be nonnegative")

    def within(self, target, k=3.0):
        """True where |mean - target| <= k stderr (stderr 0 demands equality up to rounding)."""
        tol = k * self.stderr + 1e-12 * (1 + np.abs(target))
        return np.abs(self.mean - np.asarray(target)) <= tol


@dataclass
class SubordinatorPath:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.grid[0] != 0 or self.values[0] != 0:
            raise DomainError("subordinator path starts at H(0) = 0")
        if np.any(np.diff(self.values) < 0) or np.any(np.diff(self.grid) <= 0):
            raise DomainError("subordinator path must be nondecreasing on an increasing grid")


# -- stable subordinators ---------------------------------------------------------


def _standard_stable(alpha, gen, size):
    """Kanter's representation of S with E exp(-u S) = exp(-u^alpha)."""
    u = np.pi * (1.0 - gen.random(size))  # (0, pi]
    e = np.maximum(gen.standard_exponential(size), 1e-300)
    log_s = (
        np.log(np.sin(alpha * u))
        - np.log(np.sin(u)) / alpha
        + (1 - alpha) / alpha * (np.log(np.sin((1 - alpha) * u)) - np.log(e))
    )
    return np.exp(log_s)


def sample_stable_subordinator(alpha_s, t, rng, size=None):
    """Draws of H(t), E exp(-u H(t)) = exp(-t u^alpha_s).

    ``t`` may be an array broadcast against ``size``.  ``alpha_s = 1`` is the
    deterministic drift H(t) = t.
    """
    if not (0.0 < alpha_s <= 1.0):
        raise DomainError(f"stable index must lie in (0, 1), got {alpha_s}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if size is None:
        size = t.shape
    if alpha_s == 1.0:
        out = np.broadcast_to(t, size).astype(float)
    else:
        out = t ** (1.0 / alpha_s) * _standard_stable(alpha_s, _gen(rng), size)
    return float(out) if np.ndim(out) == 0 else out


def stable_subordinator_path(alpha_s, grid, rng):
    """Exact values of H on ``grid`` (starting at 0) from independent increments."""
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    inc = sample_stable_subordinator(alpha_s, dt, rng, size=dt.shape)
    return SubordinatorPath(grid, np.concatenate(([0.0], np.cumsum(inc))))


# -- inverse clock ----------------------------------------------------------------


def _check_inverse_params(p):
    if not isinstance(p, FracParams):
        raise DomainError("expected FracParams")
    if not p.stochastic_regime:
        raise DomainError(f"inverse-clock representation needs alpha <= 1/2, got {p.alpha}")


def sample_inverse_L(p: FracParams, t, rng, tol_L=TOL_L, size=None, method="marginal", max_steps=10**6):
    """Draws of L(t), the first passage of H1 + (2 lam)^(1/a) H2 over t.

    ``method="marginal"`` (default) is exact in law: at each s the sum has the
    law s^(1/2a) S1 + c s^(1/a) S2 for standard stable S1, S2, and for fixed
    (S1, S2) this is increasing in s, so its passage time over t solves a
    quadratic.  Draws are then nondecreasing in ``t`` and nonincreasing in
    ``lam`` for a shared stream.

    ``method="path"`` simulates exact increments on the grid s_k = k tol_L and
    returns the midpoint of the bracketing cell; it raises
    :class:`BudgetError` when more than ``max_steps`` cells are needed.
    """
    _check_inverse_params(p)
    if not tol_L > 0:
        raise DomainError("tol_L must be > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if size is None:
        size = t.shape
    gen = _gen(rng)
    a = p.alpha
    c = (2.0 * p.lam) ** (1.0 / a)
    if method == "marginal":
        s1 = np.ones(size) if a == 0.5 else _standard_stable(2 * a, gen, size)
        s2 = _standard_stable(a, gen, size)
        y = 2.0 * t / (s1 + np.sqrt(s1 * s1 + 4.0 * c * s2 * t))
        out = y ** (2 * a)
    elif method == "path":
        out = _inverse_L_path(a, c, np.broadcast_to(t, size), gen, tol_L, max_steps)
    else:
        raise DomainError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else out


def _inverse_L_path(a, c, t, gen, h, max_steps, block=256):
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    out = np.zeros(flat.size)
    level = np.zeros(flat.size)
    done = flat <= 0
    k = 0
    d1 = h ** (1 / (2 * a))
    d2 = c * h ** (1 / a)
    while not np.all(done):
        idx = np.flatnonzero(~done)
        if k >= max_steps:
            raise BudgetError(f"inverse clock exceeded {max_steps} refinement steps (tol_L={h})")
        nb = min(block, max_steps - k)
        inc1 = np.full((idx.size, nb), d1) if a == 0.5 else d1 * _standard_stable(2 * a, gen, (idx.size, nb))
        inc = inc1 + d2 * _standard_stable(a, gen, (idx.size, nb))
        path = level[idx, None] + np.cumsum(inc, axis=1)
        hit = path >= flat[idx, None]
        any_hit = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        sel = idx[any_hit]
        out[sel] = (k + first[any_hit] + 0.5) * h
        done[sel] = True
        level[idx[~any_hit]] = path[~any_hit, -1]
        k += nb
    return out.reshape(t.shape)


# -- Bessel-Riesz subordinator table ------------------------------------------------


@dataclass
class _ClockTable:
    tau: float
    logx: np.ndarray
    cdf: np.ndarray  # increasing, valid where cdf <= 0.5
    neg_log_sf: np.ndarray  # increasing, valid where sf <= 0.5
    tail_exponent: float
    inversion_error: float


def _br_exponent(beta, gamma):
    def psi(s):
        return s ** (beta / 2) * (1 + s) ** (gamma / 2)

    return psi


def _checked_euler(F, x, tol=1e-4):
    # sharply peaked clocks (beta + gamma near 2) limit the inversion to ~1e-5
    hi = euler_invert(F, x, 18)
    lo = euler_invert(F, x, 16)
    diff = float(np.max(np.abs(hi - lo)))
    if diff > tol:
        raise ConvergenceError(f"clock table inversion unstable ({diff:.2e})")
    return hi, diff


@functools.lru_cache(maxsize=64)
def bessel_riesz_table(beta, gamma, j, points=400):
    """Quantile table of the clock with exponent u^(b/2) (1+u)^(g/2) at time 2^j.

    The CDF and survival function are obtained by numerical Laplace inversion
    of e^{-tau psi(s)}/s and (1 - e^{-tau psi(s)})/s on a log-spaced grid.
    Euler inversion is used because e^{-tau psi} grows in the left
    half-plane when beta + gamma > 1, which defeats Talbot contours.
    """
    tau = 2.0**j
    psi = _br_exponent(beta, gamma)
    # scale of L(tau): small times follow the large-u exponent, large times the small-u one
    lo_scale = min(tau ** (2 / (beta + gamma)), tau ** (2 / beta))
    hi_scale = max(tau ** (2 / (beta + gamma)), tau ** (2 / beta))
    x = np.geomspace(lo_scale * 1e-4, hi_scale * 1e6, points)
    cdf, err_cdf = _checked_euler(lambda s: np.exp(-tau * psi(s)) / s, x)
    sf, err_sf = _checked_euler(lambda s: -np.expm1(-tau * psi(s)) / s, x)
    cdf = np.maximum.accumulate(np.clip(cdf, 0.0, 1.0))
    sf = np.minimum.accumulate(np.clip(sf, 1e-300, 1.0))
    return _ClockTable(tau, np.log(x), cdf, -np.log(sf), beta / 2, max(err_cdf, err_sf))


def _table_draw(table, u):
    out = np.empty_like(u)
    low = u <= 0.5
    out[low] = np.interp(u[low], table.cdf, table.logx, left=table.logx[0])
    q = -np.log1p(-u[~low])
    nls = table.neg_log_sf
    inside = q <= nls[-1]
    vals = np.interp(q[inside], nls, table.logx)
    # Pareto continuation beyond the table: sf ~ x^(-beta/2)
    tail = table.logx[-1] + (q[~inside] - nls[-1]) / table.tail_exponent
    hi = np.empty(q.shape)
    hi[inside] = vals
    hi[~inside] = tail
    out[~low] = hi
    return np.exp(out)


def _sample_bessel_riesz_clock(beta, gamma, t, gen):
    t = np.asarray(t, dtype=float)
    if beta == 2.0:
        return t.copy()  # then gamma = 0 and the clock is the identity
    if np.any(t >= 2.0 ** (BR_TABLE_JMAX + 1)):
        raise UnsupportedError(
            f"Bessel-Riesz clock table covers t < {2.0 ** (BR_TABLE_JMAX + 1)}, got {t.max()}"
        )
    out = np.zeros(t.shape)
    rem = t.copy()
    for j in range(BR_TABLE_JMAX, BR_TABLE_JMIN - 1, -1):
        step = 2.0**j
        use = rem >= step
        # a uniform is consumed for every sample to keep streams aligned
        u = gen.random(t.shape)
        if np.any(use):
            table = bessel_riesz_table(float(beta), float(gamma), j)
            out[use] += _table_draw(table, u[use])
            rem[use] -= step
    # remainder below 2^JMIN contributes a negligible clock increment
    return out


# -- processes ----------------------------------------------------------------------


def _relativistic_clock(nu, mass, t, gen, max_rounds=10_000):
    t = np.asarray(t, dtype=float)
    if np.any(mass * t > RELATIVISTIC_MAX_MASS_T):
        raise BudgetError(
            f"relativistic rejection acceptance e^(-mass t) too low (mass*t={mass * t.max():.3g} > 20)"
        )
    c = mass ** (2.0 / nu)
    flat = t.ravel()
    out = np.empty(flat.size)
    pending = np.arange(flat.size)
    for _ in range(max_rounds):
        if pending.size == 0:
            return out.reshape(t.shape)
        s = flat[pending] ** (2.0 / nu) * _standard_stable(nu / 2, gen, pending.size)
        acc = gen.random(pending.size) < np.exp(-c * s)
        out[pending[acc]] = s[acc]
        pending = pending[~acc]
    raise BudgetError("relativistic rejection sampler exhausted its round budget")


def _brownian_at(clock, d, gen):
    clock = np.asarray(clock, dtype=float)
    z = gen.standard_normal(clock.shape + (d,))
    return np.sqrt(2.0 * clock)[..., None] * z


def sample_process(kind, t, rng, size=None):
    """Draws of X(t) for a process from :mod:`fractel.symbols`.

    ``t`` may be an array of per-sample times.  Spatial processes return an
    array of shape ``size + (d,)``; telegraph processes return positions.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if size is None:
        size = t.shape
    size = tuple(np.atleast_1d(size)) if np.ndim(size) else (int(size),) if size != () else ()
    tt = np.broadcast_to(t, size)
    gen = _gen(rng)
    if isinstance(kind, BrownianMotion):
        clock = tt
    elif isinstance(kind, IsotropicStableProcess):
        clock = sample_stable_subordinator(kind.beta / 2, tt, gen, size=size)
    elif isinstance(kind, BesselRieszProcess):
        clock = _sample_bessel_riesz_clock(kind.beta, kind.gamma, tt, gen)
    elif isinstance(kind, RelativisticProcess):
        clock = _relativistic_clock(kind.nu, kind.mass, tt, gen)
    elif isinstance(kind, TelegraphProcess):
        return sample_telegraph(kind.lam, tt, gen)
    elif isinstance(kind, InhomTelegraphProcess):
        return sample_telegraph_inhomogeneous(kind.lam, kind.eps, tt, gen)
    else:
        raise UnsupportedError(f"no sampler for {kind!r}")
    return _brownian_at(clock, kind.d, gen)


def sample_telegraph(lam, t, rng, size=None, return_switches=False):
    """Unit-speed telegraph position V(0) int_0^t (-1)^N(s) ds, N Poisson(lam).

    Exponential holding times; the position is integrated exactly.
    """
    if not lam >= 0:
        raise DomainError("lambda must be >= 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if size is None:
        size = t.shape
    gen = _gen(rng)
    tt = np.broadcast_to(t, size).astype(float).ravel()
    v0 = np.where(gen.random(tt.size) < 0.5, 1.0, -1.0)

    def next_time(now, e):
        return now + e / lam if lam > 0 else np.full(now.shape, np.inf)

    pos, switches = _run_switches(tt, gen, next_time)
    out = (v0 * pos).reshape(size)
    nsw = switches.reshape(size)
    if return_switches:
        return out, nsw
    return out


def _run_switches(tt, gen, next_time):
    """Position of a +1-started unit-speed walk given a switching-time rule.

    The k-th holding variable of every sample comes from the k-th vector
    draw, whether or not that sample is still running, so two runs with the
    same stream share their exponentials (common random numbers).
    """
    pos = np.zeros(tt.size)
    now = np.zeros(tt.size)
    sign = np.ones(tt.size)
    nsw = np.zeros(tt.size, dtype=np.int64)
    running = np.ones(tt.size, dtype=bool)
    while running.any():
        e = gen.standard_exponential(tt.size)
        idx = np.flatnonzero(running)
        nxt = next_time(now[idx], e[idx])
        end = np.minimum(nxt, tt[idx])
        pos[idx] += sign[idx] * (end - now[idx])
        now[idx] = end
        switched = nxt < tt[idx]
        sign[idx[switched]] *= -1
        nsw[idx[switched]] += 1
        running[idx[~switched]] = False
    # exact endpoint when nothing switched
    pos[nsw == 0] = tt[nsw == 0]
    return pos, nsw


def sample_telegraph_inhomogeneous(lam, eps, t, rng, size=None, return_switches=False):
    """X_eps(t) = int_0^t (-1)^N(s) ds started upward, N Poisson with rate lam/(s+eps).

    Event times are tau_k = eps (exp(G_k / lam) - 1) with G_k the arrival
    times of a unit Poisson process, i.e. Lambda^{-1}(G_k).
    """
    if not lam >= 0:
        raise DomainError("lambda must be >= 0")
    if not eps > 0:
        raise DomainError("eps must be > 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if size is None:
        size = t.shape
    gen = _gen(rng)
    tt = np.broadcast_to(t, size).astype(float).ravel()

    def next_time(now, e):
        if lam == 0:
            return np.full(now.shape, np.inf)
        # Lambda(now) + e inverted: (now + eps) exp(e / lam) - eps
        return (now + eps) * np.exp(e / lam) - eps

    pos, nsw = _run_switches(tt, gen, next_time)
    if return_switches:
        return pos.reshape(size), nsw.reshape(size)
    return pos.reshape(size)


def sample_halfnormal_clock(t, rng, size=None):
    """|B(t)| with B(t) ~ N(0, 2t): density (pi t)^(-1/2) exp(-z^2 / 4t) on z > 0."""
    if not t > 0:
        raise DomainError("t must be > 0")
    return np.abs(math.sqrt(2.0 * t) * _gen(rng).standard_normal(size))


# -- Monte Carlo harness --------------------------------------------------------------


def _chunk_sizes(n, chunks):
    base, extra = divmod(n, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def _chunk_stats(fn, args, seed, stream_id, m):
    gen = RngStream(seed, stream_id).generator
    vals = np.asarray(fn(gen, m, *args), dtype=float)
    vals = vals.reshape(m, -1)
    mean = vals.mean(axis=0)
    m2 = ((vals - mean) ** 2).sum(axis=0)
    return m, mean, m2


def mc_mean(fn, n, rng: RngStream, args=(), chunks=DEFAULT_CHUNKS, workers=1):
    """Mean and standard error of ``fn(generator, m, *args)`` over ``n`` samples.

    ``fn`` returns an array of shape (m, ...) of per-sample values.  The
    sample is cut into ``chunks`` pieces, each driven by its own child stream
    of ``rng``; chunk statistics are merged in chunk order, so the result is
    bit-identical for any number of ``workers``.
    """
    if n < 2:
        raise DomainError("Monte Carlo needs n >= 2")
    if not isinstance(rng, RngStream):
        raise DomainError("mc_mean needs an RngStream")
    chunks = max(1, min(chunks, n))
    streams = rng.split(chunks)
    sizes = _chunk_sizes(n, chunks)
    jobs = [(fn, args, s.seed, s.stream_id, m) for s, m in zip(streams, sizes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_chunk_stats, *zip(*jobs)))
    else:
        results = [_chunk_stats(*job) for job in jobs]
    # Chan et al. pairwise update, fixed left-to-right order
    count, mean, m2 = results[0]
    for cb, meanb, m2b in results[1:]:
        tot = count + cb
        delta = meanb - mean
        mean = mean + delta * (cb / tot)
        m2 = m2 + m2b + delta * delta * (count * cb / tot)
        count = tot
    var = m2 / (count - 1)
    stderr = np.sqrt(var / count)
    meta = {"chunks": chunks, "chunk_sizes": sizes, "stream_ids": [s.stream_id for s in streams]}
    return MCEstimate(mean, stderr, count, rng.seed, rng.stream_id, meta)


def _mc_collect(fn, n, rng, args=(), chunks=DEFAULT_CHUNKS, workers=1):
    """Concatenated raw samples, chunked like :func:`mc_mean`."""
    chunks = max(1, min(chunks, n))
    streams = rng.split(chunks)
    sizes = _chunk_sizes(n, chunks)
    jobs = [(fn, args, s.seed, s.stream_id, m) for s, m in zip(streams, sizes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk_raw, *zip(*jobs)))
    else:
        parts = [_chunk_raw(*job) for job in jobs]
    return parts


def _chunk_raw(fn, args, seed, stream_id, m):
    return fn(RngStream(seed, stream_id).generator, m, *args)


@dataclass
class Histogram:
    """Binned density of a sample plus separately tracked point masses."""

    edges: np.ndarray
    density: np.ndarray
    stderr: np.ndarray
    n: int
    atom_mass: float = 0.0
    atom_stderr: float = 0.0
    samples: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def histogram_density(samples, bins="fd", atom_mask=None, keep_samples=False):
    """Density histogram; ``bins="fd"`` uses the Freedman-Diaconis rule.

    Samples flagged by ``atom_mask`` are counted as a point-mass component:
    their fraction is reported as ``atom_mass`` and they are left out of the
    binned density (which then integrates to 1 - atom_mass).
    """
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if atom_mask is None:
        atom_mask = np.zeros(n, dtype=bool)
    atom_mask = np.asarray(atom_mask, dtype=bool).ravel()
    cont = x[~atom_mask]
    edges = np.histogram_bin_edges(x, bins=bins)
    counts, edges = np.histogram(cont, bins=edges)
    width = np.diff(edges)
    p = counts / n
    density = p / width
    stderr = np.sqrt(p * (1 - p) / n) / width
    q = atom_mask.mean()
    return Histogram(
        edges,
        density,
        stderr,
        n,
        float(q),
        float(math.sqrt(q * (1 - q) / n)),
        x.copy() if keep_samples else None,
    )


# -- solution estimators ---------------------------------------------------------------


def _telegraph_chunk(gen, m, p, kind, f, grid, d, t, tol_L):
    L = sample_inverse_L(p, t, gen, tol_L=tol_L, size=m)
    X = sample_process(kind, L, gen)
    if d == 1:
        return f(grid[None, :] + X[:, 0:1], 1)
    shifted = X[:, None, :].copy()
    shifted[..., 0] += grid[None, :]
    radius = np.sqrt(np.sum(shifted**2, axis=-1))
    return f(radius, d)


def _telegraph_positions(gen, m, p, kind, t, tol_L):
    L = sample_inverse_L(p, t, gen, tol_L=tol_L, size=m)
    return sample_process(kind, L, gen)[:, 0]


def mc_solve_telegraph(p: FracParams, sym, f, grid, t, n, rng: RngStream, d=1, tol_L=TOL_L,
                       chunks=DEFAULT_CHUNKS, workers=1, bins="fd"):
    """Monte Carlo solution E f(x + X(L(t))) of the fractional telegraph equation.

    For pointwise data returns an :class:`MCEstimate` over ``grid`` (radii for
    d >= 2, data radial).  For delta data returns a :class:`Histogram` of
    X(L(t)) (d = 1) using ``bins``.
    """
    _check_inverse_params(p)
    if not t >= 0:
        raise DomainError("t must be >= 0")
    kind = process_for_symbol(sym, d)
    if isinstance(f, Delta):
        if d != 1:
            raise DomainError("histogram mode is one-dimensional")
        if t == 0:
            raise DomainError("delta data has no density at t = 0")
        parts = _mc_collect(_telegraph_positions, n, rng, (p, kind, t, tol_L), chunks, workers)
        return histogram_density(np.concatenate(parts), bins=bins)
    grid = np.asarray(grid, dtype=float)
    if t == 0:
        vals = np.asarray(f(grid, d), dtype=float)
        return MCEstimate(vals, np.zeros_like(vals), n, rng.seed, rng.stream_id)
    est = mc_mean(_telegraph_chunk, n, rng, (p, kind, f, grid, d, t, tol_L), chunks, workers)
    est.meta.update({"tol_L": tol_L, "inverse_L_method": "marginal"})
    return est


def _halftime_chunk(gen, m, lam, t):
    z = sample_halfnormal_clock(t, gen, m)
    x, nsw = sample_telegraph(lam, z, gen, return_switches=True)
    return np.stack([x, (nsw == 0).astype(float)], axis=1)


def mc_solve_halftime(lam, t, n, rng: RngStream, bins="fd", chunks=DEFAULT_CHUNKS, workers=1,
                      keep_samples=True):
    """Histogram of T(|B(t)|): telegraph position after the half-normal time |B(t)|.

    Samples with no switch are the no-switch component; its empirical mass is
    ``atom_mass`` (analytic value e^{lam^2 t} erfc(lam sqrt t)).
    """
    if not t > 0:
        raise DomainError("t must be > 0")
    parts = _mc_collect(_halftime_chunk, n, rng, (lam, t), chunks, workers)
    data = np.concatenate(parts)
    hist = histogram_density(data[:, 0], bins=bins, keep_samples=keep_samples)
    q = data[:, 1].mean()
    hist.atom_mass = float(q)
    hist.atom_stderr = float(math.sqrt(q * (1 - q) / n))
    hist.meta["atom_mass_meaning"] = "fraction of samples with no switch"
    return hist
