"""Isotropic Fourier symbols m(|xi|) of the spatial operator, the telegraph
parameters, and the Levy process attached to each symbol.

Every symbol carries the convention that its heat semigroup is
exp(-t m(|xi|)); the matching process therefore has characteristic function
exp(-t m(|xi|)).  For the Laplacian that is Brownian motion run at twice the
standard clock, B(2t).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from fractel.errors import DomainError, UnsupportedError

__all__ = [
    "FracParams",
    "Laplacian",
    "FractionalLaplacian",
    "BesselRiesz",
    "Relativistic",
    "SpectralSymbol",
    "evaluate_symbol",
    "symbol_from_dict",
    "BrownianMotion",
    "IsotropicStableProcess",
    "BesselRieszProcess",
    "RelativisticProcess",
    "TelegraphProcess",
    "InhomTelegraphProcess",
    "ProcessKind",
    "process_for_symbol",
]


@dataclass(frozen=True)
class FracParams:
    """Order ``alpha`` in (0, 1] and damping ``lam`` > 0 of the fractional
    telegraph equation."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be > 0, got {self.lam}")

    @property
    def stochastic_regime(self) -> bool:
        """True when alpha <= 1/2, where the inverse-clock representation holds."""
        return self.alpha <= 0.5


def _radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(np.isnan(r)):
        raise DomainError("r must not be NaN")
    if np.any(r < 0):
        raise DomainError("symbol argument r must be >= 0")
    return r


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class Laplacian:
    kind = "laplacian"

    def __call__(self, r):
        r = _radius(r)
        return _out(r * r)

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class FractionalLaplacian:
    beta: float

    kind = "fractional_laplacian"

    def __post_init__(self):
        if not (0.0 < self.beta <= 2.0):
            raise DomainError(f"fractional Laplacian beta must lie in (0, 2], got {self.beta}")

    def __call__(self, r):
        r = _radius(r)
        return _out(r**self.beta)

    def to_dict(self):
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class BesselRiesz:
    beta: float
    gamma: float

    kind = "bessel_riesz"

    def __post_init__(self):
        if not (0.0 < self.beta <= 2.0):
            raise DomainError(f"Bessel-Riesz beta must lie in (0, 2], got {self.beta}")
        if not self.gamma >= 0.0:
            raise DomainError(f"Bessel-Riesz gamma must be >= 0, got {self.gamma}")

    @property
    def has_sampler(self) -> bool:
        """The subordinated-Brownian representation needs beta + gamma <= 2."""
        return self.beta + self.gamma <= 2.0

    def __call__(self, r):
        r = _radius(r)
        return _out(r**self.beta * (1.0 + r * r) ** (0.5 * self.gamma))

    def to_dict(self):
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Relativistic:
    """theta(r) = (mass^(2/nu) + r^2)^(nu/2) - mass."""

    nu: float
    mass: float

    kind = "relativistic"

    def __post_init__(self):
        if not (0.0 < self.nu < 2.0):
            raise DomainError(f"relativistic nu must lie in (0, 2), got {self.nu}")
        if not self.mass > 0.0:
            raise DomainError(f"relativistic mass must be > 0, got {self.mass}")

    @property
    def outside_proposition_range(self) -> bool:
        # the telegraph-type relativistic result is stated for nu in (0, 1]
        return self.nu > 1.0

    def __call__(self, r):
        r = _radius(r)
        c = self.mass ** (2.0 / self.nu)
        # (c + r^2)^(nu/2) - c^(nu/2) written to avoid cancellation at small r
        x = r * r / c
        val = self.mass * np.expm1(0.5 * self.nu * np.log1p(x))
        return _out(val)

    def to_dict(self):
        return {"kind": self.kind, **asdict(self)}


SpectralSymbol = Laplacian | FractionalLaplacian | BesselRiesz | Relativistic

_SYMBOLS = {cls.kind: cls for cls in (Laplacian, FractionalLaplacian, BesselRiesz, Relativistic)}


def evaluate_symbol(sym: SpectralSymbol, r):
    """m(r) for the given symbol; vectorised over ``r``."""
    return sym(r)


def symbol_from_dict(d: dict) -> SpectralSymbol:
    d = dict(d)
    try:
        cls = _SYMBOLS[d.pop("kind")]
    except KeyError as exc:
        raise DomainError(f"unknown symbol kind {exc.args[0]!r}") from None
    try:
        return cls(**d)
    except TypeError as exc:
        raise DomainError(str(exc)) from None


# -- processes ---------------------------------------------------------------


@dataclass(frozen=True)
class BrownianMotion:
    d: int = 1


@dataclass(frozen=True)
class IsotropicStableProcess:
    d: int
    beta: float


@dataclass(frozen=True)
class BesselRieszProcess:
    d: int
    beta: float
    gamma: float

    def __post_init__(self):
        if self.beta + self.gamma > 2.0:
            raise UnsupportedError("Bessel-Riesz sampler requires beta + gamma <= 2")


@dataclass(frozen=True)
class RelativisticProcess:
    d: int
    nu: float
    mass: float


@dataclass(frozen=True)
class TelegraphProcess:
    lam: float


@dataclass(frozen=True)
class InhomTelegraphProcess:
    lam: float
    eps: float


ProcessKind = (
    BrownianMotion
    | IsotropicStableProcess
    | BesselRieszProcess
    | RelativisticProcess
    | TelegraphProcess
    | InhomTelegraphProcess
)


def process_for_symbol(sym: SpectralSymbol, d: int = 1) -> ProcessKind:
    """The Markov process generated by -A for the symbol ``sym`` in R^d."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if isinstance(sym, Laplacian):
        return BrownianMotion(d)
    if isinstance(sym, FractionalLaplacian):
        if sym.beta == 2.0:
            return BrownianMotion(d)
        return IsotropicStableProcess(d, sym.beta)
    if isinstance(sym, BesselRiesz):
        if not sym.has_sampler:
            raise UnsupportedError(
                f"no sampler for Bessel-Riesz with beta + gamma = {sym.beta + sym.gamma} > 2"
            )
        return BesselRieszProcess(d, sym.beta, sym.gamma)
    if isinstance(sym, Relativistic):
        return RelativisticProcess(d, sym.nu, sym.mass)
    raise UnsupportedError(f"unsupported symbol {sym!r}")
