"""Time-fractional telegraph and Euler-Poisson-Darboux equations for isotropic
Fourier multipliers, solved by analytic, Laplace-domain and Monte Carlo routes."""

__version__ = "0.1.0"

from fractel.errors import (  # noqa: E402
    AccuracyError,
    BudgetError,
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    FractelError,
    UnsupportedError,
)
from fractel.specfun import MLQuery, mittag_leffler  # noqa: E402
from fractel.symbols import (  # noqa: E402
    BesselRiesz,
    FracParams,
    FractionalLaplacian,
    Laplacian,
    Relativistic,
    evaluate_symbol,
    process_for_symbol,
)
from fractel.fields import (  # noqa: E402
    Delta,
    Gaussian,
    Indicator,
    SolutionField,
    Tabulated,
    read_field_csv,
    write_field_csv,
)
from fractel.analytic import char_roots, phi_hat, phi_hat_laplace, solve_telegraph  # noqa: E402
from fractel.epd import EpdParams, epd_hat_bessel, solve_epd, solve_epd_series  # noqa: E402
from fractel.stochastic import MCEstimate, RngStream, mc_solve_telegraph, sample_inverse_L  # noqa: E402
from fractel.numlab import numeric_laplace, talbot_invert  # noqa: E402

__all__ = [
    "__version__",
    "FractelError",
    "DomainError",
    "AccuracyError",
    "ConvergenceError",
    "BudgetError",
    "UnsupportedError",
    "DimensionError",
    "ConfigError",
    "MLQuery",
    "mittag_leffler",
    "FracParams",
    "Laplacian",
    "FractionalLaplacian",
    "BesselRiesz",
    "Relativistic",
    "evaluate_symbol",
    "process_for_symbol",
    "Delta",
    "Gaussian",
    "Indicator",
    "Tabulated",
    "SolutionField",
    "write_field_csv",
    "read_field_csv",
    "char_roots",
    "phi_hat",
    "phi_hat_laplace",
    "solve_telegraph",
    "EpdParams",
    "epd_hat_bessel",
    "solve_epd",
    "solve_epd_series",
    "RngStream",
    "MCEstimate",
    "sample_inverse_L",
    "mc_solve_telegraph",
    "numeric_laplace",
    "talbot_invert",
]
