"""svoltails: densities, tail asymptotics and smiles for uncorrelated Stein-Stein and Heston models."""

__version__ = "0.1.0"

from .asymptotics import (
    HestonMixingConstants,
    LtiInputs,
    SmileCoeffs,
    SteinMixingConstants,
    StockTailConstants,
    heston_mixing_constants,
    heston_mixing_constants_b0,
    heston_stock_constants,
    into_leading_term,
    lti_leading_term,
    mixing_tail_eval,
    moment_window,
    smile_coeffs,
    smile_eval,
    stein_mixing_constants,
    stein_stock_constants,
    stock_tail_eval,
)
from .densities import (
    DensityGrid,
    QuadratureError,
    call_price,
    integrated_variance_density,
    mixing_density,
    mixing_density_grid,
    stock_density,
    stock_density_grid,
)
from .montecarlo import (
    McConfig,
    McSample,
    ks_distance,
    simulate_cir_alpha,
    simulate_ou_alpha,
    simulate_stock,
)
from .params import HestonParams, SteinSteinParams
from .pricing import OptionSpec, SmilePoint, bs_call, implied_vol, model_smile
from .roots import RootQuery, phi, phi_derivatives, smallest_root
from .transforms import (
    TransformDomain,
    besq_integrated_laplace,
    char_fn,
    cir_integrated_laplace,
    ou2_integrated_laplace,
    transform_domain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
