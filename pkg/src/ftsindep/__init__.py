"""Independence testing between two functional time series.

A library and CLI for the portmanteau-style test that accumulates squared
norms of sample cross-covariance surfaces over a lag window, normalizes
them with kernel estimates of the centering and long-run scale, and refers
the result to a standard normal.  Includes the Brownian-motion and
functional-AR(1) simulation study and the cumulative-intraday-return data
pipeline.
"""

from .backend import active_backend, have_compiled
from .cidr import (
    CidrSample,
    PairwiseReport,
    PriceDay,
    PricePanel,
    build_cidr_sample,
    cidr_transform,
    pairwise_matrix,
    parse_price_csv,
    resample_to_grid,
)
from .covariance import (
    CovSurface,
    autocov_surface,
    cross_cov_surface,
    gram_of_autocov_surfaces,
    integrated_autocov,
    integrated_sq_cross_cov,
    save_surface_csv,
)
from .errors import (
    AlignmentError,
    DaySkipped,
    DegenerateVariance,
    FtsError,
    GridMismatch,
    HorizonTooLarge,
    InvalidGrid,
    InvalidHorizon,
    InvalidPrice,
    LengthMismatch,
    NonStationaryKernel,
    ParseError,
)
from .functional import (
    FunctionalSample,
    GramMatrix,
    Grid,
    center,
    gram_matrix,
    inner_product,
    load_sample_csv,
    make_uniform_grid,
    sample_csv_text,
    save_sample_csv,
)
from .simulate import (
    DgpSpec,
    McReport,
    apply_psi,
    brownian_motion_path,
    far1_sample,
    iid_bm_sample,
    psi_hs_norm,
    run_monte_carlo,
    simulate_sample,
)
from .statistic import (
    KernelSpec,
    TestConfig,
    TestResult,
    compute_t_stat,
    estimate_mu,
    estimate_sigma2,
    estimate_tau,
    independence_test,
    kernel_eval,
    std_normal_cdf,
)

__version__ = "0.1.0"
