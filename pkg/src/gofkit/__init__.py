"""Kernel-embedding goodness-of-fit tests: MMD, moderated MMD and an
adaptive max-over-grid variant, plus spectral kernel machinery, null
calibration, alternative samplers and a replication harness."""

from .calibrate import (
    NullCalibration,
    chisq_mix_quantile,
    empirical_null_quantile,
    normal_calibration,
    normal_quantile,
)
from .dists import (
    AlternativeSpec,
    chi_square_divergence,
    density,
    least_favorable,
    null_sampler,
    sample,
)
from .embedding import (
    AdaptiveStat,
    RhoGrid,
    Sample,
    TestReport,
    adaptive_grid,
    adaptive_stat,
    eta_sq,
    eta_sq_gram,
    mmd_vstat,
    rho_schedule,
    run_test,
    studentized_stat,
    theory_threshold,
)
from .spectrum import (
    DecompositionError,
    ModeratedSpectrum,
    NystromBasis,
    PowerLawTail,
    Quadrature,
    SampleSummary,
    SpectralBasis,
    SphereZonalBasis,
    cosine_basis,
    effective_variance,
    estimate_decay_exponent,
    gauss_legendre_01,
    load_spectrum,
    monte_carlo_quadrature,
    nystrom_decompose,
    save_spectrum,
    sphere_zonal_spectrum,
    tensor_product_basis,
)

__version__ = "1.0.0"

__all__ = [
    "AdaptiveStat",
    "AlternativeSpec",
    "DecompositionError",
    "ModeratedSpectrum",
    "NullCalibration",
    "NystromBasis",
    "PowerLawTail",
    "Quadrature",
    "RhoGrid",
    "Sample",
    "SampleSummary",
    "SpectralBasis",
    "SphereZonalBasis",
    "TestReport",
    "adaptive_grid",
    "adaptive_stat",
    "chi_square_divergence",
    "chisq_mix_quantile",
    "cosine_basis",
    "density",
    "effective_variance",
    "empirical_null_quantile",
    "estimate_decay_exponent",
    "eta_sq",
    "eta_sq_gram",
    "gauss_legendre_01",
    "least_favorable",
    "load_spectrum",
    "mmd_vstat",
    "monte_carlo_quadrature",
    "normal_calibration",
    "normal_quantile",
    "null_sampler",
    "nystrom_decompose",
    "rho_schedule",
    "run_test",
    "sample",
    "save_spectrum",
    "sphere_zonal_spectrum",
    "studentized_stat",
    "tensor_product_basis",
    "theory_threshold",
]
