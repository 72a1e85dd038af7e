"""Exponential sums over orbits of matrix groups on F_p^d, with exact verifiers
for the spectral and affine-growth inequalities built on them."""
from .affine import (
    AffineSet,
    BlockView,
    GrowthReport,
    IterationSchedule,
    PairCertificate,
    TranslateUnion,
    aff_set_algebra,
    block_observations_check,
    blocks_lemma_check,
    build_A_alpha,
    growth_report,
    iteration_schedule,
    power_set,
    product_set,
    prop_p_iteration,
    restricted_product,
    semidirect,
    stab_lemma_check,
    symmetrize,
    translate_union_check,
)
from .fourier import (
    ConcentrationReport,
    Spectrum,
    SpectrumField,
    dft_full,
    exp_sum,
    max_nonzero_ratio,
    spec_alpha,
    spec_difference_check,
    subspace_concentration_check,
)
from .fp import (
    AffineHyperplane,
    CapExceeded,
    FpMatrix,
    FpVector,
    PointSet,
    PrimeModulus,
    Subspace,
    coset_reps,
    hyperplane_enumerate,
    mat_ops,
    perp,
    span,
)
from .groups import (
    AffineElement,
    InstanceProfile,
    MatrixGroup,
    OrbitSet,
    close_generators,
    commutator,
    hyperplane_profile,
    lower_central_probe,
    orbit,
    stab_chain_check,
    stabilizer,
)
from .lab import InstanceConfig, SweepResult, gen_instance, run_sweep, verify_all
from .reports import CheckReport

__version__ = "0.1.0"
