"""fitland: a sandbox for benchmarking model-guided sequence design
algorithms on simulated fitness landscapes under strict query budgets."""

__version__ = "0.1.0"

from .seqs import (
    DNA,
    PROTEIN,
    RNA,
    Alphabet,
    Sequence,
    hamming_distance,
    mutate,
    random_sequence,
    recombine,
    reverse_complement,
    single_point_neighbors,
)
from .landscapes import (
    ConstantLandscape,
    Landscape,
    LocalOptimaSet,
    RnaBindingLandscape,
    SwamplandLandscape,
    TabulatedLandscape,
    TFBindingLandscape,
    duplex_score,
    enumerate_local_optima,
    load_tf_landscape,
    make_rna_landscape,
    make_swampland,
    path_tour,
    synth_tf_landscape,
)
from .surrogates import (
    AdaptiveEnsemble,
    KnnModel,
    MeasuredData,
    NoisyAbstractModel,
    NullModel,
    RidgeModel,
    SurrogateModel,
    fit_knn,
    fit_ridge,
    r2_score,
)
from .explorers import (
    AdaleadExplorer,
    BoEvoExplorer,
    CbasExplorer,
    CmaesExplorer,
    DbasExplorer,
    ExplorationBudget,
    Explorer,
    MeteredModel,
    PwmGenerator,
    WrightFisherExplorer,
    acquisition_ei,
    acquisition_ucb,
    adalead_seeds,
    cbas_weights,
    fit_pwm,
    rollout,
)
from .config import RunConfig, load_config, parse_config
from .harness import (
    RoundRecord,
    RunLog,
    metric_count_above,
    metric_cummax,
    metric_max_hits,
    metric_optima_found,
    run_experiment,
    sweep_alpha,
)
from .errors import BudgetExceededError, ConfigError, ContractViolationError
