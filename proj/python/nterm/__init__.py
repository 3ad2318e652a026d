"""Best n-term widths of diagonal operators between sequence spaces."""

from ._nterm import (
    DivergenceError,
    DomainError,
    Error,
    ScanBudgetExceeded,
    Sequence,
    ToleranceUnreachable,
    WeightFamily,
    best_n_term_error,
    energy_S,
    extremal_vector,
    find_nlowerstar,
    find_nstar,
    finite,
    geometric,
    maximize_small,
    mix_reference_constant,
    power_log,
    predicted_constant,
    rearranged,
    sample_ball,
    sigma,
    sigma_finite,
    specialized_constant,
)

__version__ = "0.1.0"
