"""Finite substochastic kernels with copy/discard/compare structure.

The package bundles: the concrete kernel calculus (`kernel`), probabilistic
reasoning on top of it (`inference`), the bridge through total kernels and
the maybe monad (`maybecat`), a string-diagram term language with a parser
and evaluator (`diagram`), normal forms for exact observations (`exactnf`),
a 1-D continuous posterior pipeline (`density`), randomized law suites
(`laws`) and a command-line front end (`cli`).
"""

from .kernel import (
    Atom,
    FinObject,
    SubKernel,
    SubState,
    Tolerances,
    UNIT,
    CompositionError,
    KernelError,
    ValidationError,
    as_equal,
    compare,
    compose,
    cond_comp,
    copy,
    deterministic,
    dirac,
    discard,
    domain_of_definition,
    from_rows,
    graph,
    has_deterministic_domain,
    identity,
    is_deterministic,
    is_total,
    observe,
    project,
    scalar,
    state,
    swap,
    tensor,
)
from .inference import (
    Convention,
    SupportError,
    bayes_invert,
    conditional,
    jeffrey_update,
    kl_divergence,
    normalize,
    pearl_update,
    validity,
)
from .maybecat import (
    BOT,
    TotalKernel,
    as_total,
    conditional_via_base,
    distributive_law,
    from_total,
    laxator,
    oplaxator,
    pointed,
    split_conditional,
    stoch_conditional,
    strong_kleisli_extend,
    to_total,
)
from .diagram import (
    DiagramTypeError,
    Model,
    ParseError,
    Term,
    evaluate,
    parse,
    typecheck,
)
from .exactnf import NonTotalGeneratorError, NormalForm, from_term
from .density import (
    DensityError,
    GridDensity,
    Normal,
    NormalMeanChannel,
    QuadratureSpec,
    Uniform,
    ZeroEvidenceError,
    emit_posterior_csv,
    evidence_density,
    posterior_exact,
    simpson,
    truncated_normal_oracle,
)
from .laws import LawResult, run_all

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
