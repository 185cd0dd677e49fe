"""Index computations for Morse-Sturm systems with symmetric boundary data."""

import json

from ._msturm import (
    AllTrialsDegenerate,
    CurvatureAsymmetry,
    DegenerateFocalInstant,
    DegenerateMetric,
    EmptyKernel,
    EndpointFocal,
    Inertia,
    IntegrationFailure,
    InvalidSubspace,
    LeftChart,
    MissingSeed,
    MsturmError,
    NoAgreement,
    NotStabilized,
    NotTimelike,
    ParseError,
    PerturbationBrokeInvariant,
    PreconditionError,
    Problem,
    SchemaError,
    Tolerances,
    UnresolvedRoot,
    ValidationFailed,
    chart_names,
    fixtures,
    index_evolution,
    inertia,
    load,
    maslov,
    scan_focal,
    trivialize,
)
from ._msturm import _verify_json


def verify(problem, tol=None, seed=0):
    """Run the index check and return the report as a dict."""
    return json.loads(_verify_json(problem, tol if tol is not None else Tolerances(), seed))


__all__ = [name for name in dir() if not name.startswith("_")]
