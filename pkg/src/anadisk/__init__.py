"""Numerical laboratory for sequences of analytic disks in C^n."""
from .disk import (
    AnalyticMap,
    AnnulusSum,
    BlaschkePrecompose,
    BoundaryGrid,
    MoebiusPrecompose,
    Polynomial,
    StripExpPrecompose,
    blaschke,
    bloch_norm,
    from_dict,
    from_json,
    moebius,
    strip_exp,
    sup_norm,
)
from .errors import AnadiskError
from .measures import (
    EmpiricalMeasure,
    MomentVector,
    PshTestFunction,
    center,
    jensen_check,
    mixture,
    moments,
    pushforward,
    random_bremermann,
    weak_distance,
)
from .polynomial import MultiPoly

__version__ = "0.1.0"
