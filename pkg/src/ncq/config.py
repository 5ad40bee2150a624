"""Run-wide numerical tolerances and resource limits."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class RunConfig:
    """Tolerances and limits shared by every stage of the pipeline.

    All tolerances are absolute.  ``null_tol`` of ``None`` means the
    rank threshold is derived from the data as
    ``sigma_max * max(matrix dims) * null_rcond``.
    """

    herm_tol: float = 1e-12        # Hermiticity / reconstruction checks
    psd_tol: float = 1e-10         # minimum-eigenvalue slack for PSD checks
    null_rcond: float = 1e-10      # relative singular-value cutoff for null spaces
    null_tol: float | None = None  # absolute override for the null-space cutoff
    vert_tol: float = 1e-9         # constraint slack for enumerated vertices
    dedup_tol: float = 1e-8        # L-infinity distance below which vertices merge
    verdict_tol: float = 1e-7      # classical/nonclassical guard band
    cert_tol: float = 1e-7         # certificate re-verification slack
    wit_tol: float = 1e-9          # witness-violation threshold
    solver_eps: float = 1e-9       # target KKT/feasibility accuracy for solvers
    max_iters: int | None = None   # solver iteration cap (None = backend default)
    enum_cap: int = 10_000_000     # max candidate bases in vertex enumeration
    jobs: int = 1                  # worker processes for sweeps
    output_format: str = "text"    # "text" or "json"

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("null_tol", "max_iters") and value is None:
                continue
            if f.name == "output_format":
                if value not in ("text", "json"):
                    raise ValueError(f"output_format must be 'text' or 'json', got {value!r}")
                continue
            if value <= 0:
                raise ValueError(f"{f.name} must be positive, got {value!r}")

    def replace(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Build a config honouring NCQ_SOLVER_EPS / NCQ_JOBS / NCQ_MAX_ITERS."""
        env: dict = {}
        if "NCQ_SOLVER_EPS" in os.environ:
            env["solver_eps"] = float(os.environ["NCQ_SOLVER_EPS"])
        if "NCQ_JOBS" in os.environ:
            env["jobs"] = int(os.environ["NCQ_JOBS"])
        if "NCQ_MAX_ITERS" in os.environ:
            env["max_iters"] = int(os.environ["NCQ_MAX_ITERS"])
        env.update(overrides)
        return cls(**env)


DEFAULT_CONFIG = RunConfig()
