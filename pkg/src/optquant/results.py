"""Result containers returned by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Candidate:
    """One candidate configuration considered by a driver."""

    label: str
    value: float
    sites: tuple = ()


@dataclass(frozen=True)
class SolveReport:
    """Best configuration found plus the method trail.

    ``candidates`` lists every generator's optimum so symmetric-family
    competitions can be read off directly.  ``oracle_delta`` is the gap to
    the tabulated reference value when one exists for (support, n).
    """

    best: object            # Configuration (2D) or Config1D
    value: float
    method: str
    starts_used: int = 1
    iterations: int = 0
    seed: int | None = None
    candidates: tuple = ()
    conjecture_conditional: bool = False
    oracle_delta: float | None = None
    converged: bool = True
    diverged: bool = False
    final_amplitude: float | None = None
    family_parameters: tuple = ()

    def candidate_values(self) -> dict:
        return {c.label: c.value for c in self.candidates}
