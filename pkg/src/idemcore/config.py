"""Budgets for the exhaustive algorithms.

Exceeding a budget raises :class:`~idemcore.errors.BudgetExceeded`; nothing is
silently truncated.  Values can be overridden per problem file (``budgets``
section) or by constructing a :class:`Budgets` directly.
"""

from dataclasses import asdict, dataclass, replace
import os


@dataclass(frozen=True)
class Budgets:
    # fincat
    reflective_max_objects: int = 8
    reflective_max_morphisms: int = 40
    monad_enum_max_morphisms: int = 24
    # presheaf
    base_max_objects: int = 3
    base_max_morphisms: int = 6
    carrier_max: int = 4
    exponential_max_elements: int = 10_000
    hom_max_maps: int = 200_000
    # lttop
    sweep_bound: int = 3
    pair_bound: int = 2
    dd_eta_carrier_max: int = 3

    def with_overrides(self, overrides):
        unknown = set(overrides) - set(asdict(self))
        if unknown:
            raise ValueError(f"unknown budget keys: {sorted(unknown)}")
        return replace(self, **overrides)

    def as_dict(self):
        return asdict(self)


DEFAULT_BUDGETS = Budgets()


def parallelism():
    """Degree of parallelism requested through ``IDEMCORE_JOBS`` (default 1)."""
    raw = os.environ.get("IDEMCORE_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
