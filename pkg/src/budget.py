"""
Fuel accounting for semidecisions and searches.

One unit of fuel is one stage of a semidecision or one candidate examined
by a search. Exhaustion raises SearchTimeout; semideciders catch it and
answer Verdict.TIMEOUT, searches let it propagate to the driver.

A search that refutes every candidate it is allowed to try while fuel
remains raises CertificationError instead, naming the predicate that
failed and the precision it was tried to.
"""

import enum
import logging
import threading

log = logging.getLogger(__name__)


class Verdict(enum.Enum):
    YES = "YES"
    TIMEOUT = "TIMEOUT"


class SearchTimeout(Exception):
    """Raised when a Fuel budget runs out."""

    def __init__(self, stage: str, spent: int, partial=None):
        super().__init__(f"fuel exhausted during {stage} after {spent} units")
        self.stage = stage
        self.spent = spent
        self.partial = partial


class CertificationError(Exception):
    """Raised when a certificate fails at every precision a search may try, with fuel left."""

    def __init__(self, stage: str, predicate: str, precision: int, partial=None):
        super().__init__(f"{stage}: could not certify {predicate} up to precision 2^-{precision}")
        self.stage = stage
        self.predicate = predicate
        self.precision = precision
        self.partial = partial


class Fuel:
    """Thread-safe fuel counter shared by every search of one run."""

    def __init__(self, budget: int):
        if budget < 0:
            raise ValueError(f"fuel budget must be a natural, got {budget}")
        self.budget = budget
        self.spent = 0
        self._lock = threading.Lock()

    @property
    def remaining(self) -> int:
        return self.budget - self.spent

    def spend(self, n: int = 1, stage: str = "search") -> None:
        with self._lock:
            if self.spent + n > self.budget:
                log.debug("Fuel exhausted in %s (%d/%d)", stage, self.spent, self.budget)
                raise SearchTimeout(stage, self.spent)
            self.spent += n

    def __repr__(self) -> str:
        return f"Fuel(spent={self.spent}, budget={self.budget})"


def as_fuel(fuel) -> Fuel:
    """Coerce an int budget to a fresh Fuel; Fuel instances pass through."""
    if isinstance(fuel, Fuel):
        return fuel
    if isinstance(fuel, bool) or not isinstance(fuel, int):
        raise ValueError(f"fuel must be an int or a Fuel, got {fuel!r}")
    return Fuel(fuel)


def search_failure(fuel: Fuel, stage: str, predicate: str, precision: int, partial=None) -> Exception:
    """The exception for a search that found nothing: SearchTimeout if the fuel is gone."""
    if fuel.remaining <= 0:
        return SearchTimeout(stage, fuel.spent, partial=partial)
    log.debug("%s refuted %s up to 2^-%d with %d fuel left", stage, predicate, precision, fuel.remaining)
    return CertificationError(stage, predicate, precision, partial=partial)
