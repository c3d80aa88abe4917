"""An electorate placed on a social network, plus the message strength."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError
from .model import delta_mov, influence_voters, tally


@dataclass(frozen=True, eq=False)
class Scenario:
    electorate: object
    network: object
    delta: float

    def __post_init__(self):
        if self.network.n != self.electorate.n_voters:
            raise ConfigurationError(
                f"network has {self.network.n} nodes but electorate has {self.electorate.n_voters} voters"
            )
        if not 0 < self.delta <= 2:
            raise ConfigurationError(f"delta must lie in (0, 2], got {self.delta}")

    @property
    def target(self):
        return self.electorate.target

    def with_electorate(self, electorate):
        return Scenario(electorate, self.network, self.delta)

    def influenced(self, activated):
        """Electorate after every voter in ``activated`` receives the message."""
        return influence_voters(self.electorate, activated, self.delta)

    def dmov_of(self, activated):
        before = tally(self.electorate)
        after = tally(self.influenced(activated))
        return delta_mov(before, after, self.target)
