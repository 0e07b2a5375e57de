"""Monte Carlo simulation of BB84 under the conclusive entangling-probe attack.

The probe is modelled at the level of its conditional post-measurement
states.  In every round Alice sends a random bit in a random basis.  Read in
the matching basis, the signal is flipped with probability ``E``; the probe
is then left in the error state ``alpha``, otherwise in ``alpha_plus`` or
``alpha_minus`` according to the bit.  Bob's basis choice cannot change the
probe's marginal state, so Eve's measurement statistics are the same for
sifted and unsifted rounds.  Only the sifted ones become meaningful after the
bases are announced.

Eve either measures her probe projectively or with the POVM receiver.  With
the conclusive-only relay she forwards a photon only when her POVM result is
conclusive, so the inconclusive rounds look like channel loss to Bob.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import streams
from .discrimination import (
    Outcome,
    build_povm,
    categorical,
    outcome_probabilities,
    projective_probability,
    renyi_plugin,
)
from .probe_model import (
    DomainError,
    ErrorRate,
    InconclusiveRate,
    ProbeVector,
    alpha_error,
    alpha_minus,
    alpha_plus,
    error_from_inconclusive,
    inconclusive_from_error,
    state_A2_of_Rq,
)

PAIR_TOL = 1e-12
DEFAULT_CHUNK = 1 << 16


class MeasurementMode(str, enum.Enum):
    PROJECTIVE = "projective"
    POVM = "povm"


class RelayStrategy(str, enum.Enum):
    RELAY_ALL = "all"
    CONCLUSIVE_ONLY = "conclusive-only"


@dataclass(frozen=True)
class ProtocolConfig:
    """One attack run.  Build with :meth:`from_error_rate` or :meth:`from_inconclusive_rate`."""

    error_rate: float
    inconclusive_rate: float
    trials: int
    seed: int = 0
    measurement_mode: MeasurementMode = MeasurementMode.PROJECTIVE
    channel_loss: float = 0.0
    relay_strategy: RelayStrategy = RelayStrategy.RELAY_ALL
    parameter: str = "error_rate"
    probe_initial_state: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "error_rate", float(ErrorRate(self.error_rate)))
        object.__setattr__(self, "inconclusive_rate", float(InconclusiveRate(self.inconclusive_rate)))
        object.__setattr__(self, "measurement_mode", MeasurementMode(self.measurement_mode))
        object.__setattr__(self, "relay_strategy", RelayStrategy(self.relay_strategy))
        if abs(error_from_inconclusive(self.inconclusive_rate) - self.error_rate) > PAIR_TOL:
            raise DomainError(
                f"error rate {self.error_rate} and inconclusive rate "
                f"{self.inconclusive_rate} violate E = (1 - R?)/(3 - R?)"
            )
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        streams._check_seed(self.seed)
        if not 0.0 <= self.channel_loss <= 1.0:
            raise DomainError(f"channel loss must lie in [0, 1], got {self.channel_loss!r}")
        if (
            self.relay_strategy is RelayStrategy.CONCLUSIVE_ONLY
            and self.measurement_mode is not MeasurementMode.POVM
        ):
            raise ValueError("conclusive-only relay requires the povm measurement mode")
        if self.parameter not in ("error_rate", "inconclusive_rate"):
            raise ValueError(f"unknown parameter name {self.parameter!r}")

    @classmethod
    def from_error_rate(cls, E: float, trials: int, **kwargs) -> "ProtocolConfig":
        E = ErrorRate(E)
        return cls(float(E), float(inconclusive_from_error(E)), trials, parameter="error_rate", **kwargs)

    @classmethod
    def from_inconclusive_rate(cls, Rq: float, trials: int, **kwargs) -> "ProtocolConfig":
        Rq = InconclusiveRate(Rq)
        return cls(float(error_from_inconclusive(Rq)), float(Rq), trials, parameter="inconclusive_rate", **kwargs)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["measurement_mode"] = self.measurement_mode.value
        d["relay_strategy"] = self.relay_strategy.value
        if self.probe_initial_state is not None:
            d["probe_initial_state"] = list(self.probe_initial_state)
        return d


def loss_matched_config(loss: float, trials: int, seed: int = 0) -> ProtocolConfig:
    """POVM attack whose inconclusive rate is tuned to the channel loss it replaces."""
    loss = InconclusiveRate(loss)
    return ProtocolConfig.from_inconclusive_rate(
        loss,
        trials,
        seed=seed,
        measurement_mode=MeasurementMode.POVM,
        relay_strategy=RelayStrategy.CONCLUSIVE_ONLY,
        channel_loss=float(loss),
        probe_initial_state=tuple(state_A2_of_Rq(loss)),
    )


@dataclass(frozen=True)
class TrialRecord:
    alice_bit: int
    alice_basis: int
    bob_basis: int
    sifted: bool
    bob_bit: int | None  # None: photon never reached Bob
    bob_error: bool
    eve_outcome: int  # Outcome for povm mode, 0/1 for projective
    eve_bit_after_reconciliation: int | None


# probe states indexed by the conditional-state label used in the arrays
_PLUS, _MINUS, _ERROR = 0, 1, 2


def _probe_states(E: float) -> list[ProbeVector | None]:
    error = alpha_error(E)
    return [alpha_plus(E), alpha_minus(E), error if error.norm() > 0 else None]


def _measurement_table(config: ProtocolConfig) -> list:
    """Per conditional state: POVM probability triple, or projective P(outcome 0)."""
    states = _probe_states(config.error_rate)
    if config.measurement_mode is MeasurementMode.POVM:
        povm = build_povm(config.error_rate)
        return [None if s is None else outcome_probabilities(s, povm) for s in states]
    return [None if s is None else projective_probability(s) for s in states]


def _eve_bit(mode: MeasurementMode, outcome: int) -> int | None:
    if mode is MeasurementMode.POVM:
        return None if outcome == Outcome.INCONCLUSIVE else int(outcome)
    return int(outcome)


def run_trial(config: ProtocolConfig, index: int, table: list | None = None) -> TrialRecord:
    """Simulate protocol round ``index`` alone, one branch at a time.

    Uses the same per-trial substream as :func:`run_simulation`, so the
    record agrees with the vectorised path trial for trial.
    """
    if table is None:
        table = _measurement_table(config)
    rng = streams.TrialStream(config.seed, index)
    u = [rng.random() for _ in range(7)]
    alice_bit = int(u[streams.ALICE_BIT] >= 0.5)
    alice_basis = int(u[streams.ALICE_BASIS] >= 0.5)
    bob_basis = int(u[streams.BOB_BASIS] >= 0.5)
    sifted = alice_basis == bob_basis
    flipped = u[streams.ERROR] < config.error_rate

    if flipped:
        state = _ERROR
    else:
        state = _PLUS if alice_bit == 0 else _MINUS

    if config.measurement_mode is MeasurementMode.POVM:
        eve_outcome = int(categorical(table[state], u[streams.EVE]))
    else:
        eve_outcome = 0 if u[streams.EVE] < table[state] else 1

    if config.relay_strategy is RelayStrategy.CONCLUSIVE_ONLY:
        delivered = eve_outcome != Outcome.INCONCLUSIVE
    else:
        delivered = u[streams.LOSS] >= config.channel_loss

    if sifted:
        bob_bit = alice_bit ^ int(flipped)
    else:
        bob_bit = int(u[streams.BOB_RANDOM_BIT] >= 0.5)

    return TrialRecord(
        alice_bit=alice_bit,
        alice_basis=alice_basis,
        bob_basis=bob_basis,
        sifted=sifted,
        bob_bit=bob_bit if delivered else None,
        bob_error=bool(sifted and flipped and delivered),
        eve_outcome=eve_outcome,
        eve_bit_after_reconciliation=_eve_bit(config.measurement_mode, eve_outcome) if sifted else None,
    )


def simulate_block(config: ProtocolConfig, start: int, stop: int, table: list | None = None) -> dict[str, np.ndarray]:
    """Vectorised rounds ``start .. stop-1``; returns one array per record field."""
    if table is None:
        table = _measurement_table(config)
    n = stop - start
    u = streams.trial_uniforms(config.seed, start, n)
    alice_bit = (u[:, streams.ALICE_BIT] >= 0.5).astype(np.int8)
    alice_basis = (u[:, streams.ALICE_BASIS] >= 0.5).astype(np.int8)
    bob_basis = (u[:, streams.BOB_BASIS] >= 0.5).astype(np.int8)
    sifted = alice_basis == bob_basis
    flipped = u[:, streams.ERROR] < config.error_rate
    state = np.where(flipped, _ERROR, alice_bit).astype(np.int8)
    ue = u[:, streams.EVE]

    eve = np.empty(n, dtype=np.int8)
    for label in (_PLUS, _MINUS, _ERROR):
        mask = state == label
        if not mask.any():
            continue
        entry = table[label]
        if config.measurement_mode is MeasurementMode.POVM:
            p_plus, p_minus, _ = entry
            eve[mask] = np.where(
                ue[mask] < p_plus,
                Outcome.CONCLUSIVE_PLUS,
                np.where(ue[mask] < p_plus + p_minus, Outcome.CONCLUSIVE_MINUS, Outcome.INCONCLUSIVE),
            )
        else:
            eve[mask] = np.where(ue[mask] < entry, 0, 1)

    if config.relay_strategy is RelayStrategy.CONCLUSIVE_ONLY:
        delivered = eve != Outcome.INCONCLUSIVE
    else:
        delivered = u[:, streams.LOSS] >= config.channel_loss

    bob_bit = np.where(sifted, alice_bit ^ flipped.astype(np.int8), (u[:, streams.BOB_RANDOM_BIT] >= 0.5)).astype(np.int8)
    if config.measurement_mode is MeasurementMode.POVM:
        eve_bit = np.where(eve == Outcome.INCONCLUSIVE, -1, eve)
    else:
        eve_bit = eve.copy()
    return {
        "alice_bit": alice_bit,
        "alice_basis": alice_basis,
        "bob_basis": bob_basis,
        "sifted": sifted,
        "flipped": flipped,
        "delivered": delivered,
        "bob_bit": bob_bit,
        "eve_outcome": eve,
        "eve_bit": eve_bit,
    }


def block_records(arrays: dict[str, np.ndarray]) -> list[TrialRecord]:
    """Unpack :func:`simulate_block` output into :class:`TrialRecord` objects."""
    out = []
    for i in range(len(arrays["sifted"])):
        sifted = bool(arrays["sifted"][i])
        delivered = bool(arrays["delivered"][i])
        eve_bit = int(arrays["eve_bit"][i])
        out.append(
            TrialRecord(
                alice_bit=int(arrays["alice_bit"][i]),
                alice_basis=int(arrays["alice_basis"][i]),
                bob_basis=int(arrays["bob_basis"][i]),
                sifted=sifted,
                bob_bit=int(arrays["bob_bit"][i]) if delivered else None,
                bob_error=bool(sifted and arrays["flipped"][i] and delivered),
                eve_outcome=int(arrays["eve_outcome"][i]),
                eve_bit_after_reconciliation=(eve_bit if eve_bit >= 0 else None) if sifted else None,
            )
        )
    return out


@dataclass
class TrialCounts:
    """Integer tallies; adding blocks in any order gives the same totals."""

    trials: int = 0
    delivered: int = 0
    sifted_delivered: int = 0
    sifted_delivered_errors: int = 0
    sifted_correct: int = 0
    sifted_correct_inconclusive: int = 0
    conclusive_correct_delivered: int = 0
    conclusive_correct_hits: int = 0
    eve_hits_delivered_sifted: int = 0
    # projective outcomes on delivered sifted correct rounds, [bob_bit][outcome]
    renyi_table: list[list[int]] = field(default_factory=lambda: [[0, 0], [0, 0]])

    def __iadd__(self, other: "TrialCounts") -> "TrialCounts":
        for f in fields(self):
            if f.name == "renyi_table":
                for s in range(2):
                    for o in range(2):
                        self.renyi_table[s][o] += other.renyi_table[s][o]
            else:
                setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self


def count_block(config: ProtocolConfig, arrays: dict[str, np.ndarray]) -> TrialCounts:
    sifted = arrays["sifted"]
    delivered = arrays["delivered"]
    flipped = arrays["flipped"]
    eve_bit = arrays["eve_bit"]
    bob_bit = arrays["bob_bit"]
    sd = sifted & delivered
    correct = sifted & ~flipped
    dcorrect = correct & delivered
    conclusive = eve_bit >= 0
    hits = eve_bit == bob_bit

    c = TrialCounts(
        trials=len(sifted),
        delivered=int(delivered.sum()),
        sifted_delivered=int(sd.sum()),
        sifted_delivered_errors=int((sd & flipped).sum()),
        sifted_correct=int(correct.sum()),
        sifted_correct_inconclusive=int((correct & (arrays["eve_outcome"] == Outcome.INCONCLUSIVE)).sum())
        if config.measurement_mode is MeasurementMode.POVM
        else 0,
        conclusive_correct_delivered=int((dcorrect & conclusive).sum()),
        conclusive_correct_hits=int((dcorrect & conclusive & hits).sum()),
        eve_hits_delivered_sifted=int((sd & conclusive & hits).sum()),
    )
    if config.measurement_mode is MeasurementMode.PROJECTIVE:
        for s in range(2):
            for o in range(2):
                c.renyi_table[s][o] = int((dcorrect & (bob_bit == s) & (arrays["eve_outcome"] == o)).sum())
    return c


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    sifted_count: int
    sifted_error_rate: float | None
    inconclusive_rate_observed: float | None
    eve_conclusive_accuracy: float | None
    eve_accuracy_overall: float | None
    delivered_fraction: float
    empirical_renyi_bits: float | None
    config_echo: ProtocolConfig

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config_echo"] = self.config_echo.to_dict()
        return d


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def summarize(config: ProtocolConfig, c: TrialCounts) -> SimulationSummary:
    renyi = None
    if config.measurement_mode is MeasurementMode.PROJECTIVE and sum(map(sum, c.renyi_table)):
        renyi = renyi_plugin(np.array(c.renyi_table))
    return SimulationSummary(
        trials=c.trials,
        sifted_count=c.sifted_delivered,
        sifted_error_rate=_ratio(c.sifted_delivered_errors, c.sifted_delivered),
        inconclusive_rate_observed=_ratio(c.sifted_correct_inconclusive, c.sifted_correct),
        eve_conclusive_accuracy=_ratio(c.conclusive_correct_hits, c.conclusive_correct_delivered),
        eve_accuracy_overall=_ratio(c.eve_hits_delivered_sifted, c.sifted_delivered),
        delivered_fraction=c.delivered / c.trials,
        empirical_renyi_bits=renyi,
        config_echo=config,
    )


def run_counts(config: ProtocolConfig, workers: int = 1, chunk_size: int = DEFAULT_CHUNK) -> TrialCounts:
    """Tally all rounds of ``config``.

    Chunk boundaries depend only on ``chunk_size``, never on ``workers``, and
    totals are integers, so the result is independent of the schedule.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    table = _measurement_table(config)
    bounds = [(s, min(s + chunk_size, config.trials)) for s in range(0, config.trials, chunk_size)]

    def work(bound: tuple[int, int]) -> TrialCounts:
        return count_block(config, simulate_block(config, *bound, table=table))

    total = TrialCounts()
    if workers == 1:
        parts = map(work, bounds)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, bounds))
    for part in parts:
        total += part
    return total


def run_simulation(config: ProtocolConfig, workers: int = 1, chunk_size: int = DEFAULT_CHUNK) -> SimulationSummary:
    return summarize(config, run_counts(config, workers=workers, chunk_size=chunk_size))


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n) if n else math.inf
