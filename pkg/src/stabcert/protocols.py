"""DFE-C and Basis-Min-of-Means runs against simulated measurement sources.

``run_dfe_c`` and ``run_bmom`` follow the algorithms shot by shot and keep a
full transcript.  ``dfe_campaign`` and ``bmom_campaign`` draw many
independent runs at once for mistake-rate estimation; they sample the same
distribution of decisions but collapse the shots of one observable into a
single binomial draw.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import FactViolation
from .gf2 import BitMatrix, BitVec, sample_full_rank, sample_full_rank_batch, unpack_bits
from .params import ProtocolParams, accepts, max_accepted_count
from .pauli import PauliOperator
from .states import ExpectationProfile
from .tableau import StabilizerTableau, group_element, sample_coefficients

FACT_TOL = 1e-12
TRANSCRIPT_MAGIC = "# stabcert transcript v1"


class MeasurementSource(Protocol):
    def measure(self, observable: PauliOperator, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Return ``shots`` outcomes in {+1, -1} as an int8 array."""


def _draw(expectations: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    p_plus = (1.0 + np.asarray(expectations, dtype=float)) / 2.0
    return np.where(rng.random(p_plus.shape) < p_plus, 1, -1).astype(np.int8)


class StationarySource:
    """Every shot measures the same state (anything with ``.expectation``)."""

    def __init__(self, state):
        self.state = state
        self._cache: dict = {}

    def expectation(self, observable: PauliOperator) -> float:
        key = (observable.x, observable.z, observable.phase)
        if key not in self._cache:
            self._cache[key] = self.state.expectation(observable)
        return self._cache[key]

    def measure(self, observable, shots, rng):
        return _draw(np.full(shots, self.expectation(observable)), rng)


class DriftingSource:
    """Cycles through ``schedule``, advancing one state per shot.

    The position is global across observables, so a state change can land
    in the middle of one observable's shots.
    """

    def __init__(self, schedule: Sequence, start: int = 0):
        if not schedule:
            raise ValueError("empty schedule")
        self.sources = [StationarySource(s) for s in schedule]
        self.position = start

    def measure(self, observable, shots, rng):
        k = len(self.sources)
        idx = (self.position + np.arange(shots)) % k
        exps = np.array([src.expectation(observable) for src in self.sources])[idx]
        self.position += shots
        return _draw(exps, rng)


@dataclass(frozen=True)
class Record:
    coeffs: int
    observable: PauliOperator
    outcomes: np.ndarray

    @property
    def estimate(self) -> float:
        return float(np.mean(self.outcomes))


@dataclass(frozen=True)
class CertificateSummary:
    protocol: str
    params: ProtocolParams
    records: tuple
    basis_rounds: int | None = None
    seed: int | None = None
    estimates: tuple = field(init=False)
    mu: float = field(init=False)
    nu: float = field(init=False)
    decision: str = field(init=False)

    def __post_init__(self):
        est = tuple(r.estimate for r in self.records)
        object.__setattr__(self, "estimates", est)
        object.__setattr__(self, "mu", float(np.mean(est)))
        object.__setattr__(self, "nu", float(min(est)))
        object.__setattr__(self, "decision", decide(self.protocol, self.records, self.params.beta))

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


def decide(protocol: str, records: Sequence[Record], beta: float) -> str:
    if protocol == "dfe":
        stat = float(np.mean(np.concatenate([r.outcomes for r in records])))
    elif protocol == "bmom":
        stat = min(r.estimate for r in records)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    return "accept" if accepts(stat, beta) else "reject"


def run_dfe_c(psi0: StabilizerTableau, params: ProtocolParams, src: MeasurementSource,
              rng: np.random.Generator, seed: int | None = None) -> CertificateSummary:
    """M single-shot measurements of independently uniform stabilizers."""
    records = []
    for _ in range(params.shots):
        a = sample_coefficients(psi0.n, rng)
        x = group_element(psi0, a)
        records.append(Record(a, x, src.measure(x, 1, rng)))
    return CertificateSummary("dfe", params, tuple(records), seed=seed)


def run_bmom(psi0: StabilizerTableau, params: ProtocolParams, src: MeasurementSource,
             rng: np.random.Generator, basis: BitMatrix | None = None,
             seed: int | None = None) -> CertificateSummary:
    """One uniform basis, ``m`` shots per element, accept iff min mean >= 1 - beta.

    ``basis`` overrides the random basis (coefficient rows); then
    ``basis_rounds`` is recorded as 0.
    """
    if basis is None:
        basis, rounds = sample_full_rank(psi0.n, rng)
    else:
        rounds = 0
    records = []
    for a in basis.rows:
        x = group_element(psi0, a)
        records.append(Record(a, x, src.measure(x, params.shots, rng)))
    return CertificateSummary("bmom", params, tuple(records), basis_rounds=rounds, seed=seed)


def measurement_settings_count(summary: CertificateSummary) -> int:
    return len({(r.observable.x, r.observable.z, r.observable.phase) for r in summary.records})


# ----------------------------------------------------------------- transcripts


def format_transcript(summary: CertificateSummary) -> str:
    n = summary.params.n if summary.records == () else summary.records[0].observable.n
    out = io.StringIO()
    out.write(TRANSCRIPT_MAGIC + "\n")
    out.write(f"protocol={summary.protocol}\n")
    out.write(f"seed={summary.seed}\n")
    out.write(f"qubits={n}\n")
    out.write(f"basis_rounds={summary.basis_rounds}\n")
    for line in summary.params.to_lines().splitlines():
        out.write(f"param.{line}\n")
    out.write(f"decision={summary.decision}\n")
    for r in summary.records:
        sign = "+" if r.observable.sign > 0 else "-"
        shots = " ".join("+1" if o > 0 else "-1" for o in r.outcomes)
        out.write(f"record {BitVec(n, r.coeffs)} {sign} {r.observable.letters} {shots}\n")
    return out.getvalue()


@dataclass(frozen=True)
class Transcript:
    header: dict
    params: ProtocolParams
    records: tuple

    @property
    def protocol(self) -> str:
        return self.header["protocol"]


def parse_transcript(text: str) -> Transcript:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRANSCRIPT_MAGIC:
        raise ValueError("not a stabcert transcript")
    header, pdict, records = {}, {}, []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("record "):
            parts = line.split()
            if len(parts) < 4:
                raise ValueError(f"line {lineno}: truncated record")
            coeffs = BitVec.from_str(parts[1]).value
            obs = PauliOperator.from_label(("-" if parts[2] == "-" else "+") + parts[3])
            outcomes = np.array([int(t) for t in parts[4:]], dtype=np.int8)
            records.append(Record(coeffs, obs, outcomes))
            continue
        key, _, value = line.partition("=")
        if key.startswith("param."):
            pdict[key[len("param."):]] = value
        else:
            header[key] = value
    return Transcript(header, ProtocolParams.from_dict(pdict), tuple(records))


def replay_decision(transcript: Transcript | str) -> str:
    if isinstance(transcript, str):
        transcript = parse_transcript(transcript)
    return decide(transcript.protocol, transcript.records, transcript.params.beta)


# ------------------------------------------------------------------ campaigns


@dataclass(frozen=True)
class CampaignResult:
    protocol: str
    trials: int
    accepted: int
    intrinsic_undetected: int = 0
    basis_rounds: np.ndarray | None = None

    @property
    def accept_rate(self) -> float:
        return self.accepted / self.trials

    @property
    def reject_rate(self) -> float:
        return 1.0 - self.accept_rate


def check_fact_a(values: np.ndarray, fid: float, tol: float = FACT_TOL) -> None:
    """Hard check: no group element may sit below ``2F - 1``."""
    low = float(np.min(values)) if np.size(values) else 1.0
    if low < 2.0 * fid - 1.0 - tol:
        raise FactViolation(f"basis element expectation {low} below 2F-1 = {2 * fid - 1}")


def bmom_campaign(profile: ExpectationProfile, params: ProtocolParams, trials: int,
                  rng: np.random.Generator, chunk: int = 4096) -> CampaignResult:
    """Decisions of ``trials`` independent BMoM runs on a stationary state.

    Per run: a fresh uniform basis, then per element a Binomial(m, q) count
    of -1 outcomes with ``q = (1 - <x>) / 2``.  Also counts runs whose basis
    alone lets the state through (every element above ``1 - alpha*eps``).
    """
    n, m = profile.n, params.shots
    kmax = max_accepted_count(m, params.beta)
    fid = profile.fidelity()
    cutoff = 1.0 - params.alpha * params.eps
    accepted = undetected = 0
    rounds_all = []
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        words, rounds = sample_full_rank_batch(n, b, rng)
        vals = profile.values(unpack_bits(words, n))
        check_fact_a(vals, fid)
        q = np.clip((1.0 - vals) / 2.0, 0.0, 1.0)
        minus = rng.binomial(m, q)
        accepted += int(np.all(minus <= kmax, axis=1).sum())
        undetected += int(np.all(vals > cutoff + FACT_TOL, axis=1).sum())
        rounds_all.append(rounds)
        done += b
    return CampaignResult("bmom", trials, accepted, undetected, np.concatenate(rounds_all))


def dfe_campaign(fid: float, params: ProtocolParams, trials: int,
                 rng: np.random.Generator) -> CampaignResult:
    """Decisions of ``trials`` DFE-C runs on a stationary state of fidelity ``fid``.

    A uniformly sampled stabilizer measured once gives -1 with probability
    ``(1 - F) / 2`` averaged over the group, and shots are independent, so
    the -1 count of one run is Binomial(M, (1 - F) / 2).
    """
    kmax = max_accepted_count(params.shots, params.beta)
    minus = rng.binomial(params.shots, (1.0 - fid) / 2.0, size=trials)
    return CampaignResult("dfe", trials, int((minus <= kmax).sum()))
