"""Photon-number distributions and generating functions for the state catalog.

The catalog covers coherent, thermal, Fock and squeezed-vacuum states plus
convex mixtures and explicit user-supplied distributions. Everything a
detector array sees downstream is phase insensitive, so a state enters only
through its photon-number probabilities p_n and their generating function
G(x) = sum_n p_n x^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import TruncationOverflow, UnnormalizedExplicit, ValidationError

STATE_KINDS = ("coherent", "thermal", "fock", "squeezed_vacuum", "mixture", "explicit")

MAX_NMAX = 4096
MAX_MIXTURE_DEPTH = 8
MIXTURE_WEIGHT_TOL = 1e-9
EXPLICIT_SUM_TOL = 1e-6
DEFAULT_TAIL_TOLERANCE = 1e-12
MAX_TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class StateSpec:
    """Symbolic description of a quantum light state.

    Exactly the fields relevant to ``kind`` are set:

    - ``coherent`` / ``thermal``: ``mean_photons`` (mu >= 0)
    - ``fock``: ``n`` (photon number)
    - ``squeezed_vacuum``: ``r`` (squeeze parameter, mean photons sinh^2 r)
    - ``mixture``: ``components`` as ((weight, StateSpec), ...)
    - ``explicit``: ``probs`` as a tuple of probabilities over n = 0, 1, ...

    Instances are frozen and hashable so that derived tables (truncated
    distributions, sampling CDFs) can be cached per spec.
    """

    kind: str
    mean_photons: float | None = None
    n: int | None = None
    r: float | None = None
    components: tuple[tuple[float, "StateSpec"], ...] | None = None
    probs: tuple[float, ...] | None = None

    @staticmethod
    def coherent(mean_photons: float) -> "StateSpec":
        return StateSpec(kind="coherent", mean_photons=float(mean_photons))

    @staticmethod
    def thermal(mean_photons: float) -> "StateSpec":
        return StateSpec(kind="thermal", mean_photons=float(mean_photons))

    @staticmethod
    def fock(n: int) -> "StateSpec":
        return StateSpec(kind="fock", n=int(n))

    @staticmethod
    def squeezed_vacuum(r: float) -> "StateSpec":
        return StateSpec(kind="squeezed_vacuum", r=float(r))

    @staticmethod
    def mixture(components: Iterable[tuple[float, "StateSpec"]]) -> "StateSpec":
        comps = tuple((float(w), s) for w, s in components)
        return StateSpec(kind="mixture", components=comps)

    @staticmethod
    def explicit(probs: Iterable[float]) -> "StateSpec":
        return StateSpec(kind="explicit", probs=tuple(float(p) for p in probs))

    def validate(self, path: str = "state", _depth: int = 0) -> None:
        """Check every invariant, raising ValidationError with a field path."""
        if _depth > MAX_MIXTURE_DEPTH:
            raise ValidationError(
                f"{path}: mixture nesting depth exceeds {MAX_MIXTURE_DEPTH}"
            )
        if self.kind not in STATE_KINDS:
            raise ValidationError(
                f"{path}.kind: {self.kind!r} is not one of {STATE_KINDS}"
            )
        if self.kind in ("coherent", "thermal"):
            mu = self.mean_photons
            if mu is None or not math.isfinite(mu) or mu < 0:
                raise ValidationError(
                    f"{path}.mean_photons: must be a nonnegative real, got {mu!r}"
                )
        elif self.kind == "fock":
            if self.n is None or isinstance(self.n, bool) or self.n != int(self.n) or self.n < 0:
                raise ValidationError(
                    f"{path}.n: must be a nonnegative integer, got {self.n!r}"
                )
        elif self.kind == "squeezed_vacuum":
            if self.r is None or not math.isfinite(self.r) or self.r < 0:
                raise ValidationError(
                    f"{path}.r: must be a nonnegative real, got {self.r!r}"
                )
        elif self.kind == "mixture":
            if not self.components:
                raise ValidationError(f"{path}.components: must be a nonempty list")
            total = 0.0
            for i, (weight, sub) in enumerate(self.components):
                if not math.isfinite(weight) or weight < 0 or weight > 1:
                    raise ValidationError(
                        f"{path}.components[{i}].weight: must lie in [0, 1], got {weight!r}"
                    )
                if not isinstance(sub, StateSpec):
                    raise ValidationError(
                        f"{path}.components[{i}].state: not a state spec"
                    )
                sub.validate(f"{path}.components[{i}].state", _depth + 1)
                total += weight
            if abs(total - 1.0) > MIXTURE_WEIGHT_TOL:
                raise ValidationError(
                    f"{path}.components: weights sum to {total!r}, expected 1"
                )
        elif self.kind == "explicit":
            if not self.probs:
                raise ValidationError(f"{path}.probs: must be a nonempty list")
            for i, p in enumerate(self.probs):
                if not math.isfinite(p) or p < 0:
                    raise ValidationError(
                        f"{path}.probs[{i}]: must be a nonnegative real, got {p!r}"
                    )
            total = math.fsum(self.probs)
            if abs(total - 1.0) > EXPLICIT_SUM_TOL:
                raise ValidationError(
                    f"{path}.probs: sum {total!r} deviates from 1 by more than "
                    f"{EXPLICIT_SUM_TOL}"
                )

    def flattened(self) -> list[tuple[float, "StateSpec"]]:
        """Collapse nested mixtures into a flat (weight, leaf-spec) list."""
        if self.kind != "mixture":
            return [(1.0, self)]
        flat: list[tuple[float, StateSpec]] = []
        for weight, sub in self.components:
            for w, leaf in sub.flattened():
                flat.append((weight * w, leaf))
        return flat

    def to_dict(self) -> dict:
        """Schema-form dictionary, the same layout parse_state_spec accepts."""
        if self.kind in ("coherent", "thermal"):
            return {"kind": self.kind, "mean_photons": self.mean_photons}
        if self.kind == "fock":
            return {"kind": "fock", "n": self.n}
        if self.kind == "squeezed_vacuum":
            return {"kind": "squeezed_vacuum", "r": self.r}
        if self.kind == "mixture":
            return {
                "kind": "mixture",
                "components": [
                    {"weight": w, "state": s.to_dict()} for w, s in self.components
                ],
            }
        return {"kind": "explicit", "probs": list(self.probs)}


def state_from_dict(data: object, path: str = "state") -> StateSpec:
    """Build a StateSpec from its schema dictionary, validating as we go."""
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected an object, got {type(data).__name__}")
    kind = data.get("kind")
    if kind not in STATE_KINDS:
        raise ValidationError(f"{path}.kind: {kind!r} is not one of {STATE_KINDS}")
    allowed = {
        "coherent": {"kind", "mean_photons"},
        "thermal": {"kind", "mean_photons"},
        "fock": {"kind", "n"},
        "squeezed_vacuum": {"kind", "r"},
        "mixture": {"kind", "components"},
        "explicit": {"kind", "probs"},
    }[kind]
    extra = set(data) - allowed
    if extra:
        raise ValidationError(f"{path}: unexpected fields {sorted(extra)} for kind {kind!r}")
    missing = allowed - set(data)
    if missing:
        raise ValidationError(f"{path}: missing fields {sorted(missing)} for kind {kind!r}")

    if kind in ("coherent", "thermal"):
        value = data["mean_photons"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{path}.mean_photons: expected a number")
        spec = StateSpec(kind=kind, mean_photons=float(value))
    elif kind == "fock":
        value = data["n"]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{path}.n: expected an integer")
        spec = StateSpec.fock(value)
    elif kind == "squeezed_vacuum":
        value = data["r"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{path}.r: expected a number")
        spec = StateSpec.squeezed_vacuum(float(value))
    elif kind == "mixture":
        raw = data["components"]
        if not isinstance(raw, list):
            raise ValidationError(f"{path}.components: expected a list")
        comps = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or set(item) != {"weight", "state"}:
                raise ValidationError(
                    f"{path}.components[{i}]: expected an object with "
                    "'weight' and 'state'"
                )
            weight = item["weight"]
            if isinstance(weight, bool) or not isinstance(weight, (int, float)):
                raise ValidationError(f"{path}.components[{i}].weight: expected a number")
            sub = state_from_dict(item["state"], f"{path}.components[{i}].state")
            comps.append((float(weight), sub))
        spec = StateSpec.mixture(comps)
    else:
        raw = data["probs"]
        if not isinstance(raw, list) or not raw:
            raise ValidationError(f"{path}.probs: expected a nonempty list")
        for i, p in enumerate(raw):
            if isinstance(p, bool) or not isinstance(p, (int, float)):
                raise ValidationError(f"{path}.probs[{i}]: expected a number")
        spec = StateSpec.explicit(raw)
    spec.validate(path)
    return spec


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Truncated photon-number probabilities p_0 .. p_nmax.

    ``tail_bound`` is an upper bound on the probability mass dropped by the
    truncation, so sum(probs) >= 1 - tail_bound up to rounding.
    """

    probs: np.ndarray
    tail_bound: float

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a nonempty 1-d array")
        if np.any(arr < 0):
            raise ValueError("photon-number probabilities must be nonnegative")
        total = float(arr.sum())
        if not (1.0 - 1e-9 - self.tail_bound <= total <= 1.0 + 1e-12):
            raise ValueError(
                f"probability mass {total!r} inconsistent with tail bound "
                f"{self.tail_bound!r}"
            )

    @property
    def n_max(self) -> int:
        return self.probs.size - 1


def _check_tail_tolerance(tail_tolerance: float) -> float:
    if not (0.0 < tail_tolerance <= MAX_TAIL_TOLERANCE):
        raise ValueError(
            f"tail_tolerance must lie in (0, {MAX_TAIL_TOLERANCE}], got {tail_tolerance!r}"
        )
    return float(tail_tolerance)


def _coherent_probs(mu: float, tol: float) -> tuple[np.ndarray, float]:
    """Poisson probabilities truncated once the analytic upper tail <= tol."""
    if mu == 0.0:
        return np.array([1.0]), 0.0
    # Exponential search then bisect on the smallest cutoff with sf <= tol;
    # poisson.sf is the regularized upper incomplete gamma, i.e. the exact tail.
    lo = int(mu)
    hi = max(lo + 1, int(mu + 10.0 * math.sqrt(mu) + 20.0))
    while stats.poisson.sf(hi, mu) > tol:
        lo = hi
        hi *= 2
        if hi > 8 * MAX_NMAX:
            raise TruncationOverflow(
                f"coherent state with mean {mu} needs a cutoff beyond {MAX_NMAX}"
            )
    while lo < hi:
        mid = (lo + hi) // 2
        if stats.poisson.sf(mid, mu) <= tol:
            hi = mid
        else:
            lo = mid + 1
    n_max = hi
    if n_max > MAX_NMAX:
        raise TruncationOverflow(
            f"coherent state with mean {mu} needs cutoff {n_max} > {MAX_NMAX}"
        )
    probs = stats.poisson.pmf(np.arange(n_max + 1), mu)
    return probs, float(stats.poisson.sf(n_max, mu))


def _thermal_probs(mu: float, tol: float) -> tuple[np.ndarray, float]:
    """Geometric probabilities mu^n / (1+mu)^{n+1}; tail after M is q^{M+1}."""
    if mu == 0.0:
        return np.array([1.0]), 0.0
    q = mu / (1.0 + mu)
    n_max = max(0, math.ceil(math.log(tol) / math.log(q)) - 1)
    while q ** (n_max + 1) > tol:
        n_max += 1
    if n_max > MAX_NMAX:
        raise TruncationOverflow(
            f"thermal state with mean {mu} needs cutoff {n_max} > {MAX_NMAX}"
        )
    n = np.arange(n_max + 1)
    probs = np.exp(n * math.log(q)) / (1.0 + mu)
    return probs, float(q ** (n_max + 1))


def _squeezed_probs(r: float, tol: float) -> tuple[np.ndarray, float]:
    """Even-photon probabilities of squeezed vacuum.

    p_{2m} = (2m)! tanh^{2m} r / (2^m m!)^2 / cosh r, built by the term
    ratio t^2 (2m+1) / (2m+2) with t = tanh r. Successive ratios are < t^2,
    so the remaining mass after index 2m is bounded by p_{2m} t^2/(1-t^2).
    """
    if r == 0.0:
        return np.array([1.0]), 0.0
    t2 = math.tanh(r) ** 2
    entries = [1.0 / math.cosh(r)]  # p_0
    tail_bound = entries[-1] * t2 / (1.0 - t2)
    m = 0
    while tail_bound > tol:
        entries.append(entries[-1] * t2 * (2 * m + 1) / (2 * m + 2))
        m += 1
        tail_bound = entries[-1] * t2 / (1.0 - t2)
        if 2 * m > MAX_NMAX:
            raise TruncationOverflow(
                f"squeezed vacuum with r={r} needs cutoff beyond {MAX_NMAX}"
            )
    probs = np.zeros(2 * m + 1)
    probs[::2] = entries
    return probs, float(tail_bound)


def make_distribution(
    spec: StateSpec, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
) -> PhotonNumberDistribution:
    """Truncate a state's photon-number distribution to the given tail mass.

    The cutoff is the smallest one whose analytic tail bound falls below
    ``tail_tolerance``, capped at 4096 (TruncationOverflow beyond that).
    Explicit distributions off unit sum by at most 1e-6 are renormalized;
    larger deviations raise UnnormalizedExplicit.
    """
    tol = _check_tail_tolerance(tail_tolerance)
    if spec.kind == "explicit" and spec.probs:
        total = math.fsum(spec.probs)
        if abs(total - 1.0) > EXPLICIT_SUM_TOL:
            raise UnnormalizedExplicit(
                f"explicit probabilities sum to {total!r}; deviation exceeds "
                f"{EXPLICIT_SUM_TOL}"
            )
    spec.validate()

    if spec.kind == "coherent":
        probs, tail = _coherent_probs(spec.mean_photons, tol)
    elif spec.kind == "thermal":
        probs, tail = _thermal_probs(spec.mean_photons, tol)
    elif spec.kind == "fock":
        if spec.n > MAX_NMAX:
            raise TruncationOverflow(f"fock n={spec.n} exceeds the cap {MAX_NMAX}")
        probs = np.zeros(spec.n + 1)
        probs[spec.n] = 1.0
        tail = 0.0
    elif spec.kind == "squeezed_vacuum":
        probs, tail = _squeezed_probs(spec.r, tol)
    elif spec.kind == "explicit":
        raw = np.asarray(spec.probs, dtype=np.float64)
        total = float(raw.sum())
        if raw.size - 1 > MAX_NMAX:
            raise TruncationOverflow(
                f"explicit distribution length {raw.size} exceeds the cap {MAX_NMAX + 1}"
            )
        probs = raw / total
        tail = 0.0
    else:  # mixture
        parts = [
            (w, make_distribution(leaf, tol)) for w, leaf in spec.flattened()
        ]
        n_max = max(p.n_max for _, p in parts)
        probs = np.zeros(n_max + 1)
        tail = 0.0
        for w, part in parts:
            probs[: part.probs.size] += w * part.probs
            tail += w * part.tail_bound
    return PhotonNumberDistribution(probs=probs, tail_bound=tail)


def generating_function(spec: StateSpec, x: float) -> float:
    """Evaluate G(x) = sum_n p_n x^n on [0, 1].

    Closed forms: coherent exp(-mu(1-x)), thermal 1/(1+mu(1-x)), Fock x^n,
    squeezed vacuum 1/(cosh r * sqrt(1 - x^2 tanh^2 r)). Mixtures evaluate
    as the weight-sum over flattened components; explicit distributions as
    a truncated polynomial.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"generating function argument must lie in [0, 1], got {x!r}")
    spec.validate()
    return _gf(spec, float(x))


def _gf(spec: StateSpec, x: float) -> float:
    if spec.kind == "coherent":
        return math.exp(-spec.mean_photons * (1.0 - x))
    if spec.kind == "thermal":
        return 1.0 / (1.0 + spec.mean_photons * (1.0 - x))
    if spec.kind == "fock":
        return x**spec.n
    if spec.kind == "squeezed_vacuum":
        t = math.tanh(spec.r)
        return 1.0 / (math.cosh(spec.r) * math.sqrt(1.0 - (x * t) ** 2))
    if spec.kind == "mixture":
        return math.fsum(w * _gf(leaf, x) for w, leaf in spec.flattened())
    return polynomial_gf(np.asarray(spec.probs, dtype=np.float64), x)


def polynomial_gf(probs: Sequence[float] | np.ndarray, x: float) -> float:
    """Truncated-sum generating function sum_n p_n x^n (Horner)."""
    acc = 0.0
    for p in reversed(np.asarray(probs, dtype=np.float64)):
        acc = acc * x + p
    return float(acc)


def photon_moments(pnd: PhotonNumberDistribution) -> tuple[float, float]:
    """Mean and variance of the photon number under a truncated distribution.

    Variance is clamped to zero when rounding drives it slightly negative
    (never below -1e-12).
    """
    n = np.arange(pnd.probs.size, dtype=np.float64)
    mean = float(n @ pnd.probs)
    second = float((n * n) @ pnd.probs)
    variance = second - mean * mean
    if variance < 0.0:
        if variance < -1e-12:
            raise ValueError(f"variance {variance!r} below clamping tolerance")
        variance = 0.0
    return mean, variance
