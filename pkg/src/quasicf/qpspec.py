"""Quasi-periodic continued fraction specifications.

A spec is a header ``a_0 .. a_{n_0-1}`` followed by stages. Stage ``k``
repeats a block of ``r_k`` quotients ``lambda_k`` times starting at index
``n_k``. Stage descriptors are cycled: stage ``k`` uses descriptor
``k mod len(stages)``, while its repetition count is the schedule evaluated at
the global stage index ``k``. In the packed layout ``n_{k+1} = n_k +
lambda_k r_k``; the gapped layout appends the descriptor's filler quotients
after each repetition.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .cf import PartialQuotientStream, StreamExhausted
from .enclosure import Real, as_fraction, ceil_root, format_rational

__all__ = [
    "ScheduleExhausted",
    "ScheduleTooLarge",
    "ScheduleExpr",
    "Stage",
    "StageInfo",
    "QuasiPeriodicSpec",
    "RepVerdict",
    "Limit",
    "AsymptoticFacts",
    "generate",
    "verify_rep",
    "schedule_asymptotics",
    "periodicity_status",
    "xi_ab",
    "load_spec",
    "spec_from_json",
]

LAYOUTS = ("packed", "gapped")
KINDS = ("constant", "affine", "polynomial", "geometric", "exp-power", "table")
WITNESSES = ("unbounded-runs", "alternation")

# exp(t) with t above this has more than ~870k decimal digits
MAX_EXP_ARGUMENT = 2_000_000


class ScheduleExhausted(StreamExhausted):
    """A user table schedule has no value for the requested stage."""


class ScheduleTooLarge(ScheduleExhausted):
    """A closed-form schedule value is too large to materialize."""


def _frac(x) -> Fraction:
    return as_fraction(x) if not isinstance(x, float) else Fraction(str(x))


@dataclass(frozen=True)
class ScheduleExpr:
    """Rule producing the repetition counts ``lambda_k``.

    ``constant``: c. ``affine``: ceil(c k + b). ``polynomial``: ceil(c k^beta).
    ``geometric``: ceil(c theta^k). ``exp-power``: ceil(exp(c x^beta)) with
    ``x = k`` or, when ``argument == "position"``, ``x = n_k``. ``table``:
    explicit finite list. Every value is floored at 1.
    """

    kind: str
    c: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    beta: Fraction = Fraction(1)
    theta: Fraction = Fraction(2)
    values: tuple[int, ...] = ()
    argument: str = "stage"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; expected one of {KINDS}")
        for name in ("c", "b", "beta", "theta"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if self.argument not in ("stage", "position"):
            raise ValueError("argument must be 'stage' or 'position'")
        if self.argument == "position" and self.kind != "exp-power":
            raise ValueError("only exp-power schedules may be indexed by position")
        if self.kind == "constant" and (self.c < 1 or self.c.denominator != 1):
            raise ValueError("constant schedule needs a positive integer")
        if self.kind == "affine" and self.c < 0:
            raise ValueError("affine slope must be non-negative")
        if self.kind in ("polynomial", "geometric", "exp-power") and self.c <= 0:
            raise ValueError(f"{self.kind} coefficient must be positive")
        if self.kind in ("polynomial", "exp-power") and self.beta <= 0:
            raise ValueError("exponent beta must be positive")
        if self.kind == "geometric" and self.theta <= 1:
            raise ValueError("ratio theta must exceed 1 (use a constant schedule otherwise)")
        if self.kind == "table" and (not self.values or min(self.values) < 1):
            raise ValueError("table schedule needs positive integer values")

    @classmethod
    def constant(cls, c: int) -> "ScheduleExpr":
        return cls("constant", c=Fraction(c))

    @classmethod
    def affine(cls, c, b=0) -> "ScheduleExpr":
        return cls("affine", c=_frac(c), b=_frac(b))

    @classmethod
    def polynomial(cls, c, beta) -> "ScheduleExpr":
        return cls("polynomial", c=_frac(c), beta=_frac(beta))

    @classmethod
    def geometric(cls, c, theta) -> "ScheduleExpr":
        return cls("geometric", c=_frac(c), theta=_frac(theta))

    @classmethod
    def exp_power(cls, c, beta, argument: str = "stage") -> "ScheduleExpr":
        return cls("exp-power", c=_frac(c), beta=_frac(beta), argument=argument)

    @classmethod
    def table(cls, values: Sequence[int]) -> "ScheduleExpr":
        return cls("table", values=tuple(values))

    @property
    def closed_form(self) -> bool:
        return self.kind != "table"

    @property
    def unbounded(self) -> bool | None:
        """Whether the values grow without bound (None for tables)."""
        if self.kind == "table":
            return None
        if self.kind == "constant":
            return False
        if self.kind == "affine":
            return self.c > 0
        if self.kind == "geometric":
            return self.theta > 1
        return True

    @property
    def eventually_constant(self) -> bool:
        if self.kind == "constant":
            return True
        if self.kind == "affine":
            return self.c == 0
        if self.kind == "geometric":
            return self.theta <= 1
        return False

    def evaluate(self, k: int, position: int | None = None) -> int:
        if k < 0:
            raise ValueError("stage index must be non-negative")
        x = k
        if self.argument == "position":
            if position is None:
                raise ValueError("position-indexed schedule needs n_k")
            x = position
        return _evaluate(self, x)

    def to_json(self) -> dict:
        if self.kind == "table":
            return {"kind": "table", "params": {"values": [str(v) for v in self.values]}}
        names = {
            "constant": ("c",),
            "affine": ("c", "b"),
            "polynomial": ("c", "beta"),
            "geometric": ("c", "theta"),
            "exp-power": ("c", "beta"),
        }[self.kind]
        params = {n: format_rational(getattr(self, n)) for n in names}
        if self.kind == "exp-power":
            params["argument"] = self.argument
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_json(cls, obj: dict) -> "ScheduleExpr":
        kind = obj["kind"]
        params = dict(obj.get("params", {}))
        if kind == "table":
            return cls.table([int(v) for v in params["values"]])
        kwargs = {}
        for name in ("c", "b", "beta", "theta"):
            if name in params:
                kwargs[name] = _frac(params[name]) if not isinstance(params[name], str) else as_fraction(params[name])
        if "argument" in params:
            kwargs["argument"] = params["argument"]
        unknown = set(params) - {"c", "b", "beta", "theta", "argument"}
        if unknown:
            raise ValueError(f"unknown schedule parameters {sorted(unknown)}")
        return cls(kind, **kwargs)

    def describe(self) -> str:
        k = "n_k" if self.argument == "position" else "k"
        return {
            "constant": lambda: f"{format_rational(self.c)}",
            "affine": lambda: f"ceil({format_rational(self.c)} k + {format_rational(self.b)})",
            "polynomial": lambda: f"ceil({format_rational(self.c)} k^{format_rational(self.beta)})",
            "geometric": lambda: f"ceil({format_rational(self.c)} * {format_rational(self.theta)}^k)",
            "exp-power": lambda: f"ceil(exp({format_rational(self.c)} {k}^{format_rational(self.beta)}))",
            "table": lambda: f"table{list(self.values)}",
        }[self.kind]()


@functools.lru_cache(maxsize=4096)
def _evaluate(expr: ScheduleExpr, x: int) -> int:
    kind = expr.kind
    if kind == "table":
        if x >= len(expr.values):
            raise ScheduleExhausted(f"table schedule has {len(expr.values)} values, stage {x} requested")
        return expr.values[x]
    if kind == "constant":
        value = expr.c.numerator
    elif kind == "affine":
        value = math.ceil(expr.c * x + expr.b)
    elif kind == "geometric":
        value = math.ceil(expr.c * expr.theta**x)
    elif kind == "polynomial":
        u, v = expr.beta.numerator, expr.beta.denominator
        # ceil(c x^(u/v)) = least m with m^v >= c^v x^u
        value = ceil_root(expr.c**v * Fraction(x) ** u, v)
    else:
        value = _ceil_exp_power(expr.c, expr.beta, x)
    return max(1, value)


def _ceil_exp_power(c: Fraction, beta: Fraction, x: int) -> int:
    if x == 0:
        return 1
    log_estimate = math.log(c) + float(beta) * math.log(x)
    if log_estimate > math.log(MAX_EXP_ARGUMENT):
        raise ScheduleTooLarge(f"exp(c x^beta) with log(c x^beta) ~ {log_estimate:.4g} is too large to materialize")
    estimate = math.exp(log_estimate)
    t = Real.of(c) * (Real.of(x) ** beta)
    value = t.exp()
    prec = max(64, int(estimate * 1.4427) + 64)
    while True:
        enc = value.enclose(prec)
        lo, hi = math.ceil(enc.lo), math.ceil(enc.hi)
        if lo == hi:
            return lo
        # exp of a nonzero algebraic number is never an integer, so this ends
        prec *= 2


@dataclass(frozen=True)
class Stage:
    """Stage descriptor: the repeated block, an optional schedule override and filler."""

    block: tuple[int, ...]
    schedule: ScheduleExpr | None = None
    gap: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "block", tuple(int(b) for b in self.block))
        object.__setattr__(self, "gap", tuple(int(g) for g in self.gap))
        if not self.block or min(self.block) < 1:
            raise ValueError("stage blocks must be nonempty lists of positive integers")
        if self.gap and min(self.gap) < 1:
            raise ValueError("filler quotients must be positive")


@dataclass(frozen=True)
class StageInfo:
    k: int
    n: int
    r: int
    lam: int
    block: tuple[int, ...]
    gap: tuple[int, ...]

    @property
    def end(self) -> int:
        """Index just after the last repetition."""
        return self.n + self.lam * self.r

    @property
    def next_n(self) -> int:
        return self.end + len(self.gap)

    @property
    def claim(self) -> tuple[int, int, int]:
        return (self.n, self.r, self.lam)


@dataclass(frozen=True)
class QuasiPeriodicSpec:
    header: tuple[int, ...]
    stages: tuple[Stage, ...]
    layout: str = "packed"
    schedule: ScheduleExpr | None = None
    not_ultimately_periodic: bool | None = None
    witness: str | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "header", tuple(int(a) for a in self.header))
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.header:
            raise ValueError("header must contain at least a_0")
        if self.header[0] < 0 or any(a < 1 for a in self.header[1:]):
            raise ValueError("header needs a_0 >= 0 and positive later quotients")
        if not self.stages:
            raise ValueError("spec needs at least one stage descriptor")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}")
        if self.layout == "packed" and any(st.gap for st in self.stages):
            raise ValueError("packed layout does not allow filler quotients")
        for st in self.stages:
            if st.schedule is None and self.schedule is None:
                raise ValueError("every stage needs a schedule (per stage or spec default)")
        if self.witness is not None and self.witness not in WITNESSES:
            raise ValueError(f"unknown witness {self.witness!r}; expected one of {WITNESSES}")

    @property
    def n0(self) -> int:
        return len(self.header)

    def descriptor(self, k: int) -> Stage:
        return self.stages[k % len(self.stages)]

    def schedule_for(self, k: int) -> ScheduleExpr:
        st = self.descriptor(k)
        return st.schedule if st.schedule is not None else self.schedule

    @property
    def schedules(self) -> tuple[ScheduleExpr, ...]:
        return tuple(self.schedule_for(i) for i in range(len(self.stages)))

    def iter_stages(self) -> Iterator[StageInfo]:
        n = self.n0
        for k in itertools.count():
            st = self.descriptor(k)
            lam = self.schedule_for(k).evaluate(k, position=n)
            info = StageInfo(k, n, len(st.block), lam, st.block, st.gap)
            yield info
            n = info.next_n

    def stage_infos(self, count: int) -> tuple[StageInfo, ...]:
        """Stages ``0 .. count-1``; raises ScheduleExhausted if unavailable."""
        return _stage_infos(self, count)

    def feasible_stages(self, count: int) -> tuple[tuple[StageInfo, ...], str | None]:
        out = []
        try:
            for info in itertools.islice(self.iter_stages(), count):
                out.append(info)
        except ScheduleExhausted as exc:
            return tuple(out), str(exc)
        return tuple(out), None

    def stage(self, k: int) -> StageInfo:
        return self.stage_infos(k + 1)[k]

    def quotients(self) -> Iterator[int]:
        yield from self.header
        for info in self.iter_stages():
            for _ in range(info.lam):
                yield from info.block
            yield from info.gap

    def quotient_bound(self) -> int:
        """Largest quotient among ``a_1, a_2, ...`` (finite data, so always bounded)."""
        values = list(self.header[1:])
        for st in self.stages:
            values.extend(st.block)
            values.extend(st.gap)
        return max(values) if values else 1

    def max_quotient(self) -> int:
        return max(self.quotient_bound(), self.header[0])

    def to_json(self) -> dict:
        obj: dict = {
            "header": [str(a) for a in self.header],
            "layout": self.layout,
            "stages": [],
            "assertions": {"not_ultimately_periodic": self.not_ultimately_periodic},
        }
        if self.name:
            obj["name"] = self.name
        if self.schedule is not None:
            obj["schedule"] = self.schedule.to_json()
        if self.witness is not None:
            obj["assertions"]["witness"] = self.witness
        for st in self.stages:
            entry: dict = {"block": [str(b) for b in st.block]}
            if st.schedule is not None:
                entry["schedule"] = st.schedule.to_json()
            if st.gap:
                entry["gap"] = [str(g) for g in st.gap]
            obj["stages"].append(entry)
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


@functools.lru_cache(maxsize=256)
def _stage_infos(spec: QuasiPeriodicSpec, count: int) -> tuple[StageInfo, ...]:
    return tuple(itertools.islice(spec.iter_stages(), count))


def spec_from_json(obj: dict) -> QuasiPeriodicSpec:
    if not isinstance(obj, dict):
        raise ValueError("spec must be a JSON object")
    unknown = set(obj) - {"header", "layout", "stages", "schedule", "assertions", "name"}
    if unknown:
        raise ValueError(f"unknown spec fields {sorted(unknown)}")
    stages = []
    for entry in obj["stages"]:
        sched = ScheduleExpr.from_json(entry["schedule"]) if "schedule" in entry else None
        stages.append(Stage(tuple(int(b) for b in entry["block"]), sched, tuple(int(g) for g in entry.get("gap", ()))))
    assertions = obj.get("assertions", {}) or {}
    nup = assertions.get("not_ultimately_periodic")
    if nup is not None and not isinstance(nup, bool):
        raise ValueError("assertions.not_ultimately_periodic must be a boolean")
    return QuasiPeriodicSpec(
        header=tuple(int(a) for a in obj["header"]),
        stages=tuple(stages),
        layout=obj.get("layout", "packed"),
        schedule=ScheduleExpr.from_json(obj["schedule"]) if obj.get("schedule") else None,
        not_ultimately_periodic=nup,
        witness=assertions.get("witness"),
        name=obj.get("name", ""),
    )


def load_spec(path) -> QuasiPeriodicSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_json(json.load(fh))


def xi_ab(a: int, b: int, schedule: ScheduleExpr, name: str = "") -> QuasiPeriodicSpec:
    """``[0; a^lambda_0, b^lambda_1, a^lambda_2, ...]`` for distinct positive a, b."""
    if a == b:
        raise ValueError("a and b must differ")
    return QuasiPeriodicSpec(
        header=(0,),
        stages=(Stage((a,)), Stage((b,))),
        layout="packed",
        schedule=schedule,
        not_ultimately_periodic=True,
        witness="unbounded-runs",
        name=name or f"xi_{a},{b} lambda={schedule.describe()}",
    )


def generate(spec: QuasiPeriodicSpec, n: int) -> PartialQuotientStream:
    """Stream of the spec's quotients with ``a_0 .. a_n`` already materialized."""
    it = spec.quotients()
    head = next(it)
    stream = PartialQuotientStream(head, it, rule=spec.name or "quasi-periodic spec")
    stream.prefix(n)
    return stream


@dataclass(frozen=True)
class RepVerdict:
    claim: tuple[int, int, int]
    status: str  # "holds" | "fails" | "insufficient-prefix"
    first_failure: int | None = None

    @property
    def holds(self) -> bool | None:
        return None if self.status == "insufficient-prefix" else self.status == "holds"


def verify_rep(prefix: Sequence[int], claims: Sequence[tuple[int, int, int]]) -> list[RepVerdict]:
    """Check ``a_{m+r} = a_m`` for ``n <= m <= n + (lam-1) r - 1`` for every claim."""
    out = []
    for claim in claims:
        n, r, lam = claim
        if r < 1 or lam < 1 or n < 0:
            raise ValueError(f"malformed claim {claim}")
        last = n + lam * r - 1
        if last >= len(prefix):
            out.append(RepVerdict(tuple(claim), "insufficient-prefix"))
            continue
        bad = next((m for m in range(n, n + (lam - 1) * r) if prefix[m + r] != prefix[m]), None)
        out.append(RepVerdict(tuple(claim), "holds" if bad is None else "fails", bad))
    return out


# -- symbolic asymptotics -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Limit:
    """A limit value: a certified real, or +infinity when ``value`` is None."""

    value: Real | None
    note: str = "exact"

    @classmethod
    def infinite(cls) -> "Limit":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def exceeds(self, threshold) -> bool:
        if self.value is None:
            return True
        return self.value.compare(threshold) > 0

    def to_json(self) -> dict:
        if self.value is None:
            return {"value": "inf", "note": self.note}
        v = self.value
        if v.exact is not None:
            return {"value": format_rational(v.exact), "note": self.note}
        enc = v.within(Fraction(1, 10**12))
        return {"enclosure": enc.to_json(), "approx": float(enc.mid), "note": self.note}


@dataclass(frozen=True, eq=False)
class AsymptoticFacts:
    closed_form: bool
    reason: str | None = None
    lambda_unbounded: bool | None = None
    ratio_liminf: Limit | None = None
    ratio_limsup: Limit | None = None
    lam_over_n_limsup: Limit | None = None
    lam_over_n_liminf: Limit | None = None
    hypgenamel: bool | None = None
    hypgen: bool | None = None
    borne: bool | None = None
    epsilon: Fraction = Fraction(1, 100)
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        def lim(x):
            return None if x is None else x.to_json()

        return {
            "closed_form": self.closed_form,
            "reason": self.reason,
            "lambda_unbounded": self.lambda_unbounded,
            "ratio_liminf": lim(self.ratio_liminf),
            "ratio_limsup": lim(self.ratio_limsup),
            "lambda_over_n_limsup": lim(self.lam_over_n_limsup),
            "lambda_over_n_liminf": lim(self.lam_over_n_liminf),
            "hypgenamel": self.hypgenamel,
            "hypgen": self.hypgen,
            "borne": self.borne,
            "epsilon": format_rational(self.epsilon),
            "notes": list(self.notes),
        }


def _cyclic_lam_over_n(theta: Real, rs: Sequence[int]) -> tuple[Real, Real]:
    """liminf and limsup of ``lambda_k / n_k`` for ``lambda_k ~ c theta^k``.

    ``n_k ~ c sum_{i>=1} r_{k-i} theta^{k-i}``, so along the residue class
    ``rho = k mod m`` the ratio tends to ``1 / S_rho`` with
    ``S_rho = sum_{t=1}^{m} r_{rho-t} theta^{-t} / (1 - theta^{-m})``.
    """
    m = len(rs)
    inv = Real.of(1) / theta
    inv_pows = [Real.of(1)]
    for _ in range(m):
        inv_pows.append(inv_pows[-1] * inv)
    denom = Real.of(1) - inv_pows[m]
    limits = []
    for rho in range(m):
        s = Real.of(0)
        for t in range(1, m + 1):
            s = s + Real.of(rs[(rho - t) % m]) * inv_pows[t]
        limits.append(denom / s)
    if all(x.exact is not None for x in limits):
        ex = [x.exact for x in limits]
        return Real.of(min(ex)), Real.of(max(ex))
    lo = min(limits, key=lambda x: x.within(Fraction(1, 10**30)).mid)
    hi = max(limits, key=lambda x: x.within(Fraction(1, 10**30)).mid)
    return lo, hi


def schedule_asymptotics(spec: QuasiPeriodicSpec, epsilon=Fraction(1, 100)) -> AsymptoticFacts:
    """Exact verdicts on the limit conditions, when the schedule algebra allows it."""
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    scheds = set(spec.schedules)
    if len(scheds) > 1:
        return AsymptoticFacts(False, "stage descriptors use different schedules", epsilon=epsilon)
    (expr,) = scheds
    if not expr.closed_form:
        return AsymptoticFacts(False, "table schedule (horizon-only)", epsilon=epsilon)
    rs = [len(st.block) for st in spec.stages]
    one, zero = Limit(Real.of(1)), Limit(Real.of(0))
    # finitely many descriptors: r_k bounded and n_k -> infinity
    borne = True
    notes: list[str] = []
    kind = expr.kind

    if expr.eventually_constant:
        return AsymptoticFacts(True, None, False, one, one, zero, zero, False, False, borne, epsilon,
                               ("lambda_k eventually constant",))
    if kind in ("affine", "polynomial"):
        notes.append("polynomial growth: lambda_{k+1}/lambda_k -> 1, lambda_k/n_k -> 0, log lambda_k = O(log k)")
        return AsymptoticFacts(True, None, True, one, one, zero, zero, False, False, borne, epsilon, tuple(notes))
    if kind == "geometric":
        theta = Real.of(expr.theta)
        lo, hi = _cyclic_lam_over_n(theta, rs)
        notes.append("geometric: lambda_{k+1}/lambda_k -> theta; lambda_k/n_k limits per residue of k mod #descriptors")
        notes.append("n_k >= lambda_{k-1} grows exponentially while log lambda_k is linear in k")
        return AsymptoticFacts(True, None, True, Limit(theta), Limit(theta), Limit(hi), Limit(lo),
                               False, False, borne, epsilon, tuple(notes))
    # exp-power
    c, beta = expr.c, expr.beta
    if expr.argument == "position":
        inf = Limit.infinite()
        notes.append("lambda_k = exp(c n_k^beta): n_{k+1} >= lambda_k, so ratios and lambda_k/n_k diverge")
        hypgenamel = beta > Fraction(2, 3) + epsilon
        notes.append(f"log lambda_k / n_k^(eps+2/3) ~ c n_k^(beta-2/3-eps): diverges iff beta > 2/3 + eps")
        hypgen = beta >= 1
        notes.append("c n_k^beta sqrt(log n_k) / n_k diverges iff beta >= 1")
        return AsymptoticFacts(True, None, True, inf, inf, inf, inf, hypgenamel, hypgen, borne, epsilon, tuple(notes))
    notes.append("stage-indexed exp-power: n_k >= lambda_{k-1} = exp(c (k-1)^beta) outgrows every power of log lambda_k")
    if beta < 1:
        notes.append("beta < 1: lambda_{k+1}/lambda_k -> 1 and lambda_k/n_k -> 0")
        return AsymptoticFacts(True, None, True, one, one, zero, zero, False, False, borne, epsilon, tuple(notes))
    if beta == 1:
        theta = Real.of(c).exp()
        lo, hi = _cyclic_lam_over_n(theta, rs)
        notes.append("beta = 1: geometric with theta = exp(c)")
        return AsymptoticFacts(True, None, True, Limit(theta), Limit(theta), Limit(hi), Limit(lo),
                               False, False, borne, epsilon, tuple(notes))
    inf = Limit.infinite()
    notes.append("beta > 1: lambda_{k+1}/lambda_k -> infinity and lambda_k/n_k -> infinity")
    return AsymptoticFacts(True, None, True, inf, inf, inf, inf, False, False, borne, epsilon, tuple(notes))


def periodicity_status(spec: QuasiPeriodicSpec) -> tuple[str, list[str]]:
    """Classify the non-periodicity hypothesis.

    Returns one of ``provably-periodic``, ``witnessed``, ``asserted`` or
    ``unasserted`` plus caveats. Non-periodicity is never inferred from data:
    it is either asserted by the user or backed by the unbounded-runs witness
    (single-quotient blocks, neighbouring descriptors differ, no fillers,
    unbounded schedule), which forces arbitrarily long runs between changes.
    """
    caveats: list[str] = []
    no_gaps = all(not st.gap for st in spec.stages)
    blocks = {st.block for st in spec.stages}
    if no_gaps and len(blocks) == 1:
        return "provably-periodic", ["every stage repeats the same block with no fillers: ultimately periodic"]
    if all(s.closed_form and s.eventually_constant for s in spec.schedules):
        return "provably-periodic", ["schedule is eventually constant over finitely many descriptors: ultimately periodic"]
    if not spec.not_ultimately_periodic:
        return "unasserted", ["non-periodicity not asserted"]
    if spec.witness is not None:
        m = len(spec.stages)
        ok = (
            m >= 2
            and no_gaps
            and all(len(st.block) == 1 for st in spec.stages)
            and all(spec.stages[i].block != spec.stages[(i + 1) % m].block for i in range(m))
            and all(s.unbounded for s in spec.schedules)
        )
        if ok:
            return "witnessed", ["non-periodicity witnessed: unbounded runs of alternating quotients"]
        caveats.append(f"witness {spec.witness!r} could not be verified")
    caveats.append("non-periodicity user-asserted")
    return "asserted", caveats
