import logging
import re
from dataclasses import dataclass
from typing import Optional

from src.spmodel import ScenarioSet, TwoStageProblem
from .cflp import cflp_scenarios, gen_cflp
from .invp import gen_invp, invp_scenarios
from .mixed_recourse import mixed_recourse_scenarios
from .sslp import gen_sslp, sslp_scenarios

logger = logging.getLogger(__name__)

FAMILIES = ("CFLP", "SSLP", "INVP")


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    n: Optional[int] = None
    m: Optional[int] = None
    second_stage_kind: Optional[str] = None
    technology: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        family = self.family.upper()
        object.__setattr__(self, "family", family)
        if family not in FAMILIES:
            raise ValueError(f"unknown family '{self.family}', expected one of {FAMILIES}")
        if family in ("CFLP", "SSLP"):
            if self.n is None or self.m is None or self.n < 1 or self.m < 1:
                raise ValueError(f"{family} needs sizes n >= 1 and m >= 1")
        else:
            if self.second_stage_kind not in ("B", "I") or self.technology not in ("E", "H"):
                raise ValueError("INVP needs second_stage_kind in {B, I} and technology in {E, H}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def name(self) -> str:
        if self.family == "INVP":
            return f"INVP_{self.second_stage_kind}_{self.technology}"
        return f"{self.family}_{self.n}_{self.m}"

    @classmethod
    def from_name(cls, name: str, seed: int = 0) -> "InstanceSpec":
        """Parse CFLP_n_m, SSLP_n_m or INVP_v_t, optionally with a trailing scenario count"""
        match = re.fullmatch(r"(CFLP|SSLP)_(\d+)_(\d+)(?:_\d+)?", name.upper())
        if match:
            return cls(match.group(1), n=int(match.group(2)), m=int(match.group(3)), seed=seed)
        match = re.fullmatch(r"INVP_([BI])_([EH])(?:_\d+)?", name.upper())
        if match:
            return cls("INVP", second_stage_kind=match.group(1), technology=match.group(2), seed=seed)
        raise ValueError(f"cannot parse instance name '{name}'")


def instance_name(problem: TwoStageProblem, n_scenarios: Optional[int] = None) -> str:
    return problem.name if n_scenarios is None else f"{problem.name}_{n_scenarios}"


def generate_instance(spec: InstanceSpec) -> TwoStageProblem:
    if spec.family == "CFLP":
        return gen_cflp(spec.n, spec.m, spec.seed)
    if spec.family == "SSLP":
        return gen_sslp(spec.n, spec.m, spec.seed)
    return gen_invp(spec.second_stage_kind, spec.technology, spec.seed)


def sample_scenarios(problem: TwoStageProblem, count: int, seed: int, grid: bool = False) -> ScenarioSet:
    """Draw a scenario set with the sampler of the problem's family"""
    if count < 1:
        raise ValueError("scenario count must be at least 1")
    family = problem.family
    if grid and family != "INVP":
        raise ValueError("grid scenarios are only defined for INVP")
    if family == "CFLP":
        scenarios = cflp_scenarios(problem, count, seed)
    elif family == "SSLP":
        scenarios = sslp_scenarios(problem, count, seed)
    elif family == "INVP":
        scenarios = invp_scenarios(problem, count, seed, grid=grid)
    elif family == "MIXED":
        scenarios = mixed_recourse_scenarios(problem)
    else:
        raise ValueError(f"problem {problem.name} has no known family")
    logger.info(f"Sampled {len(scenarios)} scenarios for {problem.name} (seed {seed})")
    return scenarios
