"""Export-size arithmetic: how many images fit in a model-export budget."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from ..exceptions import UsageError
from ..utils import setup_logger
from .exceptions import BudgetOverflowError, StrategyFormatError

logger = setup_logger(__name__)

MB = 10**6
U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class StrategyCosts:
    """One attack strategy: fixed export bytes plus bytes per stolen image.

    ``decoder_bytes`` is the part of ``fixed_bytes`` spent on the decoder.
    """

    name: str
    fixed_bytes: int
    per_image_bytes: int
    decoder_required: bool = False
    decoder_bytes: int = 0

    def __post_init__(self) -> None:
        if self.per_image_bytes < 1:
            raise UsageError(f"{self.name}: per_image_bytes 必须 ≥ 1")
        if self.fixed_bytes < 0 or not 0 <= self.decoder_bytes <= self.fixed_bytes:
            raise UsageError(f"{self.name}: fixed_bytes/decoder_bytes 无效")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "StrategyCosts":
        try:
            return cls(
                name=str(payload["name"]),
                fixed_bytes=int(payload["fixed_bytes"]),
                per_image_bytes=int(payload["per_image_bytes"]),
                decoder_required=bool(payload.get("decoder_required", False)),
                decoder_bytes=int(payload.get("decoder_bytes", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StrategyFormatError(f"策略格式错误: {exc}") from exc


@dataclass(frozen=True)
class ExportPlan:
    strategy: str
    n_images: int
    total_bytes: int
    budget_bytes: int
    feasible: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def export_size(costs: StrategyCosts, n: int) -> int:
    """fixed + n·per_image, exactly."""
    if n < 0:
        raise UsageError("图像数量不能为负")
    total = costs.fixed_bytes + n * costs.per_image_bytes
    if total > U64_MAX:
        raise BudgetOverflowError(f"{costs.name}: {n} 张图像的导出大小超出 u64")
    return total


def max_images(costs: StrategyCosts, budget: int) -> int:
    """⌊(budget − fixed) / per_image⌋, or 0 when the fixed part alone is over budget."""
    if budget < costs.fixed_bytes:
        return 0
    return (budget - costs.fixed_bytes) // costs.per_image_bytes


def plan_export(costs: StrategyCosts, budget: int) -> ExportPlan:
    if budget < costs.fixed_bytes:
        return ExportPlan(costs.name, 0, costs.fixed_bytes, budget, feasible=False)
    n = max_images(costs, budget)
    return ExportPlan(costs.name, n, export_size(costs, n), budget)


def best_strategy(costs: Sequence[StrategyCosts], budget: int) -> ExportPlan:
    """Most images within budget; ties go to the smaller export, then list order."""
    if not costs:
        raise UsageError("策略列表不能为空")
    feasible = [plan for plan in (plan_export(c, budget) for c in costs) if plan.feasible]
    if not feasible:
        logger.warning("⚠️ 预算 %s 字节下没有可行策略", budget)
        return ExportPlan("none", 0, 0, budget, feasible=False)
    # min() keeps the first of equal keys, which is list order
    best = min(feasible, key=lambda plan: (-plan.n_images, plan.total_bytes))
    logger.info("🎯 最优策略: %s，%s 张图像，%s 字节", best.strategy, best.n_images, best.total_bytes)
    return best


def crossover_budget(a: StrategyCosts, b: StrategyCosts) -> Optional[Fraction]:
    """Budget in bytes at which both strategies' continuous capacities are equal."""
    if a.per_image_bytes == b.per_image_bytes:
        return None
    numerator = a.fixed_bytes * b.per_image_bytes - b.fixed_bytes * a.per_image_bytes
    return Fraction(numerator, b.per_image_bytes - a.per_image_bytes)


def with_quantized_decoder(costs: StrategyCosts, bits: int) -> StrategyCosts:
    """Scale the decoder share of the fixed bytes by bits/32."""
    if not 1 <= bits <= 32:
        raise UsageError(f"量化位数必须在 [1,32] 内，当前 {bits}")
    decoder = math.ceil(costs.decoder_bytes * bits / 32)
    return replace(
        costs,
        name=f"{costs.name}+q{bits}",
        fixed_bytes=costs.fixed_bytes - costs.decoder_bytes + decoder,
        decoder_bytes=decoder,
    )


def with_preshared_decoder(costs: StrategyCosts) -> StrategyCosts:
    """The receiver already holds the decoder (federated-learning server)."""
    return replace(
        costs,
        name=f"{costs.name}+preshared",
        fixed_bytes=costs.fixed_bytes - costs.decoder_bytes,
        decoder_bytes=0,
        decoder_required=False,
    )


def load_strategies(payload: Any) -> List[StrategyCosts]:
    if not isinstance(payload, list):
        raise StrategyFormatError("策略文件必须是 JSON 列表")
    return [StrategyCosts.from_dict(item) for item in payload]
