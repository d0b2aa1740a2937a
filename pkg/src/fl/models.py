"""Simulator configuration, per-round events, and the final report."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional

from ..config import Config
from ..scanner import ScanThresholds
from ..utils import dump_json
from .exceptions import SimConfigError

INCOMPLETE = "incomplete"
DEFAULT_SECRET = "fl-sim"


@dataclass(frozen=True)
class CodeSizeSampling:
    """Lognormal code sizes with the given mean (bytes) and log-space sigma."""

    mean_bytes: float
    sigma: float
    images_per_node: int


@dataclass
class SimConfig:
    seed: int = 0
    n_nodes: int = 1
    rounds: int = 1
    per_round_budget_bytes: int = 1
    base_model_bytes: int = 0
    code_sizes: Optional[List[List[int]]] = None
    sampling: Optional[CodeSizeSampling] = None
    whole_image: bool = False
    scanner_enabled: bool = False
    scanner_thresholds: ScanThresholds = field(
        default_factory=lambda: ScanThresholds.from_config(Config.scanner_settings())
    )
    disguise: str = field(default_factory=lambda: Config.SIM_SCAN_DISGUISE)
    disguise_secret: str = DEFAULT_SECRET
    scan_with_manifest: bool = field(default_factory=lambda: Config.SIM_SCAN_WITH_MANIFEST)

    def validate(self) -> None:
        problems: List[str] = []
        if self.seed < 0:
            problems.append("seed 不能为负")
        if self.n_nodes < 1:
            problems.append("n_nodes 必须 ≥ 1")
        if self.rounds < 1:
            problems.append("rounds 必须 ≥ 1")
        if self.per_round_budget_bytes < 1:
            problems.append("per_round_budget_bytes 必须 ≥ 1")
        if self.base_model_bytes < 0:
            problems.append("base_model_bytes 不能为负")
        if (self.code_sizes is None) == (self.sampling is None):
            problems.append("code_sizes 与 sampling 必须且只能提供一个")
        if self.code_sizes is not None:
            if len(self.code_sizes) != self.n_nodes:
                problems.append(f"code_sizes 需要 {self.n_nodes} 个节点列表")
            for node, sizes in enumerate(self.code_sizes):
                if not sizes:
                    problems.append(f"节点 {node} 的 code_sizes 为空")
                elif any(int(size) < 1 for size in sizes):
                    problems.append(f"节点 {node} 的 code size 必须 ≥ 1")
        if self.sampling is not None:
            if self.sampling.mean_bytes < 1 or self.sampling.sigma < 0:
                problems.append("sampling 需要 mean_bytes ≥ 1 且 sigma ≥ 0")
            if self.sampling.images_per_node < 1:
                problems.append("sampling.images_per_node 必须 ≥ 1")
        if self.disguise not in {"dedicated", "mimic"}:
            problems.append("disguise 只能是 dedicated 或 mimic")
        if problems:
            raise SimConfigError("模拟配置无效: " + "; ".join(problems))

    def with_seed(self, seed: int) -> "SimConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["scanner_thresholds"] = asdict(self.scanner_thresholds)
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "SimConfig":
        if not isinstance(payload, dict):
            raise SimConfigError("模拟配置必须是 JSON 对象")
        data = {str(k).replace("-", "_"): v for k, v in payload.items()}
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise SimConfigError(f"未知的模拟配置项: {unknown}")
        try:
            if data.get("sampling") is not None:
                data["sampling"] = CodeSizeSampling(**data["sampling"])
            if data.get("code_sizes") is not None:
                data["code_sizes"] = [[int(s) for s in sizes] for sizes in data["code_sizes"]]
            if data.get("scanner_thresholds") is not None:
                data["scanner_thresholds"] = ScanThresholds(**data["scanner_thresholds"])
            for name in ("seed", "n_nodes", "rounds", "per_round_budget_bytes", "base_model_bytes"):
                if name in data:
                    data[name] = int(data[name])
            config = cls(**data)
        except (TypeError, ValueError) as exc:
            raise SimConfigError(f"模拟配置格式错误: {exc}") from exc
        config.validate()
        return config


@dataclass(frozen=True)
class RoundEvent:
    round_index: int
    node_id: int
    bytes_smuggled: int
    images_completed: int
    flagged: Optional[bool] = None
    verdict: Optional[str] = None


@dataclass
class NodeSummary:
    node_id: int
    total_code_bytes: int
    cumulative_bytes: int
    images_total: int
    images_completed: int
    rounds_to_complete: Optional[int]
    image_rounds: List[Optional[int]]

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        if self.rounds_to_complete is None:
            payload["rounds_to_complete"] = INCOMPLETE
        return payload


@dataclass
class SimReport:
    config: SimConfig
    events: List[RoundEvent]
    nodes: List[NodeSummary]

    @property
    def totals(self) -> Dict[str, int]:
        return {
            "bytes_smuggled": sum(n.cumulative_bytes for n in self.nodes),
            "images_completed": sum(n.images_completed for n in self.nodes),
            "images_total": sum(n.images_total for n in self.nodes),
            "flagged_updates": sum(1 for e in self.events if e.flagged),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "events": [asdict(e) for e in self.events],
            "nodes": [n.to_dict() for n in self.nodes],
            "totals": self.totals,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())
