"""Round-based exfiltration through federated-learning model updates.

Every round each node exports an update carrying up to
``per_round_budget_bytes`` of image-code bytes, streamed FIFO across its
images. The server collects updates in node order and, optionally, runs
the export scanner on each update as a measurement.
"""

from __future__ import annotations

import asyncio
import math
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional, Tuple

import numpy as np

from ..checkpoint import ArchitectureManifest, Checkpoint
from ..checkpoint.synthetic import layers_for_bytes, synthetic_model
from ..config import MIN_CHUNK_SIZE
from ..exceptions import UsageError
from ..scanner import Verdict, scan
from ..stash import DisguiseMode, embed
from ..utils import ceil_div, setup_logger
from .models import NodeSummary, RoundEvent, SimConfig, SimReport

logger = setup_logger(__name__)


def rounds_to_exfiltrate(total_bytes: int, per_round_budget: int) -> int:
    """⌈total / budget⌉; zero bytes need zero rounds."""
    if per_round_budget < 1:
        raise UsageError("per_round_budget 必须 ≥ 1")
    return ceil_div(total_bytes, per_round_budget)


def sample_code_sizes(config: SimConfig) -> List[List[int]]:
    """Explicit per-node sizes, or lognormal draws seeded by ``config.seed``."""
    if config.code_sizes is not None:
        return [list(sizes) for sizes in config.code_sizes]
    sampling = config.sampling
    rng = np.random.default_rng(config.seed)
    # mu chosen so the lognormal mean equals mean_bytes
    mu = math.log(sampling.mean_bytes) - sampling.sigma**2 / 2.0
    return [
        [max(1, int(round(x))) for x in rng.lognormal(mu, sampling.sigma, sampling.images_per_node)]
        for _ in range(config.n_nodes)
    ]


@dataclass
class NodeUpdate:
    node_id: int
    bytes_smuggled: int
    images_completed: int


class SimNode:
    """One hospital node streaming its image codes out, oldest image first."""

    def __init__(self, node_id: int, sizes: List[int], budget: int, whole_image: bool) -> None:
        self.node_id = node_id
        self.sizes = list(sizes)
        self.budget = budget
        self.whole_image = whole_image
        self.cumulative_bytes = 0
        self.image_rounds: List[Optional[int]] = [None] * len(sizes)
        # (image index, bytes still to send)
        self._queue: Deque[Tuple[int, int]] = deque(enumerate(self.sizes))
        self._stall_logged = False

    @property
    def done(self) -> bool:
        return not self._queue

    def _send_bytes(self, round_index: int) -> Tuple[int, int]:
        remaining = self.budget
        sent = completed = 0
        while self._queue and remaining:
            image, left = self._queue[0]
            take = min(left, remaining)
            sent += take
            remaining -= take
            if take == left:
                self._queue.popleft()
                self.image_rounds[image] = round_index
                completed += 1
            else:
                self._queue[0] = (image, left - take)
        return sent, completed

    def _send_whole_images(self, round_index: int) -> Tuple[int, int]:
        remaining = self.budget
        sent = completed = 0
        while self._queue and self._queue[0][1] <= remaining:
            image, size = self._queue.popleft()
            sent += size
            remaining -= size
            self.image_rounds[image] = round_index
            completed += 1
        if self._queue and self._queue[0][1] > self.budget and not self._stall_logged:
            logger.warning(
                "⚠️ 节点 %s 的图像 %s (%s 字节) 超过单轮预算，整图模式下无法发送",
                self.node_id,
                self._queue[0][0],
                self._queue[0][1],
            )
            self._stall_logged = True
        return sent, completed

    def export_update(self, round_index: int) -> NodeUpdate:
        if self.whole_image:
            sent, completed = self._send_whole_images(round_index)
        else:
            sent, completed = self._send_bytes(round_index)
        self.cumulative_bytes += sent
        return NodeUpdate(self.node_id, sent, completed)

    def summary(self) -> NodeSummary:
        finished = [r for r in self.image_rounds if r is not None]
        return NodeSummary(
            node_id=self.node_id,
            total_code_bytes=sum(self.sizes),
            cumulative_bytes=self.cumulative_bytes,
            images_total=len(self.sizes),
            images_completed=len(finished),
            rounds_to_complete=max(finished) if self.done and finished else None,
            image_rounds=list(self.image_rounds),
        )


class AggregationServer:
    """Attacker-controlled server; records every update and optionally audits it."""

    def __init__(self, config: SimConfig) -> None:
        self.config = config
        self.events: List[RoundEvent] = []
        self._base: Optional[Checkpoint] = None
        self._manifest: Optional[ArchitectureManifest] = None
        if config.scanner_enabled:
            layers = layers_for_bytes(config.base_model_bytes) if config.base_model_bytes else None
            self._base = synthetic_model(config.seed, layers)
            self._manifest = ArchitectureManifest.from_checkpoint(self._base)
            self._mode = (
                DisguiseMode.mimic(config.disguise_secret)
                if config.disguise == "mimic"
                else DisguiseMode.dedicated()
            )

    def _audit(self, round_index: int, update: NodeUpdate) -> Verdict:
        carrier = self._base
        if update.bytes_smuggled:
            rng = np.random.default_rng([self.config.seed, round_index, update.node_id])
            payload = rng.bytes(update.bytes_smuggled)
            chunk_size = max(MIN_CHUNK_SIZE, update.bytes_smuggled)
            carrier = embed(self._base, payload, self._mode, chunk_size).checkpoint
        manifest = self._manifest if self.config.scan_with_manifest else None
        return scan(carrier, manifest, self.config.scanner_thresholds).verdict

    async def _receive(self, round_index: int, update: NodeUpdate) -> RoundEvent:
        flagged = verdict = None
        if self.config.scanner_enabled:
            result = await asyncio.to_thread(self._audit, round_index, update)
            verdict = result.value
            flagged = result is not Verdict.CLEAN
        return RoundEvent(
            round_index=round_index,
            node_id=update.node_id,
            bytes_smuggled=update.bytes_smuggled,
            images_completed=update.images_completed,
            flagged=flagged,
            verdict=verdict,
        )

    async def receive_round(self, round_index: int, updates: List[NodeUpdate]) -> List[RoundEvent]:
        """Audit a round's updates in worker threads; events stay in node order."""
        events = await asyncio.gather(*(self._receive(round_index, update) for update in updates))
        self.events.extend(events)
        return list(events)


async def run_simulation_async(config: SimConfig) -> SimReport:
    config.validate()
    sizes = sample_code_sizes(config)
    nodes = [
        SimNode(node_id, node_sizes, config.per_round_budget_bytes, config.whole_image)
        for node_id, node_sizes in enumerate(sizes)
    ]
    server = AggregationServer(config)
    logger.info(
        "🚀 开始 FL 模拟: %s 个节点，%s 轮，每轮预算 %s 字节",
        config.n_nodes,
        config.rounds,
        config.per_round_budget_bytes,
    )

    for round_index in range(1, config.rounds + 1):
        updates = [node.export_update(round_index) for node in nodes]
        await server.receive_round(round_index, updates)

    report = SimReport(config=config, events=server.events, nodes=[n.summary() for n in nodes])
    totals = report.totals
    logger.info(
        "✅ FL 模拟结束: 已完成 %s/%s 张图像，共 %s 字节",
        totals["images_completed"],
        totals["images_total"],
        totals["bytes_smuggled"],
    )
    return report


def run_simulation(config: SimConfig) -> SimReport:
    return asyncio.run(run_simulation_async(config))
