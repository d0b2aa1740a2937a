"""
二进制解析器模糊测试：WDC / NPZ / RVOL / SliceCode / VolumeCode / PayloadManifest。

任意字节输入只允许抛出工具集自身的 DataError 子类（CheckpointError、CodecError、
VolumeError、StashDataError 等）；其他异常一律视为解析器缺陷并原样抛出。

已安装 atheris（仅 Linux）时使用覆盖率引导模糊测试，否则退回到基于 numpy 的
随机字节 + 种子变异循环。

用法示例：
  python scripts/fuzz_parsers.py --target wdc --iterations 20000
  python scripts/fuzz_parsers.py --target all --seed 3
  python scripts/fuzz_parsers.py --target npz --atheris -- -max_total_time=60
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.append(str(ROOT))

from src.checkpoint import Checkpoint, TensorEntry  # noqa: E402
from src.checkpoint.npz import parse_npz, serialize_npz  # noqa: E402
from src.checkpoint.wdc import parse_wdc  # noqa: E402
from src.codec import SliceCode, VolumeCode, encode_volume  # noqa: E402
from src.exceptions import DataError  # noqa: E402
from src.stash import DisguiseMode, PayloadManifest, embed  # noqa: E402
from src.stash.embedding import manifest_key  # noqa: E402
from src.utils import setup_logger  # noqa: E402
from src.volume import generate_phantom, normalize_minmax, parse_rvol, rvol_bytes  # noqa: E402

logger = setup_logger("fuzz_parsers")

GOLDEN_WDC = ROOT / "tests" / "fixtures" / "golden_two_entries.wdc"


def _manifest(data: bytes) -> None:
    PayloadManifest.from_bytes(data, allow_padding=True)


TARGETS: Dict[str, Callable[[bytes], object]] = {
    "wdc": parse_wdc,
    "npz": parse_npz,
    "rvol": parse_rvol,
    "slice": SliceCode.from_bytes,
    "volume": VolumeCode.from_bytes,
    "manifest": _manifest,
}


def seed_corpus(target: str) -> List[bytes]:
    """Valid inputs that mutation starts from."""
    volume, _ = generate_phantom(0, (2, 64, 64), 2)
    code = encode_volume(normalize_minmax(volume), "pad", 50)
    small = Checkpoint([TensorEntry.from_array("w", np.arange(6, dtype=np.float32))])
    if target == "wdc":
        return [GOLDEN_WDC.read_bytes()] if GOLDEN_WDC.exists() else []
    if target == "npz":
        return [serialize_npz(small)]
    if target == "rvol":
        return [rvol_bytes(volume)]
    if target == "slice":
        return [code.codes[0].to_bytes()]
    if target == "volume":
        return [code.to_bytes()]
    mode = DisguiseMode.dedicated()
    stashed = embed(small, b"x" * 300, mode, 64).checkpoint
    return [stashed.get_entry(manifest_key(mode)).payload]


def run_one(target: str, data: bytes) -> None:
    try:
        TARGETS[target](data)
    except DataError:
        pass


def _mutate(rng: np.random.Generator, data: bytes) -> bytes:
    buf = bytearray(data)
    action = rng.integers(4)
    if action == 0 and buf:
        for pos in rng.integers(0, len(buf), size=rng.integers(1, 9)):
            buf[pos] = int(rng.integers(256))
    elif action == 1 and buf:
        del buf[int(rng.integers(len(buf))) :]
    elif action == 2:
        at = int(rng.integers(len(buf) + 1))
        buf[at:at] = rng.bytes(int(rng.integers(1, 33)))
    else:
        return rng.bytes(int(rng.integers(0, 257)))
    return bytes(buf)


def random_loop(target: str, iterations: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    corpus = seed_corpus(target) or [b""]
    for _ in range(iterations):
        parent = corpus[int(rng.integers(len(corpus)))]
        run_one(target, _mutate(rng, parent))
    logger.info("✅ %s: %s 次输入均只抛出 DataError", target, iterations)
    return iterations


def run_atheris(target: str, extra: List[str]) -> None:
    import atheris

    corpus_dir = ROOT / ".fuzz" / target
    corpus_dir.mkdir(parents=True, exist_ok=True)
    for i, sample in enumerate(seed_corpus(target)):
        (corpus_dir / f"seed_{i}").write_bytes(sample)

    def test_one_input(data: bytes) -> None:
        run_one(target, data)

    atheris.Setup([sys.argv[0], str(corpus_dir), *extra], test_one_input)
    atheris.Fuzz()


def main() -> int:
    parser = argparse.ArgumentParser(description="解析器模糊测试")
    parser.add_argument("--target", choices=[*TARGETS, "all"], default="all", help="要测试的解析器")
    parser.add_argument("--iterations", type=int, default=5000, help="随机模式下每个解析器的输入数")
    parser.add_argument("--seed", type=int, default=0, help="随机模式的种子")
    parser.add_argument("--atheris", action="store_true", help="使用 atheris 覆盖率引导模式（单个 target）")
    parser.add_argument("extra", nargs=argparse.REMAINDER, help="透传给 libFuzzer 的参数（放在 -- 之后）")
    args = parser.parse_args()

    if args.atheris:
        if args.target == "all":
            parser.error("atheris 模式需要指定单个 --target")
        try:
            run_atheris(args.target, [a for a in args.extra if a != "--"])
        except ImportError:
            logger.error("❌ 未安装 atheris，去掉 --atheris 使用随机模式")
            return 1
        return 0

    targets = list(TARGETS) if args.target == "all" else [args.target]
    for offset, target in enumerate(targets):
        random_loop(target, args.iterations, args.seed + offset)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
