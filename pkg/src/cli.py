"""
权重文件数据窃取工具集的命令行入口。

攻击侧：phantom → encode → carrier → embed → extract → decode → metrics
防御侧：manifest → scan
分析：plan（导出预算 / 表 4 复现）、simulate（联邦学习轮次模拟）

用法示例：
  python -m src phantom --seed 1 --dims 64,256,256 --out vol.rvol --mask-out mask.rvol
  python -m src encode --input vol.rvol --out vol.vc --mode high --quality 75
  python -m src --json plan --table4
  python -m src scan --input model.wdc --manifest manifest.json

退出码：0 成功 / Clean，1 Suspicious，2 Flagged，64 参数错误，65 数据错误，74 I/O 错误。
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from .checkpoint import ArchitectureManifest, ContainerFormat, load_checkpoint, save_checkpoint
from .checkpoint.synthetic import layers_for_bytes, synthetic_model
from .codec import (
    bpp,
    decode_volume,
    encode_volume,
    practical_ratio,
    read_volume_code,
    write_volume_code,
    zip_mask,
    zip_volume,
)
from .config import Config, load_json_config
from .exceptions import DataError, UsageError
from .fl import SimConfig, run_simulation
from .metrics import MaskVolume, MetricReport, fidelity_report, segmentation_report
from .planner import (
    best_strategy,
    crossover_budget,
    fl_budget_check,
    load_strategies,
    table4_reproduction,
)
from .scanner import ScanThresholds, scan
from .stash import DisguiseMode, embed, embedding_overhead, extract
from .utils import dump_json, setup_logger
from .volume import (
    TilingMode,
    generate_phantom,
    load_volume,
    normalize_minmax,
    save_volume,
)

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_IO = 74

_SIZE_UNITS = {"": 1, "B": 1, "KB": 10**3, "MB": 10**6, "GB": 10**9, "KIB": 1 << 10, "MIB": 1 << 20}


class CliUsageError(UsageError):
    pass


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting with status 2, so main() maps it to 64."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliUsageError(f"{self.prog}: {message}")


def _parse_dims(text: str) -> tuple[int, int, int]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"维度格式应为 D,H,W: {text}") from exc
    if len(dims) != 3:
        raise argparse.ArgumentTypeError(f"维度格式应为 D,H,W: {text}")
    return dims  # type: ignore[return-value]


def _parse_spacing(text: str) -> tuple[float, float, float]:
    try:
        spacing = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"体素间距格式应为 sz,sy,sx: {text}") from exc
    if len(spacing) != 3:
        raise argparse.ArgumentTypeError(f"体素间距格式应为 sz,sy,sx: {text}")
    return spacing  # type: ignore[return-value]


def parse_size(text: str | int) -> int:
    """Byte count with an optional unit suffix (MB = 10^6, MiB = 2^20)."""
    if isinstance(text, int):
        return text
    raw = str(text).strip().upper().replace(" ", "")
    digits = raw.rstrip("KMGIB")
    unit = raw[len(digits) :]
    if unit not in _SIZE_UNITS or not digits:
        raise argparse.ArgumentTypeError(f"无法解析大小: {text}")
    try:
        value = float(digits) * _SIZE_UNITS[unit]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"无法解析大小: {text}") from exc
    if value < 0 or value != int(value):
        raise argparse.ArgumentTypeError(f"大小必须是非负整数字节: {text}")
    return int(value)


def _mode(args: argparse.Namespace) -> DisguiseMode:
    if args.disguise == "mimic" and not args.secret:
        raise CliUsageError("mimic 伪装模式需要 --secret")
    return DisguiseMode.parse(args.disguise, args.secret)


def _emit(args: argparse.Namespace, payload: Any, text: Optional[str] = None) -> None:
    if args.json or text is None:
        print(dump_json(payload))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_phantom(args: argparse.Namespace) -> int:
    volume, mask = generate_phantom(args.seed, args.dims, args.ellipsoids)
    written = save_volume(volume, args.out)
    result: Dict[str, Any] = {"volume": str(args.out), "bytes": written, "dims": list(volume.shape)}
    if args.mask_out:
        result["mask"] = str(args.mask_out)
        result["mask_bytes"] = save_volume(mask, args.mask_out)
    logger.info("🧪 phantom 已生成: %s", args.out)
    _emit(args, result, f"phantom {volume.shape} → {args.out} ({written} 字节)")
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    volume = load_volume(args.input)
    code = encode_volume(normalize_minmax(volume), args.mode, args.quality, threads=args.threads)
    written = write_volume_code(code, args.out)
    zip_bytes = len(zip_volume(volume))
    result = {
        "output": str(args.out),
        "mode": code.mode.value,
        "q": code.q,
        "codes": len(code.codes),
        "total_bytes": code.total_bytes,
        "file_bytes": written,
        "bpp": bpp(code.total_bytes, volume.voxel_count),
        "zip_bytes": zip_bytes,
        "practical_ratio": practical_ratio(code.total_bytes, zip_bytes),
    }
    _emit(args, result, f"编码完成: {len(code.codes)} 个 SliceCode，{code.total_bytes} 字节 → {args.out}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    code = read_volume_code(args.input)
    volume = decode_volume(code, threads=args.threads)
    written = save_volume(volume, args.out)
    result = {"output": str(args.out), "dims": list(volume.shape), "bytes": written}
    _emit(args, result, f"解码完成: {volume.shape} → {args.out}")
    return EXIT_OK


def cmd_zipvol(args: argparse.Namespace) -> int:
    volume = load_volume(args.input)
    if args.mask:
        archive = zip_mask(volume.voxels >= 0.5)
    else:
        archive = zip_volume(volume)
    Path(args.out).write_bytes(archive)
    result = {
        "output": str(args.out),
        "zip_bytes": len(archive),
        "voxels": volume.voxel_count,
        "bpp": bpp(len(archive), volume.voxel_count),
    }
    _emit(args, result, f"ZIP 完成: {len(archive)} 字节 → {args.out}")
    return EXIT_OK


def cmd_carrier(args: argparse.Namespace) -> int:
    layers = layers_for_bytes(args.bytes) if args.bytes else None
    checkpoint = synthetic_model(args.seed, layers, distribution=args.distribution)
    written = save_checkpoint(checkpoint, args.out, args.format)
    result = {"output": str(args.out), "entries": len(checkpoint), "file_bytes": written}
    _emit(args, result, f"载体模型已生成: {len(checkpoint)} 个张量 → {args.out}")
    return EXIT_OK


def cmd_manifest(args: argparse.Namespace) -> int:
    manifest = ArchitectureManifest.from_checkpoint(load_checkpoint(args.input))
    manifest.save(args.out)
    result = {"output": str(args.out), "entries": len(manifest.entries)}
    result["expected_total_bytes"] = manifest.expected_total_bytes
    _emit(args, result, f"架构清单已写入 {args.out}")
    return EXIT_OK


def cmd_embed(args: argparse.Namespace) -> int:
    mode = _mode(args)
    carrier = load_checkpoint(args.carrier)
    payload = Path(args.payload).read_bytes()
    label = args.label if args.label is not None else Path(args.payload).name
    result = embed(carrier, payload, mode, args.chunk_size, label=label)
    written = save_checkpoint(result.checkpoint, args.out, args.format)
    summary = {
        "output": str(args.out),
        "disguise": mode.name,
        "payload_bytes": len(payload),
        "chunks": result.manifest.chunk_count,
        "added_bytes": result.added_bytes,
        "overhead_bytes": embedding_overhead(len(payload), mode, args.chunk_size, label=label),
        "file_bytes": written,
    }
    _emit(args, summary, f"已嵌入 {len(payload)} 字节 ({result.manifest.chunk_count} 个 chunk) → {args.out}")
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    mode = _mode(args)
    payload, manifest = extract(load_checkpoint(args.input), mode)
    Path(args.out).write_bytes(payload)
    result = {
        "output": str(args.out),
        "payload_bytes": len(payload),
        "chunks": manifest.chunk_count,
        "label": manifest.label,
    }
    _emit(args, result, f"已提取 {len(payload)} 字节 → {args.out}")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    settings = Config.scanner_settings()
    overrides = {
        "entropy_threshold": args.entropy_threshold,
        "incompressible_threshold": args.incompressible_threshold,
        "min_entry_bytes": args.min_entry_bytes,
        "size_tolerance": args.size_tolerance,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    manifest = ArchitectureManifest.load(args.manifest) if args.manifest else None
    report = scan(
        load_checkpoint(args.input),
        manifest,
        ScanThresholds.from_config(settings),
        threads=args.threads,
    )
    print(dump_json(report.to_dict()))
    return report.verdict.exit_code


def cmd_plan(args: argparse.Namespace) -> int:
    if args.table4:
        if args.budget is not None:
            raise CliUsageError("--table4 不能与 --budget 同时使用")
        rows = table4_reproduction()
        payload: Any = [row.to_dict() for row in rows]
        text = "\n".join(f"{row.dataset}: {row.as_tuple()}" for row in rows)
        if args.fl_check:
            payload = {"table4": payload, "fl_check": fl_budget_check()}
            text += f"\nFL: {payload['fl_check']}"
        _emit(args, payload, text)
        return EXIT_OK

    if args.costs is None or args.budget is None:
        raise CliUsageError("plan 需要 --table4，或同时提供 --costs 与 --budget")
    strategies = load_strategies(json.loads(Path(args.costs).read_text(encoding="utf-8")))
    plan = best_strategy(strategies, args.budget)
    result: Dict[str, Any] = plan.to_dict()
    if len(strategies) >= 2:
        crossover = crossover_budget(strategies[0], strategies[1])
        result["crossover_bytes"] = None if crossover is None else float(crossover)
    if args.fl_check:
        result["fl_check"] = fl_budget_check()
    _emit(args, result, f"最优策略: {plan.strategy}，{plan.n_images} 张图像，{plan.total_bytes} 字节")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = SimConfig.from_dict(json.loads(Path(args.sim_config).read_text(encoding="utf-8")))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    report = run_simulation(config)
    print(report.to_json())
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    report = MetricReport()
    if bool(args.reference) != bool(args.test):
        raise CliUsageError("--reference 与 --test 必须同时提供")
    if bool(args.mask_reference) != bool(args.mask_test):
        raise CliUsageError("--mask-reference 与 --mask-test 必须同时提供")
    if not args.reference and not args.mask_reference:
        raise CliUsageError("metrics 至少需要一对体数据或一对 mask")

    if args.reference:
        code_bytes = Path(args.code).stat().st_size if args.code else None
        zip_bytes = Path(args.zip).stat().st_size if args.zip else None
        report = fidelity_report(
            load_volume(args.reference),
            load_volume(args.test),
            code_bytes=code_bytes,
            zip_bytes=zip_bytes,
        )
    if args.mask_reference:
        g = MaskVolume.from_volume(load_volume(args.mask_reference), args.spacing)
        p = MaskVolume.from_volume(load_volume(args.mask_test), args.spacing)
        report = report.merge(segmentation_report(p, g))
    print(report.to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_disguise(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--disguise", choices=("dedicated", "mimic"), default="dedicated", help="伪装模式")
    sub.add_argument("--secret", default=None, help="mimic 模式的密钥")


def build_parser() -> _Parser:
    parser = _Parser(prog="python -m src", description="权重文件数据窃取与防御工具集")
    parser.add_argument("--json", action="store_true", help="在标准输出打印 JSON")
    parser.add_argument("--config", default=None, help="JSON 配置文件（命令行参数优先）")
    parser.add_argument("--threads", type=int, default=Config.CODEC_THREADS, help="并行线程上限")
    parser.add_argument("--log-level", default=None, help="日志级别，覆盖 LOG_LEVEL")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs.required = True

    sub = subs.add_parser("phantom", help="生成合成 CT 体数据与 mask")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--dims", type=_parse_dims, default=(64, 256, 256), help="D,H,W")
    sub.add_argument("--ellipsoids", type=int, default=4)
    sub.add_argument("--out", required=True)
    sub.add_argument("--mask-out", default=None)
    sub.set_defaults(handler=cmd_phantom)

    sub = subs.add_parser("encode", help="有损编码体数据为 VolumeCode")
    sub.add_argument("--input", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--mode", choices=[m.value for m in TilingMode], default=None)
    sub.add_argument("--quality", type=int, default=Config.CODEC_QUALITY)
    sub.set_defaults(handler=cmd_encode)

    sub = subs.add_parser("decode", help="VolumeCode 解码为体数据")
    sub.add_argument("--input", required=True)
    sub.add_argument("--out", required=True)
    sub.set_defaults(handler=cmd_decode)

    sub = subs.add_parser("zipvol", help="无损 ZIP 路径")
    sub.add_argument("--input", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--mask", action="store_true", help="按 1 bit/体素打包 mask 后再 ZIP")
    sub.set_defaults(handler=cmd_zipvol)

    sub = subs.add_parser("carrier", help="生成高斯权重载体模型")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--bytes", type=parse_size, default=0, help="权重总大小，0 表示默认小模型")
    sub.add_argument("--distribution", choices=("gaussian", "uniform"), default="gaussian")
    sub.add_argument("--format", choices=[f.value for f in ContainerFormat], default=None)
    sub.add_argument("--out", required=True)
    sub.set_defaults(handler=cmd_carrier)

    sub = subs.add_parser("manifest", help="从干净模型导出架构清单")
    sub.add_argument("--input", required=True)
    sub.add_argument("--out", required=True)
    sub.set_defaults(handler=cmd_manifest)

    sub = subs.add_parser("embed", help="把 payload 藏进权重文件")
    sub.add_argument("--carrier", required=True)
    sub.add_argument("--payload", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--chunk-size", type=parse_size, default=Config.STASH_CHUNK_SIZE)
    sub.add_argument("--label", default=Config.STASH_LABEL or None)
    sub.add_argument("--format", choices=[f.value for f in ContainerFormat], default=None)
    _add_disguise(sub)
    sub.set_defaults(handler=cmd_embed)

    sub = subs.add_parser("extract", help="从权重文件取回 payload")
    sub.add_argument("--input", required=True)
    sub.add_argument("--out", required=True)
    _add_disguise(sub)
    sub.set_defaults(handler=cmd_extract)

    sub = subs.add_parser("scan", help="审计导出模型（退出码 0/1/2）")
    sub.add_argument("--input", required=True)
    sub.add_argument("--manifest", default=None)
    sub.add_argument("--entropy-threshold", type=float, default=None)
    sub.add_argument("--incompressible-threshold", type=float, default=None)
    sub.add_argument("--min-entry-bytes", type=int, default=None)
    sub.add_argument("--size-tolerance", type=float, default=None)
    sub.set_defaults(handler=cmd_scan)

    sub = subs.add_parser("plan", help="导出预算规划")
    source = sub.add_mutually_exclusive_group()
    source.add_argument("--table4", action="store_true", help="复现 100 张图像的导出大小表")
    source.add_argument("--costs", default=None, help="StrategyCosts JSON 列表")
    sub.add_argument("--budget", type=parse_size, default=None)
    sub.add_argument("--fl-check", action="store_true", help="附带 FL 100MB 预算核对")
    sub.set_defaults(handler=cmd_plan)

    sub = subs.add_parser("simulate", help="联邦学习窃取模拟")
    sub.add_argument("--sim-config", required=True)
    sub.add_argument("--seed", type=int, default=None)
    sub.set_defaults(handler=cmd_simulate)

    sub = subs.add_parser("metrics", help="计算 PSNR/MS-SSIM 与分割指标")
    sub.add_argument("--reference", default=None)
    sub.add_argument("--test", default=None)
    sub.add_argument("--mask-reference", default=None)
    sub.add_argument("--mask-test", default=None)
    sub.add_argument("--spacing", type=_parse_spacing, default=(1.0, 1.0, 1.0), help="sz,sy,sx 毫米")
    sub.add_argument("--code", default=None, help="VolumeCode 文件，用于 BPP")
    sub.add_argument("--zip", default=None, help="ZIP 文件，用于实际压缩比")
    sub.set_defaults(handler=cmd_metrics)

    parser.subparser_map = dict(subs.choices)  # type: ignore[attr-defined]
    return parser


def _apply_json_defaults(parser: _Parser, path: str) -> None:
    """Config-file values become defaults, so explicit flags still win."""
    values = load_json_config(path)
    values.pop("config", None)
    own = {action.dest for action in parser._actions}
    parser.set_defaults(**{k: v for k, v in values.items() if k in own})
    for sub in parser.subparser_map.values():  # type: ignore[attr-defined]
        dests = {action.dest for action in sub._actions}
        sub.set_defaults(**{k: v for k, v in values.items() if k in dests})


def _set_log_level(level: str) -> None:
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        raise CliUsageError(f"未知日志级别: {level}")
    for name in list(logging.root.manager.loggerDict):
        if name == "src" or name.startswith("src."):
            logging.getLogger(name).setLevel(numeric)


def _run(argv: Sequence[str]) -> int:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(list(argv))
    if known.config:
        _apply_json_defaults(parser, known.config)

    args = parser.parse_args(list(argv))
    if args.log_level:
        _set_log_level(args.log_level)
    Config.validate()
    if args.threads < 1:
        raise CliUsageError("--threads 必须 ≥ 1")
    handler: Callable[[argparse.Namespace], int] = args.handler
    return handler(args)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return _run(argv)
    except UsageError as exc:
        logger.error("参数错误: %s", exc)
        return EXIT_USAGE
    except DataError as exc:
        logger.error("数据错误: %s", exc)
        return EXIT_DATA
    except json.JSONDecodeError as exc:
        logger.error("JSON 格式错误: %s", exc)
        return EXIT_DATA
    except OSError as exc:
        logger.error("I/O 错误: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
