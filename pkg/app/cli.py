"""命令行入口: python -m app.cli <command> --config <path> --out <path> [--seed N] [--workers N]."""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import ConfigError, SimulationError
from app.core.logger import configure_logging
from app.models.run_config import RunConfig
from app.models.simulation import RunCommand
from app.services.orchestration_service import orchestration_service
from app.services.run_config import load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app.cli",
        description="一阶 PMD 功率代价仿真（SC-QPSK / OFDM/QAM / FBMC/OQAM）",
    )
    parser.add_argument("command", choices=[c.value for c in RunCommand], help="运行命令")
    parser.add_argument("--config", default=None, help="key = value 配置文件，缺省时使用全部默认值")
    parser.add_argument("--out", default=None, help="CSV 输出路径，缺省时使用配置中的 output 或写到标准输出")
    parser.add_argument("--seed", type=int, default=None, help="覆盖配置中的主随机种子")
    parser.add_argument("--workers", type=int, default=None, help=f"并行 worker 数（默认 {settings.DEFAULT_WORKERS}）")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    解析参数并执行命令.

    Returns:
        int: 0 成功，1 配置错误，2 运行错误
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG_ERROR

    configure_logging(settings.LOG_LEVEL)
    try:
        config = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed 不能为负", key="seed")
        if args.workers is not None and args.workers == 0:
            raise ConfigError("--workers 不能为 0", key="workers")
        result = orchestration_service.run_command(
            RunCommand(args.command),
            config,
            output=args.out,
            seed=args.seed,
            workers=args.workers,
        )
    except (ConfigError, ValidationError) as exc:
        logger.error(f"配置错误: {exc}")
        print(f"配置错误: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (SimulationError, OSError) as exc:
        logger.error(f"运行失败: {exc}")
        print(f"运行失败: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    if result.output is None:
        sys.stdout.write(result.csv_text)
    return result.exit_status


if __name__ == "__main__":
    sys.exit(main())
