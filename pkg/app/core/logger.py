import json
import logging
from typing import Any, Dict, Optional

import numpy as np

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """配置根日志记录器（CLI 与 FastAPI 入口共用）."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT)


def _jsonable(value: Any) -> Any:
    # numpy 标量无法直接序列化
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _emit_json(
    logger: logging.Logger,
    level: int,
    事件: str,
    阶段: Optional[str] = None,
    **字段: Any,
) -> None:
    """以 JSON 结构化方式输出日志（中文键）.

    Args:
        logger: 日志记录器
        level: 日志级别（logging 常量）
        事件: 事件名称或说明
        阶段: 可选，所处的仿真阶段（如 simulate_ber、measure_penalty）
        字段: 其他结构化字段
    """
    if not logger.isEnabledFor(level):
        return
    payload: Dict[str, Any] = {"事件": 事件}
    if 阶段:
        payload["阶段"] = 阶段
    for key, value in 字段.items():
        payload[key] = _jsonable(value)
    message = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    logger.log(level, message)


def jdebug(logger: logging.Logger, 事件: str, 阶段: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.DEBUG, 事件, 阶段, **字段)


def jinfo(logger: logging.Logger, 事件: str, 阶段: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.INFO, 事件, 阶段, **字段)


def jwarn(logger: logging.Logger, 事件: str, 阶段: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.WARNING, 事件, 阶段, **字段)


def jerror(logger: logging.Logger, 事件: str, 阶段: Optional[str] = None, **字段: Any) -> None:
    _emit_json(logger, logging.ERROR, 事件, 阶段, **字段)
