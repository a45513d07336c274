"""key = value 配置文档解析."""
import logging
from pathlib import Path
from typing import Dict, Union

from pydantic import ValidationError

from app.core.errors import ConfigError
from app.models.run_config import RunConfig

logger = logging.getLogger(__name__)


def parse_config(text: str) -> RunConfig:
    """
    解析扁平的 key = value 配置文档（# 之后为注释）.

    Args:
        text: 配置文本，空文本得到全部默认值

    Returns:
        RunConfig: 校验后的运行配置

    Raises:
        ConfigError: 语法错误、重复键、未知键、类型或范围错误（带键名与行号）
    """
    raw: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError("缺少 '='，应为 key = value", line=line_no)
        key, _, value = content.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError("键名为空", line=line_no)
        if key in raw:
            raise ConfigError(f"重复的键（首次出现于第 {lines[key]} 行）", key=key, line=line_no)
        raw[key] = value.strip()
        lines[key] = line_no

    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        if error["loc"]:
            key = str(error["loc"][0])
        else:
            # 跨字段约束：由 ConstraintError 指明字段
            key = getattr(error.get("ctx", {}).get("error"), "field", None)
        raise ConfigError(error["msg"], key=key, line=lines.get(key)) from exc

    logger.debug(f"配置解析完成: {len(raw)} 个键")
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """读取并解析配置文件."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"无法读取配置文件 {path}: {exc}") from exc
    return parse_config(text)
