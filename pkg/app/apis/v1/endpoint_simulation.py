"""仿真 API 端点 - 通过 HTTP 执行运行命令并返回 CSV."""
import logging
from datetime import datetime

from fastapi import APIRouter, HTTPException, status
from fastapi.concurrency import run_in_threadpool
from pydantic import ValidationError

from app.core.errors import ConfigError, InvalidArgumentError
from app.models.simulation import SimulationRunRequest, SimulationRunResponse
from app.services.orchestration_service import orchestration_service
from app.services.run_config import parse_config

logger = logging.getLogger(__name__)

# 创建路由器
router = APIRouter()


@router.post("/run", response_model=SimulationRunResponse)
async def run_simulation(request: SimulationRunRequest) -> SimulationRunResponse:
    """
    执行一次运行命令.

    仿真是 CPU 密集任务，在线程池中执行以免阻塞事件循环。

    Args:
        request: 命令、配置文本与可选种子

    Returns:
        SimulationRunResponse: CSV 内容与行数

    Raises:
        HTTPException: 配置错误返回 400，其他失败返回 500
    """
    try:
        logger.info(f"开始执行仿真命令: {request.command.value}")
        config = parse_config(request.config_text)
        # HTTP 调用不落盘
        config = config.model_copy(update={"output": None})
        result = await run_in_threadpool(
            orchestration_service.run_command,
            request.command,
            config,
            None,
            request.seed,
        )
        return SimulationRunResponse(
            success=True,
            command=result.command,
            rows=result.rows,
            csv=result.csv_text,
            timestamp=datetime.now().isoformat(),
        )

    except (ConfigError, InvalidArgumentError, ValidationError) as e:
        logger.warning(f"仿真请求参数错误: {e}")
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )
    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"仿真命令执行失败: {e}")
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"仿真命令执行失败: {str(e)}"
        )
