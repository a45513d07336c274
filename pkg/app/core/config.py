"""应用配置管理 - 环境变量与仿真运行默认值."""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """应用配置类 - 从环境变量加载配置."""

    # 应用基础配置
    APP_NAME: str = "PMD Penalty Simulator"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # API 服务配置
    API_V1_PREFIX: str = "/api/v1"
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # 日志配置
    LOG_LEVEL: str = "INFO"

    # 蒙特卡洛并行配置
    DEFAULT_WORKERS: int = 1
    FRAMES_PER_BATCH: int = 16  # 每批帧数，与 worker 数无关，保证结果可复现
    PARALLEL_BACKEND: str = "loky"

    # 输出配置
    CSV_SIGNIFICANT_DIGITS: int = 9
    DEFECT_FLOOR_DB: float = -300.0  # 正交性缺陷的下限（精确正交时返回）

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": True
    }


# 创建全局配置实例
settings = Settings()
