import os
from dotenv import load_dotenv


load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("true", "1", "yes")


class Config:
    # 日志配置
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("LOG_DIR", "")

    # 预算扫描配置
    THREADS = int(os.getenv("ROBUST_NV_THREADS", "4"))
    GRID_POINTS = int(os.getenv("ROBUST_NV_GRID_POINTS", "101"))
    SEED = int(os.getenv("ROBUST_NV_SEED", "20220308"))
    SWEEP_PROGRESS = _env_bool("SWEEP_PROGRESS", "false")

    # 单纯形法容差
    LP_FEASIBILITY_TOL = float(os.getenv("LP_FEASIBILITY_TOL", "1e-9"))
    LP_PIVOT_TOL = float(os.getenv("LP_PIVOT_TOL", "1e-12"))
    LP_MAX_ITERATIONS = int(os.getenv("LP_MAX_ITERATIONS", "50000"))

    # CVaR 规模上限: 商品数硬上限, 以及稠密单纯形能承受的场景数 (3^7)
    CVAR_MAX_ITEMS = int(os.getenv("CVAR_MAX_ITEMS", "12"))
    CVAR_MAX_SCENARIOS = int(os.getenv("CVAR_MAX_SCENARIOS", "2187"))

    # 输出格式
    OUTPUT_DIGITS = int(os.getenv("OUTPUT_DIGITS", "10"))


config = Config()
