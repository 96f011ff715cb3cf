"""
日志工具模块
提供与tqdm进度条兼容的日志配置
"""
import os
import logging
from typing import Optional

from tqdm import tqdm

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class TqdmLoggingHandler(logging.Handler):
    """让日志与tqdm进度条兼容的处理器"""

    def __init__(self, level=logging.NOTSET):
        super().__init__(level)
        self.formatter = logging.Formatter(LOG_FORMAT)

    def emit(self, record):
        try:
            msg = self.format(record)
            # 使用tqdm.write而不是print，这样不会干扰进度条
            tqdm.write(msg)
            self.flush()
        except Exception:
            self.handleError(record)


class LogConfig:
    """日志配置管理类"""

    VERBOSE = 1  # 详细模式 - 显示所有日志
    NORMAL = 2   # 正常模式 - 显示信息、警告和错误
    QUIET = 3    # 静默模式 - 只显示警告和错误

    MODE_NAMES = {'VERBOSE': VERBOSE, 'NORMAL': NORMAL, 'QUIET': QUIET}

    _original_log_level = logging.INFO

    @classmethod
    def setup_logging(cls, level=logging.INFO, log_mode=NORMAL, log_file: Optional[str] = None):
        """
        设置日志配置

        Args:
            level: 基础日志级别
            log_mode: 日志模式 (VERBOSE/NORMAL/QUIET)
            log_file: 可选的日志文件路径
        """
        cls._original_log_level = level

        logger = logging.getLogger()
        for handler in logger.handlers[:]:
            logger.removeHandler(handler)

        logger.addHandler(TqdmLoggingHandler())

        if log_file:
            log_dir = os.path.dirname(log_file)
            if log_dir:
                os.makedirs(log_dir, exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding='utf-8')
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            logger.addHandler(file_handler)

        cls.set_log_mode(log_mode)

    @classmethod
    def set_log_mode(cls, mode: int):
        """
        设置日志模式

        Args:
            mode: 日志模式 (VERBOSE/NORMAL/QUIET)
        """
        if mode == cls.QUIET:
            logging.getLogger().setLevel(logging.WARNING)
        elif mode == cls.VERBOSE:
            logging.getLogger().setLevel(logging.DEBUG)
        else:
            logging.getLogger().setLevel(cls._original_log_level)


def setup_logging(log_level: str = 'INFO', log_mode: str = 'NORMAL', log_file: Optional[str] = None):
    """
    按配置中的字符串设置日志

    Args:
        log_level: 基础日志级别名称
        log_mode: 日志模式名称
        log_file: 可选的日志文件路径
    """
    level = getattr(logging, str(log_level).upper(), logging.INFO)
    mode = LogConfig.MODE_NAMES.get(str(log_mode).upper(), LogConfig.NORMAL)
    LogConfig.setup_logging(level, mode, log_file)
