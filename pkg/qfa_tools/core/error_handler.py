"""
错误处理模块
提供统一的异常类型和安全执行机制
"""
import logging
import traceback
from typing import Callable, Any, Dict


class QfaToolsError(Exception):
    """自动机工具基础异常类"""
    pass


class PrimeRangeError(QfaToolsError):
    """参数超出穷举计算范围"""
    pass


class WordFormatError(QfaToolsError):
    """输入串包含非法字符或端标记"""
    pass


class IncompleteSpecError(QfaToolsError):
    """振幅到达了没有定义对应列的状态"""

    def __init__(self, state: int, state_name: str, symbol_name: str):
        self.state = state
        self.state_name = state_name
        self.symbol_name = symbol_name
        super().__init__(
            f"状态 {state} ({state_name}) 没有为符号 {symbol_name} 定义转移列"
        )


class BuildError(QfaToolsError):
    """自动机构造参数无效"""
    pass


class SpecFormatError(QfaToolsError):
    """自动机描述文件格式错误"""
    pass


class CorpusFormatError(QfaToolsError):
    """语料文件格式错误"""
    pass


class InapplicableInstanceError(QfaToolsError):
    """引理检查的前提条件不成立"""
    pass


class ExperimentError(QfaToolsError):
    """实验参数不可行"""
    pass


class ErrorHandler:
    """错误处理器，记录每种操作的失败次数"""

    def __init__(self):
        self._error_stats: Dict[str, Dict[str, int]] = {}

    def safe_execute(self,
                     func: Callable,
                     *args,
                     error_msg: str = "",
                     **kwargs) -> Any:
        """
        安全执行操作

        Args:
            func: 要执行的函数
            error_msg: 错误消息前缀
            *args: 函数参数
            **kwargs: 函数关键字参数

        Returns:
            函数执行结果

        Raises:
            QfaToolsError: 如果执行失败
        """
        try:
            return func(*args, **kwargs)
        except Exception as e:
            self._update_error_stats(func.__name__, str(e))
            error_msg = error_msg or f"执行 {func.__name__} 失败"

            logging.debug(f"错误详情:\n{traceback.format_exc()}")

            if isinstance(e, QfaToolsError):
                raise
            raise QfaToolsError(f"{error_msg}: {str(e)}") from e

    def record(self, operation: str, error: Exception):
        """记录一次已被调用方处理的错误"""
        self._update_error_stats(operation, str(error))

    def _update_error_stats(self, operation: str, error: str):
        """
        更新错误统计

        Args:
            operation: 操作名称
            error: 错误信息
        """
        errors = self._error_stats.setdefault(operation, {})
        errors[error] = errors.get(error, 0) + 1

    def get_error_stats(self) -> Dict[str, Dict[str, int]]:
        """
        获取错误统计信息

        Returns:
            错误统计字典
        """
        return {op: dict(errs) for op, errs in self._error_stats.items()}

    def print_error_stats(self):
        """打印错误统计信息"""
        if not self._error_stats:
            logging.info("没有错误记录")
            return

        logging.info("错误统计:")
        for operation, errors in self._error_stats.items():
            logging.info(f"操作: {operation}")
            for error, count in errors.items():
                logging.info(f"  - {error}: {count}次")
