"""
进度管理器模块
负责管理和显示语料运行、参数扫描的进度条
"""
import logging
from typing import Dict, Optional
from tqdm import tqdm


class ProgressBar:
    """进度条封装类"""

    def __init__(self, total: int, description: str, unit: str = "", show_progress: bool = True):
        """
        初始化进度条

        Args:
            total: 总数量
            description: 进度条描述
            unit: 单位
            show_progress: 是否显示进度条
        """
        self.total = total
        self.current = 0
        self.show_progress = show_progress
        self.description = description

        if show_progress:
            self.pbar = tqdm(
                total=total,
                desc=description,
                unit=unit,
                ncols=100,
                leave=False,
                bar_format='{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}]'
            )
        else:
            self.pbar = None

    def update(self, n: int = 1):
        if n < 0:
            logging.warning(f"进度更新值不能为负数: {n}")
            return

        if self.current + n > self.total:
            logging.warning(f"进度超出总量: current={self.current}, update={n}, total={self.total}")
            n = self.total - self.current

        if n > 0:
            self.current += n
            if self.pbar:
                self.pbar.update(n)

    def set_postfix(self, state: Optional[str] = None, refresh: bool = True):
        if self.pbar and state:
            self.pbar.set_postfix_str(state, refresh=refresh)

    def close(self):
        if self.pbar:
            self.pbar.close()
            self.pbar = None


class ProgressManager:
    """进度管理器，按名字管理多个进度条"""

    def __init__(self, show_progress: bool = True):
        self.show_progress = show_progress
        self.progress_bars: Dict[str, ProgressBar] = {}

    def create_progress_bar(self, name: str, total: int, prefix: str, unit: str = "") -> ProgressBar:
        """
        创建并存储一个进度条，同名进度条会先被关闭

        Args:
            name: 进度条名称
            total: 总数量
            prefix: 描述
            unit: 单位

        Returns:
            创建的进度条对象
        """
        if name in self.progress_bars:
            self.progress_bars.pop(name).close()
        progress_bar = ProgressBar(total=total, description=prefix, unit=unit, show_progress=self.show_progress)
        self.progress_bars[name] = progress_bar
        return progress_bar

    def update_progress(self, name: str, n: int = 1, state: Optional[str] = None):
        if name not in self.progress_bars:
            return
        progress_bar = self.progress_bars[name]
        progress_bar.update(n)
        if state:
            progress_bar.set_postfix(state)

    def finish_progress(self, name: str):
        """补满并关闭指定进度条"""
        if name in self.progress_bars:
            progress_bar = self.progress_bars.pop(name)
            if progress_bar.current < progress_bar.total:
                progress_bar.update(progress_bar.total - progress_bar.current)
            progress_bar.close()

