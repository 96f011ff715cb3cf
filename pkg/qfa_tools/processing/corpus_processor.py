"""
语料运行模块
用线程池批量运行输入串，结果按输入顺序收集，单个串出错只记录不中断
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Union

from ..core.automata import AutomatonSpec, RunResult, run
from ..core.error_handler import ErrorHandler, QfaToolsError
from .progress_manager import ProgressManager

CORPUS_COLUMNS = ('word', 'p_accept', 'p_reject', 'p_residual', 'oracle_member', 'decision', 'error')


@dataclass(frozen=True)
class CorpusRow:
    word: str
    result: Optional[RunResult] = None
    member: Optional[bool] = None
    cutpoint: float = 0.5
    error: str = ''

    @property
    def decision(self) -> str:
        if self.result is None:
            return ''
        return 'accept' if self.result.p_accept > self.cutpoint else 'reject'

    def as_row(self) -> Dict[str, str]:
        row = {'word': self.word, 'p_accept': '', 'p_reject': '', 'p_residual': ''}
        if self.result is not None:
            row.update(self.result.as_row())
        row['oracle_member'] = '' if self.member is None else str(self.member).lower()
        row['decision'] = self.decision
        row['error'] = self.error
        return row


class CorpusProcessor:
    """语料处理器，负责并行运行自动机"""

    def __init__(self,
                 max_workers: int = 4,
                 progress_manager: Optional[ProgressManager] = None,
                 error_handler: Optional[ErrorHandler] = None):
        """
        Args:
            max_workers: 最大工作线程数
            progress_manager: 进度管理器，为空时不显示进度
            error_handler: 错误统计
        """
        self.max_workers = max_workers
        self.progress_manager = progress_manager or ProgressManager(show_progress=False)
        self.error_handler = error_handler or ErrorHandler()

    def run_words(self, machine: AutomatonSpec, words: Sequence[str]) -> List[Union[RunResult, QfaToolsError]]:
        """
        运行所有串，出错的位置放异常对象且错误计入统计

        Returns:
            与 words 一一对应的结果列表
        """
        results: Dict[int, Union[RunResult, QfaToolsError]] = {}
        bar_name = f"corpus-{id(words)}"
        self.progress_manager.create_progress_bar(bar_name, len(words), "运行语料", unit="串")

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {executor.submit(run, machine, word): idx for idx, word in enumerate(words)}
            for future in futures:
                idx = futures[future]
                try:
                    results[idx] = future.result()
                except QfaToolsError as e:
                    self.error_handler.record('run', e)
                    logging.warning(f"串 {words[idx]!r} 运行失败: {str(e)}")
                    results[idx] = e
                self.progress_manager.update_progress(bar_name)

        self.progress_manager.finish_progress(bar_name)
        return [results[idx] for idx in range(len(words))]

    def evaluate(self, machine: AutomatonSpec, words: Sequence[str]) -> List[RunResult]:
        """与 run_words 相同，但任何一个串出错都抛出异常 (供识别判定使用)"""
        outcomes = self.run_words(machine, words)
        for outcome in outcomes:
            if isinstance(outcome, Exception):
                raise outcome
        return outcomes

    def run_corpus(self,
                   machine: AutomatonSpec,
                   words: Sequence[str],
                   oracle: Optional[Callable[[str], bool]] = None,
                   cutpoint: float = 0.5) -> List[CorpusRow]:
        """
        运行语料并生成输出行

        Args:
            machine: 自动机
            words: 输入串
            oracle: 成员判定，为空时 oracle_member 列留空
            cutpoint: 接受判定的分界点

        Returns:
            与输入同序的 CorpusRow 列表
        """
        rows = []
        for word, outcome in zip(words, self.run_words(machine, words)):
            member = oracle(word) if oracle else None
            if isinstance(outcome, Exception):
                rows.append(CorpusRow(word, None, member, cutpoint, str(outcome)))
            else:
                rows.append(CorpusRow(word, outcome, member, cutpoint))
        failed = sum(1 for row in rows if row.error)
        logging.info(f"语料运行完成: {len(rows)} 个串, {failed} 个失败")
        return rows
