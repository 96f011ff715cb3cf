"""
结果导出模块
把 BoundReport 表与语料运行结果写成 CSV 或 JSON，相同输入得到逐字节相同的文件
"""
import os
import csv
import json
import logging
from typing import Dict, Iterable, List, Sequence

from .analysis import REPORT_COLUMNS
from .corpus_processor import CORPUS_COLUMNS

SUPPORTED_FORMATS = ('csv', 'json')


class ReportExporter:
    """报表导出器"""

    def __init__(self, output_folder: str):
        """
        Args:
            output_folder: 输出文件夹路径
        """
        self.output_folder = output_folder

    def _path(self, name: str, fmt: str) -> str:
        if fmt not in SUPPORTED_FORMATS:
            raise ValueError(f"不支持的输出格式: {fmt}")
        os.makedirs(self.output_folder, exist_ok=True)
        return os.path.join(self.output_folder, f"{name}.{fmt}")

    def export_rows(self, name: str, columns: Sequence[str], rows: Iterable[Dict[str, str]], fmt: str = 'csv') -> str:
        """
        写出表格

        Args:
            name: 文件名 (不含扩展名)
            columns: 列顺序
            rows: 已格式化为字符串的行
            fmt: csv 或 json

        Returns:
            输出文件路径
        """
        path = self._path(name, fmt)
        rows = list(rows)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            if fmt == 'csv':
                write_csv(f, columns, rows)
            else:
                json.dump([{c: row.get(c, '') for c in columns} for row in rows], f,
                          sort_keys=True, indent=2, ensure_ascii=False)
                f.write('\n')
        logging.info(f"已导出 {len(rows)} 行到 {path}")
        return path

    def export_reports(self, name: str, reports, fmt: str = 'csv') -> str:
        """导出 BoundReport 列表"""
        return self.export_rows(name, REPORT_COLUMNS, (report.as_row() for report in reports), fmt)

    def export_corpus(self, name: str, rows, fmt: str = 'csv') -> str:
        """导出 CorpusRow 列表"""
        return self.export_rows(name, CORPUS_COLUMNS, (row.as_row() for row in rows), fmt)


def write_csv(stream, columns: Sequence[str], rows: List[Dict[str, str]]):
    """表头加数据行，换行固定为 \\n"""
    writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator='\n', extrasaction='ignore')
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
