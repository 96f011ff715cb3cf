"""
处理模块包
"""

from .builders import build_m0q, build_m0p, build_m1q, build_m1p, build_m2q, build_m2p, M1Params
from .languages import in_l0, in_l1, in_l2, gen_instances, BlockString
from .analysis import BoundReport, recognizes
from .corpus_processor import CorpusProcessor
from .progress_manager import ProgressManager, ProgressBar
from .report_exporter import ReportExporter

__all__ = [
    'build_m0q',
    'build_m0p',
    'build_m1q',
    'build_m1p',
    'build_m2q',
    'build_m2p',
    'M1Params',
    'in_l0',
    'in_l1',
    'in_l2',
    'gen_instances',
    'BlockString',
    'BoundReport',
    'recognizes',
    'CorpusProcessor',
    'ProgressManager',
    'ProgressBar',
    'ReportExporter',
]
