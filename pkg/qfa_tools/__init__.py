"""
量子/概率有限自动机实验工具包
提供模除指纹自动机的构造、测量多次的模拟以及误差界的数值验证
"""

from .controllers.experiment_controller import ExperimentController, ExperimentConfig
from .core.automata import QfaSpec, PfaSpec, run, check_wellformed
from .core.log_utils import setup_logging

__version__ = '0.1.0'

__all__ = ['ExperimentController', 'ExperimentConfig', 'QfaSpec', 'PfaSpec', 'run',
           'check_wellformed', 'setup_logging']
