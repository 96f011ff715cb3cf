"""
控制器模块包
"""

from .experiment_controller import ExperimentController, ExperimentConfig

__all__ = ['ExperimentController', 'ExperimentConfig']
