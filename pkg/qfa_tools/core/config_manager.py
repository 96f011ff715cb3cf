"""
配置管理器模块
负责管理和验证实验配置参数
"""
import os
import json
import logging
from typing import Any, Dict, Optional


class ConfigValidationError(Exception):
    """配置验证错误"""
    pass


class ConfigManager:
    """配置管理器"""

    DEFAULT_CONFIG = {
        'output_folder': './output',
        'output_format': 'csv',
        'max_workers': 4,
        'show_progress': True,
        'log_level': 'INFO',
        'log_mode': 'NORMAL',
        'log_file': None,
        'cutpoint': 0.5,
        'seed': 2024,
        'instances_per_kind': 200,
        'amplitude_tolerance': 1e-9,
        'probability_tolerance': 1e-12,
    }

    def __init__(self, config_file: Optional[str] = None):
        """
        初始化配置管理器

        Args:
            config_file: 可选的配置文件路径
        """
        self.config = self.DEFAULT_CONFIG.copy()

        if config_file and os.path.exists(config_file):
            self.load_config(config_file)

    def load_config(self, config_file: str):
        """
        从文件加载配置

        Args:
            config_file: 配置文件路径

        Raises:
            ConfigValidationError: 如果配置无效
        """
        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                user_config = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigValidationError(f"配置文件格式错误: {str(e)}")
        except OSError as e:
            raise ConfigValidationError(f"加载配置文件失败: {str(e)}")

        for key, value in user_config.items():
            if key in self.DEFAULT_CONFIG:
                self.config[key] = value
            else:
                logging.warning(f"忽略未知的配置项: {key}")

        self.validate_config()

    def validate_config(self):
        """
        验证配置有效性

        Raises:
            ConfigValidationError: 如果配置无效
        """
        if not 1 <= self.config['max_workers'] <= 16:
            raise ConfigValidationError("max_workers 必须在 1-16 之间")

        if not 0.0 < self.config['cutpoint'] < 1.0:
            raise ConfigValidationError("cutpoint 必须在 (0, 1) 之间")

        if self.config['instances_per_kind'] < 0:
            raise ConfigValidationError("instances_per_kind 不能为负数")

        if not 0.0 < self.config['amplitude_tolerance'] < 1e-3:
            raise ConfigValidationError("amplitude_tolerance 必须在 (0, 1e-3) 之间")

        if not 0.0 < self.config['probability_tolerance'] < 1e-3:
            raise ConfigValidationError("probability_tolerance 必须在 (0, 1e-3) 之间")

        if self.config['output_format'] not in ('csv', 'json'):
            raise ConfigValidationError("output_format 只能是 csv 或 json")

        if self.config['log_mode'] not in ('VERBOSE', 'NORMAL', 'QUIET'):
            raise ConfigValidationError("log_mode 只能是 VERBOSE、NORMAL 或 QUIET")

    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置项

        Args:
            key: 配置项名称
            default: 默认值

        Returns:
            配置项的值
        """
        return self.config.get(key, default)

    def update(self, config_dict: Dict[str, Any]):
        """
        批量更新配置，值为 None 的项视为未指定

        Args:
            config_dict: 配置字典

        Raises:
            ConfigValidationError: 如果任何配置项无效
        """
        old_config = self.config
        temp_config = self.config.copy()

        for key, value in config_dict.items():
            if value is None:
                continue
            if key in self.DEFAULT_CONFIG:
                temp_config[key] = value
            else:
                logging.warning(f"忽略未知的配置项: {key}")

        self.config = temp_config
        try:
            self.validate_config()
        except ConfigValidationError as e:
            self.config = old_config
            raise ConfigValidationError(f"更新配置失败: {str(e)}")

    @property
    def as_dict(self) -> Dict[str, Any]:
        """以字典形式返回配置的副本"""
        return self.config.copy()
