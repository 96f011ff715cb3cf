"""
自动机描述的导入导出
JSON 文本格式是构造器、命令行与测试之间的交换约定
"""
import os
import json
import logging
from typing import Any, Dict

from .automata import AutomatonSpec, PfaSpec, QfaSpec, StatePartition, Symbol, SYMBOL_ORDER
from .error_handler import SpecFormatError

_SPEC_TYPES = {'qfa': QfaSpec, 'pfa': PfaSpec}


def spec_to_dict(spec: AutomatonSpec) -> Dict[str, Any]:
    """
    转换为可 JSON 序列化的字典

    Args:
        spec: 量子或概率自动机

    Returns:
        包含 num_states、initial、partition、columns、state_names 的字典
    """
    columns = {}
    for symbol in SYMBOL_ORDER:
        entries = []
        for source in sorted(spec.columns[symbol]):
            for target, value in spec.columns[symbol][source]:
                entry = {'source': source, 'target': target}
                if spec.is_quantum:
                    entry['re'] = complex(value).real
                    entry['im'] = complex(value).imag
                else:
                    entry['re'] = float(value)
                entries.append(entry)
        columns[symbol.value] = entries

    return {
        'kind': spec.kind,
        'num_states': spec.num_states,
        'initial': spec.initial,
        'partition': {
            'accepting': sorted(spec.partition.accepting),
            'rejecting': sorted(spec.partition.rejecting),
            'nonhalting': sorted(spec.partition.nonhalting),
        },
        'columns': columns,
        'state_names': {str(i): name for i, name in enumerate(spec.state_names)},
    }


def spec_from_dict(data: Dict[str, Any]) -> AutomatonSpec:
    """
    从字典恢复自动机描述

    Raises:
        SpecFormatError: 缺少字段或字段类型错误
    """
    try:
        num_states = int(data['num_states'])
        columns_data = data['columns']
        kind = data.get('kind')
        if kind is None:
            kind = 'qfa' if any('im' in e for entries in columns_data.values() for e in entries) else 'pfa'
        spec_type = _SPEC_TYPES[kind]

        names_data = data.get('state_names', {})
        state_names = tuple(names_data.get(str(i), f"q[{i}]") for i in range(num_states))

        part = data['partition']
        partition = StatePartition(
            frozenset(int(s) for s in part['accepting']),
            frozenset(int(s) for s in part['rejecting']),
            frozenset(int(s) for s in part['nonhalting']),
        )

        columns: Dict[Symbol, Dict[int, list]] = {}
        for key, entries in columns_data.items():
            symbol = Symbol(key)
            grouped: Dict[int, list] = {}
            for entry in entries:
                if spec_type is QfaSpec:
                    value = complex(float(entry['re']), float(entry.get('im', 0.0)))
                else:
                    value = float(entry['re'])
                grouped.setdefault(int(entry['source']), []).append((int(entry['target']), value))
            columns[symbol] = {source: tuple(col) for source, col in grouped.items()}

        return spec_type(num_states, state_names, int(data['initial']), partition, columns)
    except (KeyError, TypeError, ValueError) as e:
        raise SpecFormatError(f"自动机描述格式错误: {str(e)}") from e


def dump_spec(spec: AutomatonSpec, path: str) -> str:
    """写出自动机描述文件，返回文件路径"""
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(spec_to_dict(spec), f, sort_keys=True, ensure_ascii=False)
        f.write('\n')
    logging.info(f"已写出自动机描述: {path}")
    return path


def load_spec(path: str) -> AutomatonSpec:
    """
    读取自动机描述文件

    Raises:
        SpecFormatError: 文件不存在或不是合法的描述
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise SpecFormatError(f"无法读取自动机描述 {path}: {str(e)}") from e
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"自动机描述不是合法 JSON {path}: {str(e)}") from e
    return spec_from_dict(data)
