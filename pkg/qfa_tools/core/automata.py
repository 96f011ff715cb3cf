"""
自动机执行语义模块
测量多次的一维量子有限自动机 (QFA) 与概率有限自动机 (PFA) 的描述、单步演化、
整串运行以及良构性检查
"""
import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Dict, FrozenSet, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .error_handler import IncompleteSpecError, WordFormatError

AMPLITUDE_TOLERANCE = 1e-9
PROBABILITY_TOLERANCE = 1e-12

# 低于此模长的振幅视为数值噪声丢弃 (对应概率 < 1e-30)
_PRUNE_BELOW = 1e-15


class Symbol(Enum):
    """输入字母表，端标记由运行器自动添加"""

    LEFT_END = "LEFT_END"
    BIT0 = "0"
    BIT1 = "1"
    SHARP = "SHARP"
    RIGHT_END = "RIGHT_END"

    @property
    def is_endmarker(self) -> bool:
        return self in (Symbol.LEFT_END, Symbol.RIGHT_END)

    @property
    def char(self) -> str:
        return _SYMBOL_CHARS[self]

    @classmethod
    def bit(cls, value: int) -> 'Symbol':
        return cls.BIT1 if value else cls.BIT0


_SYMBOL_CHARS = {
    Symbol.LEFT_END: '¢',
    Symbol.BIT0: '0',
    Symbol.BIT1: '1',
    Symbol.SHARP: '#',
    Symbol.RIGHT_END: '$',
}

_CHAR_SYMBOLS = {'0': Symbol.BIT0, '1': Symbol.BIT1, '#': Symbol.SHARP, '♯': Symbol.SHARP}

SYMBOL_ORDER = tuple(Symbol)

Word = Union[str, Sequence[Symbol]]


def parse_word(text: str) -> List[Symbol]:
    """
    将 0/1/# 组成的文本转换为符号序列

    Raises:
        WordFormatError: 出现字母表之外的字符
    """
    symbols = []
    for position, ch in enumerate(text):
        symbol = _CHAR_SYMBOLS.get(ch)
        if symbol is None:
            raise WordFormatError(f"输入串第 {position} 个字符 {ch!r} 不在 {{0,1,#}} 中: {text!r}")
        symbols.append(symbol)
    return symbols


def as_symbols(word: Word) -> List[Symbol]:
    """接受文本或符号序列，拒绝用户提供的端标记"""
    symbols = parse_word(word) if isinstance(word, str) else list(word)
    for symbol in symbols:
        if not isinstance(symbol, Symbol):
            raise WordFormatError(f"非法符号: {symbol!r}")
        if symbol.is_endmarker:
            raise WordFormatError("端标记由运行器添加，输入串中不能包含 ¢ 或 $")
    return symbols


def framed(word: Word) -> List[Symbol]:
    """¢ · word · $"""
    return [Symbol.LEFT_END] + as_symbols(word) + [Symbol.RIGHT_END]


@dataclass(frozen=True)
class StatePartition:
    """接受、拒绝、非停机三类状态"""

    accepting: FrozenSet[int]
    rejecting: FrozenSet[int]
    nonhalting: FrozenSet[int]


Column = Tuple[Tuple[int, complex], ...]


@dataclass(frozen=True)
class AutomatonSpec:
    """一维测量多次自动机的公共描述，列按符号稀疏存储: source -> ((target, entry), ...)"""

    num_states: int
    state_names: Tuple[str, ...]
    initial: int
    partition: StatePartition
    columns: Mapping[Symbol, Mapping[int, Column]]

    kind = 'abstract'

    def __post_init__(self):
        frozen = {symbol: MappingProxyType(dict(self.columns.get(symbol, {}))) for symbol in SYMBOL_ORDER}
        object.__setattr__(self, 'columns', MappingProxyType(frozen))
        object.__setattr__(self, 'state_names', tuple(self.state_names))

    @property
    def is_quantum(self) -> bool:
        return self.kind == 'qfa'

    @cached_property
    def state_ids(self) -> Dict[str, int]:
        return {name: index for index, name in enumerate(self.state_names)}

    def state_id(self, name: str) -> int:
        return self.state_ids[name]

    def column(self, symbol: Symbol, source: int) -> Column:
        return self.columns[symbol].get(source)

    def column_counts(self) -> Dict[str, int]:
        return {symbol.value: len(self.columns[symbol]) for symbol in SYMBOL_ORDER}


@dataclass(frozen=True)
class QfaSpec(AutomatonSpec):
    """复振幅转移列，每个符号下已定义的列两两正交且为单位向量"""

    kind = 'qfa'


@dataclass(frozen=True)
class PfaSpec(AutomatonSpec):
    """非负实数转移列，每列之和为 1"""

    kind = 'pfa'


@dataclass
class Configuration:
    """非停机状态上的 (未归一化) 叠加或概率分布，以及累计的接受/拒绝概率"""

    amplitudes: Dict[int, complex]
    p_accept: float = 0.0
    p_reject: float = 0.0
    quantum: bool = True

    @classmethod
    def initial(cls, spec: AutomatonSpec) -> 'Configuration':
        unit = 1.0 + 0j if spec.is_quantum else 1.0
        return cls({spec.initial: unit}, quantum=spec.is_quantum)

    def mass(self) -> float:
        """剩余非停机质量: 量子为 Σ|a|^2，经典为 Σa"""
        ordered = [self.amplitudes[s] for s in sorted(self.amplitudes)]
        if self.quantum:
            return math.fsum(abs(a) ** 2 for a in ordered)
        return math.fsum(ordered)

    def total(self) -> float:
        return self.mass() + self.p_accept + self.p_reject

    def copy(self) -> 'Configuration':
        return Configuration(dict(self.amplitudes), self.p_accept, self.p_reject, self.quantum)

    def scaled(self, factor: float) -> 'Configuration':
        """振幅按 factor 缩放，累计概率清零 (用于从快照重新出发)"""
        return Configuration({s: a * factor for s, a in self.amplitudes.items()}, quantum=self.quantum)

    def restricted(self, states) -> 'Configuration':
        """只保留给定状态上的分量，累计概率清零"""
        keep = set(states)
        return Configuration({s: a for s, a in self.amplitudes.items() if s in keep}, quantum=self.quantum)


@dataclass(frozen=True)
class RunResult:
    p_accept: float
    p_reject: float
    p_residual: float

    def as_row(self, digits: int = 12) -> Dict[str, str]:
        return {
            'p_accept': f"{self.p_accept:.{digits}f}",
            'p_reject': f"{self.p_reject:.{digits}f}",
            'p_residual': f"{self.p_residual:.{digits}f}",
        }


def _step(spec: AutomatonSpec, config: Configuration, symbol: Symbol, quantum: bool) -> Configuration:
    column_map = spec.columns[symbol]
    image: Dict[int, complex] = {}
    for source in sorted(config.amplitudes):
        amplitude = config.amplitudes[source]
        column = column_map.get(source)
        if column is None:
            raise IncompleteSpecError(source, spec.state_names[source], symbol.value)
        for target, entry in column:
            image[target] = image.get(target, 0.0) + amplitude * entry

    accepting = spec.partition.accepting
    rejecting = spec.partition.rejecting
    accept_terms = []
    reject_terms = []
    survivors: Dict[int, complex] = {}
    for target in sorted(image):
        value = image[target]
        weight = abs(value) ** 2 if quantum else value
        if target in accepting:
            accept_terms.append(weight)
        elif target in rejecting:
            reject_terms.append(weight)
        elif abs(value) >= _PRUNE_BELOW:
            survivors[target] = value

    return Configuration(
        survivors,
        config.p_accept + math.fsum(accept_terms),
        config.p_reject + math.fsum(reject_terms),
        quantum,
    )


def qfa_step(spec: QfaSpec, config: Configuration, symbol: Symbol) -> Configuration:
    """
    读入一个符号: 作用转移列后测量，停机分量的平方模计入累计概率

    Args:
        spec: 量子自动机
        config: 当前构形
        symbol: 读入的符号

    Returns:
        投影到非停机状态上的新构形 (不归一化)

    Raises:
        IncompleteSpecError: 有振幅的状态没有该符号的转移列
    """
    return _step(spec, config, symbol, quantum=True)


def pfa_step(spec: PfaSpec, config: Configuration, symbol: Symbol) -> Configuration:
    """与 qfa_step 相同的结构，但按概率质量线性累计"""
    return _step(spec, config, symbol, quantum=False)


def step(spec: AutomatonSpec, config: Configuration, symbol: Symbol) -> Configuration:
    return _step(spec, config, symbol, quantum=spec.is_quantum)


def evolve(spec: AutomatonSpec, config: Configuration, symbols: Sequence[Symbol]) -> Configuration:
    """从任意构形出发依次读入 symbols (不添加端标记)"""
    for symbol in symbols:
        config = step(spec, config, symbol)
    return config


def _result(config: Configuration) -> RunResult:
    return RunResult(config.p_accept, config.p_reject, config.mass())


def run_qfa(spec: QfaSpec, word: Word) -> RunResult:
    """从初始状态以单位振幅运行 ¢ · word · $"""
    return _result(evolve(spec, Configuration.initial(spec), framed(word)))


def run_pfa(spec: PfaSpec, word: Word) -> RunResult:
    """run_qfa 的概率版本"""
    return _result(evolve(spec, Configuration.initial(spec), framed(word)))


def run(spec: AutomatonSpec, word: Word) -> RunResult:
    if spec.is_quantum:
        return run_qfa(spec, word)
    return run_pfa(spec, word)


def trace_run(spec: AutomatonSpec, word: Word, probe: Sequence[int]) -> List[Configuration]:
    """
    记录指定步之后的构形快照，第 0 步是读入 ¢

    Args:
        spec: 自动机
        word: 输入串 (不含端标记)
        probe: 步序号列表，范围 [0, len(word) + 2)

    Returns:
        与 probe 顺序一致的构形深拷贝
    """
    symbols = framed(word)
    for index in probe:
        if not 0 <= index < len(symbols):
            raise ValueError(f"探测步 {index} 超出范围 [0, {len(symbols)})")
    wanted = set(probe)
    snapshots: Dict[int, Configuration] = {}
    config = Configuration.initial(spec)
    last = max(probe, default=-1)
    for index, symbol in enumerate(symbols[:last + 1]):
        config = step(spec, config, symbol)
        if index in wanted:
            snapshots[index] = config.copy()
    return [snapshots[index].copy() for index in probe]


@dataclass(frozen=True)
class Violation:
    """良构性检查发现的一处问题"""

    kind: str
    symbol: str
    states: Tuple[int, ...]
    deviation: float
    message: str


@dataclass
class WellformednessReport:
    num_states: int
    kind: str
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, symbol: str, states, deviation: float, message: str):
        self.violations.append(Violation(kind, symbol, tuple(states), float(deviation), message))


def _check_partition(spec: AutomatonSpec, report: WellformednessReport):
    part = spec.partition
    pairs = (('accepting', part.accepting, 'rejecting', part.rejecting),
             ('accepting', part.accepting, 'nonhalting', part.nonhalting),
             ('rejecting', part.rejecting, 'nonhalting', part.nonhalting))
    for name_a, set_a, name_b, set_b in pairs:
        overlap = sorted(set_a & set_b)
        if overlap:
            report.add('partition', '', overlap, len(overlap), f"{name_a} 与 {name_b} 相交")
    union = part.accepting | part.rejecting | part.nonhalting
    missing = sorted(set(range(spec.num_states)) - union)
    if missing:
        report.add('partition', '', missing, len(missing), "有状态不属于任何一类")
    extra = sorted(s for s in union if not 0 <= s < spec.num_states)
    if extra:
        report.add('partition', '', extra, len(extra), "划分中包含越界的状态编号")
    if spec.initial not in part.nonhalting:
        report.add('initial', '', (spec.initial,), 1.0, "初始状态必须是非停机状态")
    if len(spec.state_names) != spec.num_states:
        report.add('names', '', (), abs(len(spec.state_names) - spec.num_states), "状态名数量与状态数不一致")


def _clusters(column_map: Mapping[int, Column]) -> List[List[int]]:
    """按共享目标状态把列分组，不同组的列天然正交"""
    parent = {source: source for source in column_map}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner: Dict[int, int] = {}
    for source in sorted(column_map):
        for target, _ in column_map[source]:
            if target in owner:
                a, b = find(owner[target]), find(source)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                owner[target] = source

    groups: Dict[int, List[int]] = {}
    for source in sorted(column_map):
        groups.setdefault(find(source), []).append(source)
    return [group for group in groups.values() if len(group) > 1]


def _merged(column: Column) -> Dict[int, complex]:
    """同一目标的多个条目相加"""
    merged: Dict[int, complex] = {}
    for target, entry in column:
        merged[target] = merged.get(target, 0.0) + entry
    return merged


def _check_quantum_columns(spec: AutomatonSpec, symbol: Symbol, report: WellformednessReport, tol: float):
    column_map = spec.columns[symbol]
    for source in sorted(column_map):
        norm = math.fsum(abs(entry) ** 2 for entry in _merged(column_map[source]).values())
        if abs(norm - 1.0) > tol:
            report.add('norm', symbol.value, (source,), abs(norm - 1.0),
                       f"{spec.state_names[source]} 的列范数平方为 {norm:.12g}")

    for group in _clusters(column_map):
        targets = sorted({t for s in group for t, _ in column_map[s]})
        row = {t: i for i, t in enumerate(targets)}
        matrix = np.zeros((len(targets), len(group)), dtype=complex)
        for j, source in enumerate(group):
            for target, entry in column_map[source]:
                matrix[row[target], j] += entry
        gram = matrix.conj().T @ matrix
        bad_i, bad_j = np.nonzero(np.triu(np.abs(gram), k=1) > tol)
        for i, j in zip(bad_i.tolist(), bad_j.tolist()):
            a, b = group[i], group[j]
            report.add('orthogonality', symbol.value, (a, b), abs(gram[i, j]),
                       f"{spec.state_names[a]} 与 {spec.state_names[b]} 的列不正交")


def _check_stochastic_columns(spec: AutomatonSpec, symbol: Symbol, report: WellformednessReport, tol: float):
    column_map = spec.columns[symbol]
    for source in sorted(column_map):
        entries = [entry for _, entry in column_map[source]]
        for entry in entries:
            if isinstance(entry, complex) or not -tol <= entry <= 1.0 + tol:
                report.add('entry', symbol.value, (source,), abs(entry),
                           f"{spec.state_names[source]} 的列含非法概率 {entry!r}")
        total = math.fsum(abs(entry) for entry in entries)
        if abs(total - 1.0) > tol:
            report.add('norm', symbol.value, (source,), abs(total - 1.0),
                       f"{spec.state_names[source]} 的列之和为 {total:.15g}")


def check_wellformed(spec: AutomatonSpec,
                     amplitude_tolerance: float = AMPLITUDE_TOLERANCE,
                     probability_tolerance: float = PROBABILITY_TOLERANCE) -> WellformednessReport:
    """
    检查划分、初始状态、列的范数以及同一符号下各列的正交性

    Returns:
        WellformednessReport，问题记录为条目而不是抛出异常
    """
    report = WellformednessReport(spec.num_states, spec.kind)
    _check_partition(spec, report)

    for symbol in SYMBOL_ORDER:
        out_of_range = False
        for source, column in spec.columns[symbol].items():
            bad = [t for t, _ in column if not 0 <= t < spec.num_states]
            if not 0 <= source < spec.num_states or bad:
                out_of_range = True
                report.add('range', symbol.value, (source, *bad), len(bad) or 1.0, "列引用了越界的状态编号")
        if out_of_range:
            continue
        if spec.is_quantum:
            _check_quantum_columns(spec, symbol, report, amplitude_tolerance)
        else:
            _check_stochastic_columns(spec, symbol, report, probability_tolerance)

    if report.violations:
        logging.warning(f"{spec.kind} 自动机有 {len(report.violations)} 处良构性问题")
    else:
        logging.debug(f"{spec.kind} 自动机 ({spec.num_states} 个状态) 良构性检查通过")
    return report
