"""
自动机构造模块
由模除步进映射与傅里叶块程序化生成 M0、M1 及迭代版 M 的量子/概率自动机
"""
import cmath
import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from ..core.automata import AutomatonSpec, PfaSpec, QfaSpec, StatePartition, Symbol
from ..core.error_handler import BuildError
from ..core.number_theory import (
    PrimeSet, forward_div_step, max_common_primes, odd_primes, reverse_div_step,
)

BITS = (0, 1)


@dataclass(frozen=True)
class FourierBlock:
    """N 点傅里叶变换，第 k 列为 exp(sign·2πi·kl/N)/√N，k, l ∈ [1, N]"""

    size: int
    sign: int = 1

    def __post_init__(self):
        if self.size < 1:
            raise BuildError(f"傅里叶块大小必须为正: {self.size}")
        if self.sign not in (1, -1):
            raise BuildError(f"傅里叶块符号只能是 +1 或 -1: {self.sign}")

    def amplitude(self, k: int, l: int) -> complex:
        # 相位直接由角度计算，不做累乘
        angle = self.sign * 2.0 * math.pi * ((k * l) % self.size) / self.size
        return cmath.exp(1j * angle) / math.sqrt(self.size)

    def column(self, k: int) -> List[complex]:
        return [self.amplitude(k, l) for l in range(1, self.size + 1)]

    def matrix(self) -> np.ndarray:
        """行为目标 l，列为源 k"""
        index = np.arange(1, self.size + 1)
        angles = self.sign * 2.0 * np.pi * (np.outer(index, index) % self.size) / self.size
        return np.exp(1j * angles) / np.sqrt(self.size)


@dataclass(frozen=True)
class M1Params:
    """primes1 检查 w1 = w2^R，primes2 检查 (w1w2) = (w3w4)^R"""

    primes1: PrimeSet
    primes2: PrimeSet

    def __post_init__(self):
        if not self.primes1.count or not self.primes2.count:
            raise BuildError("M1 需要两个非空素数集合")

    @property
    def n1(self) -> int:
        return self.primes1.count

    @property
    def n2(self) -> int:
        return self.primes2.count


@dataclass(frozen=True)
class TheoremParams:
    n: int
    c: float = 1
    d: int = 3
    a: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.c < 0 or self.d < 1:
            raise BuildError(f"需要 n >= 1, c >= 0, d >= 1: {self}")
        if self.a <= 0:
            raise BuildError(f"a 必须为正: {self.a}")


def _ceil(value: float) -> int:
    # 吸收 n ** (c/2) 之类的浮点误差
    return math.ceil(value - 1e-9)


class _MachineBuilder:
    """按名字分配状态编号并收集各符号下的转移列"""

    def __init__(self, quantum: bool):
        self.quantum = quantum
        self.names: List[str] = []
        self.ids: Dict[str, int] = {}
        self.kinds: List[str] = []
        self.columns: Dict[Symbol, Dict[int, Tuple]] = {symbol: {} for symbol in Symbol}

    def add(self, name: str, kind: str = 'continue') -> int:
        if name in self.ids:
            raise BuildError(f"状态重复: {name}")
        self.ids[name] = len(self.names)
        self.names.append(name)
        self.kinds.append(kind)
        return self.ids[name]

    def __getitem__(self, name: str) -> int:
        return self.ids[name]

    def set(self, symbol: Symbol, source: str, entries):
        source_id = self.ids[source]
        if source_id in self.columns[symbol]:
            raise BuildError(f"{source} 在符号 {symbol.value} 下的列重复定义")
        self.columns[symbol][source_id] = tuple((self.ids[t], self._entry(v)) for t, v in entries)

    def move(self, symbol: Symbol, source: str, target: str):
        self.set(symbol, source, [(target, 1.0)])

    def uniform(self, symbol: Symbol, source: str, targets: List[str]):
        """等振幅 (量子) 或等概率 (经典) 分裂"""
        weight = 1.0 / math.sqrt(len(targets)) if self.quantum else 1.0 / len(targets)
        self.set(symbol, source, [(t, weight) for t in targets])

    def fourier(self, symbol: Symbol, source: str, block: FourierBlock, k: int, targets: List[str], gather: int):
        """
        量子: 按 block 的第 k 列展开到 targets；经典仿真: 确定性地转到 targets[gather - 1]
        """
        if self.quantum:
            self.set(symbol, source, list(zip(targets, block.column(k))))
        else:
            self.move(symbol, source, targets[gather - 1])

    def _entry(self, value):
        return complex(value) if self.quantum else float(abs(value))

    def build(self) -> AutomatonSpec:
        partition = StatePartition(
            frozenset(i for i, k in enumerate(self.kinds) if k == 'accept'),
            frozenset(i for i, k in enumerate(self.kinds) if k == 'reject'),
            frozenset(i for i, k in enumerate(self.kinds) if k == 'continue'),
        )
        spec_type = QfaSpec if self.quantum else PfaSpec
        return spec_type(len(self.names), tuple(self.names), 0, partition, self.columns)


# ---------------------------------------------------------------- M0

def _m0_name(p: int, j, stage) -> str:
    return f"q[{p},{j},{stage}]"


@lru_cache(maxsize=32)
def _build_m0(primes: PrimeSet, quantum: bool) -> AutomatonSpec:
    if not primes.count:
        raise BuildError("M0 需要非空素数集合")
    n_primes = primes.count
    mb = _MachineBuilder(quantum)
    mb.add('q0')
    for stage in (1, 2):
        for p in primes:
            for j in range(p):
                mb.add(_m0_name(p, j, stage))
    for p in primes:
        for j in range(1, p):
            mb.add(_m0_name(p, j, 'rej'), 'reject')
    for l in range(1, n_primes + 1):
        mb.add(f"s[{l}]", 'accept' if l == n_primes else 'reject')

    # (1) 读 ¢ 时等幅分裂到各素数的零余数状态
    mb.uniform(Symbol.LEFT_END, 'q0', [_m0_name(p, 0, 1) for p in primes])

    gather_targets = [f"s[{l}]" for l in range(1, n_primes + 1)]
    block = FourierBlock(n_primes, +1)
    for k, p in enumerate(primes, start=1):
        for j in range(p):
            for bit in BITS:
                symbol = Symbol.bit(bit)
                # (2-*) 第一阶段做除法，(4-*) 第二阶段逆向
                mb.move(symbol, _m0_name(p, j, 1), _m0_name(p, forward_div_step(p, j, bit), 1))
                mb.move(symbol, _m0_name(p, j, 2), _m0_name(p, reverse_div_step(p, j, bit), 2))
            mb.move(Symbol.SHARP, _m0_name(p, j, 1), _m0_name(p, j, 2))
            if j == 0:
                mb.fourier(Symbol.RIGHT_END, _m0_name(p, 0, 2), block, k, gather_targets, n_primes)
            else:
                mb.move(Symbol.RIGHT_END, _m0_name(p, j, 2), _m0_name(p, j, 'rej'))

    spec = mb.build()
    logging.debug(f"M0{'Q' if quantum else 'P'}: {primes.count} 个素数, {spec.num_states} 个状态")
    return spec


def build_m0q(primes: PrimeSet) -> QfaSpec:
    """
    构造判定 L0 的量子自动机，s_N 是唯一接受状态

    Raises:
        BuildError: 素数集合为空
    """
    return _build_m0(primes, True)


def build_m0p(primes: PrimeSet) -> PfaSpec:
    """M0Q 的经典仿真: 分裂概率为 1/N，傅里叶块换成到 s_N 的确定转移"""
    return _build_m0(primes, False)


def m0_state_count(primes: PrimeSet) -> int:
    return 1 + 3 * primes.total


# ---------------------------------------------------------------- M1 / M

def _q(pk: int, e: int, pl: int, f: int, stage) -> str:
    return f"q[{pk},{e},{pl},{f},{stage}]"


def _s(m: int, pl: int, f: int) -> str:
    return f"s[{m},0,{pl},{f}]"


def _t(pk: int, y: int) -> str:
    return f"t[{pk},0,{y}]"


def _tz(z: int) -> str:
    return f"t[{z}]"


def _residue_pairs(params: M1Params):
    for pk in params.primes1:
        for e in range(pk):
            for pl in params.primes2:
                for f in range(pl):
                    yield pk, e, pl, f


@lru_cache(maxsize=16)
def _build_m1(params: M1Params, quantum: bool, loop: bool, halt_stage3: bool) -> AutomatonSpec:
    p1, p2 = params.primes1, params.primes2
    n1, n2 = params.n1, params.n2
    mb = _MachineBuilder(quantum)

    mb.add('q0')
    for stage in (1, 2):
        for pk, e, pl, f in _residue_pairs(params):
            mb.add(_q(pk, e, pl, f, stage))
    for m in range(1, n1 + 1):
        for pl in p2:
            for f in range(pl):
                mb.add(_s(m, pl, f), 'accept' if m == n1 and halt_stage3 else 'continue')
    for pk, e, pl, f in _residue_pairs(params):
        if e:
            mb.add(_q(pk, e, pl, f, 'w'))
    for stage in (3, 4):
        for pk, e, pl, f in _residue_pairs(params):
            mb.add(_q(pk, e, pl, f, stage))
    for pk, e, pl, f in _residue_pairs(params):
        if e or f or loop:
            mb.add(_q(pk, e, pl, f, 'rej'), 'reject')
    for pk in p1:
        for y in range(1, n2 + 1):
            mb.add(_t(pk, y), 'reject' if y < n2 else 'continue')
    for z in range(1, n1 + 1):
        mb.add(_tz(z), 'reject' if z < n1 else ('continue' if loop else 'accept'))

    restart = [_q(pk, 0, pl, 0, 1) for pk in p1 for pl in p2]
    mb.uniform(Symbol.LEFT_END, 'q0', restart)

    f1 = FourierBlock(n1, +1)
    f1_inverse = FourierBlock(n1, -1)
    f2 = FourierBlock(n2, +1)
    index1 = {pk: k for k, pk in enumerate(p1, start=1)}
    index2 = {pl: l for l, pl in enumerate(p2, start=1)}

    for pk, e, pl, f in _residue_pairs(params):
        for bit in BITS:
            symbol = Symbol.bit(bit)
            fe, re_ = forward_div_step(pk, e, bit), reverse_div_step(pk, e, bit)
            ff, rf = forward_div_step(pl, f, bit), reverse_div_step(pl, f, bit)
            # (2) w1: 两者都做除法；(4) w2: e 逆向、f 继续
            mb.move(symbol, _q(pk, e, pl, f, 1), _q(pk, fe, pl, ff, 1))
            mb.move(symbol, _q(pk, e, pl, f, 2), _q(pk, re_, pl, ff, 2))
            # (7) w3 撤销第二阶段，(9) w4 撤销第一阶段
            mb.move(symbol, _q(pk, e, pl, f, 3), _q(pk, fe, pl, rf, 3))
            mb.move(symbol, _q(pk, e, pl, f, 4), _q(pk, re_, pl, rf, 4))

        # (3) 与 (8): 阶段切换
        mb.move(Symbol.SHARP, _q(pk, e, pl, f, 1), _q(pk, e, pl, f, 2))
        mb.move(Symbol.SHARP, _q(pk, e, pl, f, 3), _q(pk, e, pl, f, 4))

        k = index1[pk]
        if e == 0:
            # (5-a) 零余数分支汇聚到 s_{N1,0,pl,f}
            targets = [_s(m, pl, f) for m in range(1, n1 + 1)]
            mb.fourier(Symbol.SHARP, _q(pk, 0, pl, f, 2), f1, k, targets, n1)
        else:
            # (5-b) 与 (6-b): 非零余数等待一步后进入第三阶段
            mb.move(Symbol.SHARP, _q(pk, e, pl, f, 2), _q(pk, e, pl, f, 'w'))
            mb.move(Symbol.SHARP, _q(pk, e, pl, f, 'w'), _q(pk, e, pl, f, 3))

        if e == 0 and f == 0:
            # (10-a) 汇聚到 t_{pk,0,N2}
            targets = [_t(pk, y) for y in range(1, n2 + 1)]
            mb.fourier(Symbol.SHARP, _q(pk, 0, pl, 0, 4), f2, index2[pl], targets, n2)
        else:
            # (10-b) 余数对不为 (0, 0) 即拒绝
            mb.move(Symbol.SHARP, _q(pk, e, pl, f, 4), _q(pk, e, pl, f, 'rej'))

        if loop:
            # (10-c) 缺少块尾 # 时在 $ 上拒绝
            mb.move(Symbol.RIGHT_END, _q(pk, e, pl, f, 4), _q(pk, e, pl, f, 'rej'))

    # (6-a) 逆傅里叶把未被接受的振幅送回第三阶段
    last_m = n1 if not halt_stage3 else n1 - 1
    stage3_zero = {pl: {f: [_q(pr, 0, pl, f, 3) for pr in p1] for f in range(pl)} for pl in p2}
    for m in range(1, last_m + 1):
        for pl in p2:
            for f in range(pl):
                mb.fourier(Symbol.SHARP, _s(m, pl, f), f1_inverse, m, stage3_zero[pl][f], m)

    # (11) 在 $ 上汇聚到 t_{N1}；指数分母取 N1 才是合法的 N1 点变换
    t_targets = [_tz(z) for z in range(1, n1 + 1)]
    for pk in p1:
        mb.fourier(Symbol.RIGHT_END, _t(pk, n2), f1, index1[pk], t_targets, n1)
        if loop:
            mb.fourier(Symbol.SHARP, _t(pk, n2), f1, index1[pk], t_targets, n1)

    if loop:
        # (12) 从 t_{N1} 读 # 回到初始状态的 ¢ 像，开始下一块
        mb.uniform(Symbol.SHARP, _tz(n1), restart)

    spec = mb.build()
    logging.debug(
        f"M{'2' if loop else '1'}{'Q' if quantum else 'P'}: N1={n1}, N2={n2}, {spec.num_states} 个状态"
    )
    return spec


def build_m1q(params: M1Params, halt_stage3: bool = True) -> QfaSpec:
    """
    构造判定 L1 的六阶段量子自动机

    Args:
        params: 两组素数
        halt_stage3: False 时第三阶段的汇聚状态改为非停机 (延迟测量的对照机)

    Returns:
        QfaSpec
    """
    return _build_m1(params, True, False, halt_stage3)


def build_m1p(params: M1Params, halt_stage3: bool = True) -> PfaSpec:
    """M1Q 的经典仿真，每个傅里叶块换成到指定目标的确定转移"""
    return _build_m1(params, False, False, halt_stage3)


def build_m2q(params: M1Params, loop: bool = True) -> QfaSpec:
    """
    迭代版量子自动机: 每块结束后从 t_{N1} 读 # 回到起点

    Args:
        params: 两组素数
        loop: False 时与 build_m1q 完全相同
    """
    return _build_m1(params, True, loop, True)


def build_m2p(params: M1Params, loop: bool = True) -> PfaSpec:
    """build_m2q 的经典仿真"""
    return _build_m1(params, False, loop, True)


def m1_state_count(params: M1Params, loop: bool = False) -> int:
    count = 1 + 6 * params.primes1.total * params.primes2.total + params.n1
    return count + params.n1 * params.n2 if loop else count


def stage3_gathering_states(spec: AutomatonSpec, params: M1Params) -> FrozenSet[int]:
    """第三阶段的汇聚状态 s_{N1,0,pl,f}"""
    return frozenset(
        spec.state_id(_s(params.n1, pl, f)) for pl in params.primes2 for f in range(pl)
    )


def restart_states(spec: AutomatonSpec, params: M1Params) -> FrozenSet[int]:
    """¢ 之后 (以及每次回到起点之后) 的零余数状态"""
    return frozenset(spec.state_id(_q(pk, 0, pl, 0, 1)) for pk in params.primes1 for pl in params.primes2)


# ---------------------------------------------------------------- 参数

def theorem1_params(n: int, c: float, d: int) -> M1Params:
    """
    N1 = ceil(2·N0·n^(c/2))，N2 = d·N0'，N0' 为 2n 位整数的碰撞数

    Raises:
        PrimeRangeError: n 或 2n 超出穷举范围
    """
    TheoremParams(n, c, d)
    n0 = max_common_primes(n).n0
    n0p = max_common_primes(2 * n).n0
    n1 = max(1, _ceil(2 * n0 * n ** (c / 2)))
    n2 = max(1, d * n0p)
    logging.info(f"theorem1_params(n={n}, c={c}, d={d}): N0={n0}, N0'={n0p}, N1={n1}, N2={n2}")
    return M1Params(odd_primes(n1), odd_primes(n2))


def theorem2_params(n: int, c: float, d: int, a: float) -> M1Params:
    """N1 = ceil(N0·n^c / a)，N2 = d·N0'"""
    TheoremParams(n, c, d, a)
    n0 = max_common_primes(n).n0
    n0p = max_common_primes(2 * n).n0
    n1 = max(1, _ceil(n0 * n ** c / a))
    n2 = max(1, d * n0p)
    logging.info(f"theorem2_params(n={n}, c={c}, d={d}, a={a}): N1={n1}, N2={n2}")
    return M1Params(odd_primes(n1), odd_primes(n2))


def lemma7_params(n: int, d: int, model: str = 'quantum') -> M1Params:
    """
    量子取 N1 = ceil(N0·√n)，经典取 N1 = N0·n 以获得相同的第三阶段误差；N2 = d·N0'
    """
    if model not in ('quantum', 'classical'):
        raise BuildError(f"未知模型: {model}")
    TheoremParams(n, 0, d)
    n0 = max_common_primes(n).n0
    n0p = max_common_primes(2 * n).n0
    n1 = _ceil(n0 * math.sqrt(n)) if model == 'quantum' else n0 * n
    return M1Params(odd_primes(max(1, n1)), odd_primes(max(1, d * n0p)))


def build_machine(machine_id: str, params) -> AutomatonSpec:
    """按编号构造: m0q/m0p 接受 PrimeSet，其余接受 M1Params"""
    builders = {
        'm0q': build_m0q, 'm0p': build_m0p,
        'm1q': build_m1q, 'm1p': build_m1p,
        'm2q': build_m2q, 'm2p': build_m2p,
    }
    if machine_id not in builders:
        raise BuildError(f"未知的自动机编号: {machine_id}")
    return builders[machine_id](params)
