"""
分析模块
闭式误差界、快照分解检查 (ψ = ψ1 + ψ2)、识别判定以及状态数核对
"""
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..core.automata import (
    AutomatonSpec, QfaSpec, RunResult, evolve, framed, run, trace_run,
)
from ..core.error_handler import ExperimentError, InapplicableInstanceError
from ..core.number_theory import (
    PrimeSet, bits_value, common_residue_count, error_bound, max_common_primes, odd_primes,
)
from .builders import M1Params, m0_state_count, m1_state_count, restart_states
from .languages import restart_step

SPLIT_TOLERANCE = 1e-9
CONTROL_TOLERANCE = 1e-9


@dataclass
class BoundReport:
    """
    一行实验结果: observed 落在 [predicted_low - tolerance, predicted_high + tolerance] 内即通过
    """

    experiment: str
    params: Dict[str, object]
    predicted_low: float
    predicted_high: float
    observed: float
    tolerance: float = 1e-9
    detail: str = ''

    @property
    def passed(self) -> bool:
        return self.predicted_low - self.tolerance <= self.observed <= self.predicted_high + self.tolerance

    def as_row(self, digits: int = 12) -> Dict[str, str]:
        return {
            'experiment': self.experiment,
            'params': ';'.join(f"{key}={self.params[key]}" for key in sorted(self.params)),
            'predicted_low': f"{self.predicted_low:.{digits}f}",
            'predicted_high': f"{self.predicted_high:.{digits}f}",
            'observed': f"{self.observed:.{digits}f}",
            'tolerance': f"{self.tolerance:.0e}",
            'passed': 'pass' if self.passed else 'fail',
            'detail': self.detail,
        }


REPORT_COLUMNS = ('experiment', 'params', 'predicted_low', 'predicted_high', 'observed',
                  'tolerance', 'passed', 'detail')


@dataclass(frozen=True)
class SplitOutcome:
    """快照分解后的各项测量值"""

    psi1_norm: float
    psi2_norm: float
    control_accept: float
    replay_accept: float
    bound: float


@dataclass(frozen=True)
class BlockOutcome:
    """一个块结束 (回到起点) 时的接受、拒绝与返回质量"""

    p_accept: float
    p_reject: float
    p_return: float


# ---------------------------------------------------------------- 闭式

def m0_accept_exact(primes: PrimeSet, x: str, y: str, model: str = 'quantum') -> float:
    """
    用余数直接计算 M0 的接受概率

    Args:
        primes: 素数集合 (N = primes.count)
        x: w1
        y: w2，比较的是 val(x) 与 val(y^R)
        model: quantum 为 (t/N)^2，classical 为 t/N

    Returns:
        接受概率
    """
    if len(x) != len(y):
        raise ValueError(f"x 与 y 长度不同: {x!r}, {y!r}")
    if model not in ('quantum', 'classical'):
        raise ValueError(f"未知模型: {model}")
    t = common_residue_count(bits_value(x), bits_value(y[::-1]), primes)
    ratio = Fraction(t, primes.count)
    return float(ratio ** 2 if model == 'quantum' else ratio)


def lemma4_bound(n0: int, n_primes: int) -> float:
    """M0P 对非成员的最大接受概率 N0/N"""
    return float(error_bound(n0, n_primes))


def _ratios(n0: int, n0p: int, n1: int, n2: int) -> Tuple[float, float]:
    if n1 < 1 or n2 < 1:
        raise ValueError(f"N1、N2 必须为正: N1={n1}, N2={n2}")
    if not 0 <= n0 <= n1 or not 0 <= n0p <= n2:
        raise ValueError(f"需要 0 <= N0 <= N1, 0 <= N0' <= N2: {n0}, {n1}, {n0p}, {n2}")
    return n0 / n1, n0p / n2


def lemma7_bounds(n0: int, n0p: int, n1: int, n2: int) -> Tuple[float, float]:
    """
    M1Q 的两个闭式界

    Returns:
        (成员接受下界 1 - x² + x⁴, 非成员接受上界 x² + (1 - x²)(α + x)²)，x = N0/N1，α = N0'/N2
    """
    x, alpha = _ratios(n0, n0p, n1, n2)
    accept_lower = 1 - x ** 2 + x ** 4
    reject_upper = x ** 2 + (1 - x ** 2) * (alpha + x) ** 2
    return accept_lower, reject_upper


def lemma7_member_bound(n0: int, n1: int) -> float:
    """反转路径成员的下界写法 x² + (1 - x²)²，与 1 - x² + x⁴ 相等"""
    x = n0 / n1
    return x ** 2 + (1 - x ** 2) ** 2


def lemma7_intermediate_bound(n0: int, n0p: int, n1: int, n2: int) -> float:
    """推导中的较紧上界 x² + (1 - x²)(√(1 - x²)·α + x)²"""
    x, alpha = _ratios(n0, n0p, n1, n2)
    return x ** 2 + (1 - x ** 2) * (math.sqrt(1 - x ** 2) * alpha + x) ** 2


def lemma8_bounds(n0: int, n0p: int, n1: int, n2: int) -> Tuple[float, float]:
    """M1P: 成员以概率 1 接受，非成员至多 x + (1 - x)·α"""
    x, alpha = _ratios(n0, n0p, n1, n2)
    return 1.0, x + (1 - x) * alpha


def theorem2_accumulation(a: float, n: int, c: float, k: int) -> float:
    """每轮以 a/n^c 接受，k 轮内被接受的概率 1 - (1 - a/n^c)^k"""
    rate = a / n ** c
    if not 0 < rate <= 1:
        raise ValueError(f"需要 0 < a/n^c <= 1，得到 {rate}")
    if k < 0:
        raise ValueError(f"k 不能为负数: {k}")
    return 1 - (1 - rate) ** k


def theorem2_limit(a: float) -> float:
    return 1 - math.exp(-a)


def theorem1_block_bounds(n: int, c: float) -> Dict[str, float]:
    """
    N1 = 2·N0·n^(c/2) 时单块的概率账目

    ii_*: 块满足反转条件但 w1 ≠ w2^R；iii_*: 反转条件也不满足
    """
    if n < 1 or c < 0:
        raise ValueError(f"需要 n >= 1, c >= 0: n={n}, c={c}")
    unit = 1 / (4 * n ** c)
    return {
        'ii_a': unit,
        'ii_b': unit - unit ** 2,
        'ii_c': 1 - 2 * unit + unit ** 2,
        'iii_a': unit,
        'iii_b': 0.75 - 0.75 * unit,
        'iii_c': 0.25 - 0.25 * unit,
    }


def m0_tradeoff(n: int) -> List[Dict[str, object]]:
    """同一误差率 1/n 下 QFA 与 PFA 所需素数个数与状态数"""
    n0 = max_common_primes(n).n0
    rows = []
    for model, count in (('quantum', math.ceil(n0 * math.sqrt(n) - 1e-9)), ('classical', n0 * n)):
        count = max(count, 1)
        ratio = Fraction(min(n0, count), count)
        rows.append({
            'model': model,
            'n': n,
            'n0': n0,
            'primes': count,
            'error': float(ratio ** 2 if model == 'quantum' else ratio),
            'states': m0_state_count(odd_primes(count)),
        })
    return rows


# ---------------------------------------------------------------- 快照分解

def _split(machine: AutomatonSpec, word: str, split_step: int, psi2_states: Optional[Iterable[int]]):
    snapshot = trace_run(machine, word, [split_step])[0]
    norm = math.sqrt(snapshot.mass())
    if norm < SPLIT_TOLERANCE:
        raise InapplicableInstanceError(f"第 {split_step} 步之后没有剩余振幅: {word}")
    psi = snapshot.scaled(1.0 / norm)
    suffix = framed(word)[split_step + 1:]
    second = frozenset(psi2_states or ())
    psi1 = psi.restricted(s for s in psi.amplitudes if s not in second)
    psi2 = psi.restricted(s for s in psi.amplitudes if s in second)
    return psi, psi1, psi2, suffix


def lemma5_check(machine: QfaSpec,
                 word: str,
                 split_step: int,
                 psi2_states: Optional[Iterable[int]] = None) -> BoundReport:
    """
    在 split_step 处取快照 ψ 并归一化，拆成 ψ1 (其余分量) 与 ψ2 (psi2_states 上的分量)，
    只用 ψ1 重放后缀，检查接受概率 >= ‖ψ1‖⁴

    Args:
        machine: 量子自动机 (通常为 halt_stage3=False 的 M1)
        word: 输入串
        split_step: 快照步序号
        psi2_states: ψ2 所在的状态，缺省时 ψ2 = 0

    Raises:
        InapplicableInstanceError: 从完整快照出发的对照运行没有以概率 1 接受
    """
    psi, psi1, psi2, suffix = _split(machine, word, split_step, psi2_states)
    control = evolve(machine, psi, suffix).p_accept
    if control < 1 - CONTROL_TOLERANCE:
        raise InapplicableInstanceError(f"对照运行接受概率 {control:.12f} < 1: {word}")

    n1 = math.sqrt(psi1.mass())
    n2 = math.sqrt(psi2.mass())
    replay = evolve(machine, psi1, suffix).p_accept
    outcome = SplitOutcome(n1, n2, control, replay, n1 ** 4)
    logging.debug(f"lemma5 {word}: ‖ψ1‖={n1:.6f}, 重放接受 {replay:.12f} >= {outcome.bound:.12f}")
    return BoundReport(
        'lemma5',
        {'word': word, 'split': split_step},
        outcome.bound, 1.0, replay,
        tolerance=SPLIT_TOLERANCE,
        detail=f"psi1={n1:.12f};psi2={n2:.12f};control={control:.12f}",
    )


def lemma6_check(machine: QfaSpec,
                 word: str,
                 split_step: int,
                 alpha: Optional[float] = None,
                 psi2_states: Optional[Iterable[int]] = None) -> BoundReport:
    """
    与 lemma5_check 相同的分解，检查重放接受概率 <= ‖ψ1‖²(α‖ψ1‖ + ‖ψ2‖)²

    α 取对照运行实测值；给出 alpha 时先确认对照运行不超过 alpha²，两者都写入日志。

    Raises:
        InapplicableInstanceError: 对照运行接受概率超过 alpha²
    """
    psi, psi1, psi2, suffix = _split(machine, word, split_step, psi2_states)
    control = evolve(machine, psi, suffix).p_accept
    if alpha is not None and control > alpha ** 2 + CONTROL_TOLERANCE:
        raise InapplicableInstanceError(f"对照运行接受概率 {control:.12f} > α² = {alpha ** 2:.12f}: {word}")
    measured = math.sqrt(max(control, 0.0))
    if alpha is not None:
        logging.debug(f"lemma6 {word}: 解析 α = {alpha:.6f}, 实测 α = {measured:.6f}")

    n1 = math.sqrt(psi1.mass())
    n2 = math.sqrt(psi2.mass())
    replay = evolve(machine, psi1, suffix).p_accept
    bound = n1 ** 2 * (measured * n1 + n2) ** 2
    return BoundReport(
        'lemma6',
        {'word': word, 'split': split_step},
        0.0, bound, replay,
        tolerance=SPLIT_TOLERANCE,
        detail=f"psi1={n1:.12f};psi2={n2:.12f};alpha={measured:.12f}",
    )


def split_check(machine: QfaSpec, word: str, split_step: int,
                psi2_states: Optional[Iterable[int]] = None) -> BoundReport:
    """按对照运行结果选择 lemma5_check (以概率 1 接受) 或 lemma6_check"""
    try:
        return lemma5_check(machine, word, split_step, psi2_states)
    except InapplicableInstanceError:
        return lemma6_check(machine, word, split_step, None, psi2_states)


def block_return_mass(machine: AutomatonSpec, params: M1Params, block: str, n: int) -> BlockOutcome:
    """
    运行 ¢·block·## 到回到起点的那一步，统计接受、拒绝与回到重启叠加态的质量
    """
    word = block + '##'
    snapshot = trace_run(machine, word, [restart_step(n, 0)])[0]
    restart = restart_states(machine, params)
    stray = [s for s in snapshot.amplitudes if s not in restart]
    if stray:
        raise ExperimentError(f"块结束后仍有 {len(stray)} 个状态不在重启叠加态上: {block}")
    return BlockOutcome(snapshot.p_accept, snapshot.p_reject, snapshot.mass())


# ---------------------------------------------------------------- 识别与计数

def _sequential(machine: AutomatonSpec, words: Sequence[str]) -> List[RunResult]:
    return [run(machine, word) for word in words]


def recognizes(machine: AutomatonSpec,
               corpus: Sequence[str],
               oracle: Callable[[str], bool],
               cutpoint: float = 0.5,
               evaluate: Optional[Callable[[AutomatonSpec, Sequence[str]], List[RunResult]]] = None,
               name: str = 'recognizes') -> BoundReport:
    """
    成员的接受概率严格大于 cutpoint、非成员 ≤ cutpoint 时通过 (剩余质量按拒绝处理)

    Args:
        machine: 自动机
        corpus: 精确格式的输入串
        oracle: 成员判定
        cutpoint: 分界点
        evaluate: 批量运行函数，缺省为顺序运行

    Returns:
        observed 为违例个数的 BoundReport，detail 中给出边界统计
    """
    results = (evaluate or _sequential)(machine, list(corpus))
    violations = []
    member_min, nonmember_max = None, None
    for word, result in zip(corpus, results):
        member = oracle(word)
        if member:
            member_min = result.p_accept if member_min is None else min(member_min, result.p_accept)
            if not result.p_accept > cutpoint:
                violations.append(word)
        else:
            nonmember_max = result.p_accept if nonmember_max is None else max(nonmember_max, result.p_accept)
            if result.p_accept > cutpoint:
                violations.append(word)

    detail = [f"words={len(corpus)}"]
    if member_min is not None:
        detail.append(f"min_member={member_min:.12f}")
    if nonmember_max is not None:
        detail.append(f"max_nonmember={nonmember_max:.12f}")
    if violations:
        detail.append(f"violations={','.join(violations[:10])}")
        logging.warning(f"{name}: {len(violations)} 个串被错误判定，首个为 {violations[0]}")
    return BoundReport(name, {'cutpoint': cutpoint}, 0.0, 0.0, float(len(violations)),
                       tolerance=0.0, detail=';'.join(detail))


def state_count_audit(spec: AutomatonSpec, formula_id: str, params) -> BoundReport:
    """
    把实际状态数与精确公式对比

    Args:
        spec: 构造好的自动机
        formula_id: m0 (1 + 3Σp_k)、m1 或 m2
        params: m0 为 PrimeSet，m1/m2 为 M1Params

    Raises:
        ExperimentError: formula_id 未知
    """
    if formula_id == 'm0':
        expected = m0_state_count(params)
        report_params = {'formula': 'm0', 'N': params.count}
        detail = f"sum_p={params.total}"
    elif formula_id in ('m1', 'm2'):
        expected = m1_state_count(params, loop=formula_id == 'm2')
        shape = params.primes1.total * params.primes2.total
        report_params = {'formula': formula_id, 'N1': params.n1, 'N2': params.n2}
        detail = f"shape={shape};ratio={spec.num_states / shape:.6f}"
    else:
        raise ExperimentError(f"未知的状态数公式: {formula_id}")
    return BoundReport('states', report_params, float(expected), float(expected),
                       float(spec.num_states), tolerance=0.0, detail=detail)
