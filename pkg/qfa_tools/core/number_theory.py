"""
数论模块
提供奇素数集合、N0 穷举计算以及所有自动机共用的模除正向/逆向步进映射
"""
import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np

from .error_handler import PrimeRangeError, WordFormatError

# max_common_primes 的穷举上限 (2^24 个差值)
MAX_BRUTE_FORCE_BITS = 24


@dataclass(frozen=True)
class PrimeSet:
    """有序奇素数集合 p_1 < p_2 < ... < p_N，p_1 = 3"""

    primes: Tuple[int, ...]

    def __post_init__(self):
        previous = 2
        for p in self.primes:
            if p <= previous or p % 2 == 0 or not is_prime(p):
                raise ValueError(f"PrimeSet 需要严格递增的奇素数: {self.primes}")
            previous = p
        if self.primes and self.primes[0] != 3:
            raise ValueError("PrimeSet 的第一个素数必须是 3")

    @property
    def count(self) -> int:
        return len(self.primes)

    @property
    def total(self) -> int:
        """Σ p_k，状态数公式中的主要项"""
        return sum(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __getitem__(self, index: int) -> int:
        return self.primes[index]


@dataclass(frozen=True)
class CollisionStats:
    """n 位整数对在奇素数模上最多能碰撞多少次"""

    n: int
    n0: int
    witness: int


def is_prime(value: int) -> bool:
    """确定性试除判定"""
    if value < 2:
        return False
    if value % 2 == 0:
        return value == 2
    for divisor in range(3, math.isqrt(value) + 1, 2):
        if value % divisor == 0:
            return False
    return True


def _sieve(limit: int) -> np.ndarray:
    """返回 [0, limit) 内素数的布尔标记"""
    flags = np.ones(max(limit, 2), dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(max(limit, 2) - 1) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return flags[:limit]


def odd_primes(count: int) -> PrimeSet:
    """
    前 count 个奇素数

    Args:
        count: 素数个数

    Returns:
        从 3 开始的 PrimeSet
    """
    if count < 0:
        raise ValueError(f"素数个数不能为负数: {count}")
    if count == 0:
        return PrimeSet(())

    # p_n < n (ln n + ln ln n) 对 n >= 6 成立，多取一个补偿被排除的 2
    n = count + 1
    limit = 16 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 2
    while True:
        found = np.flatnonzero(_sieve(limit))
        found = found[found > 2]
        if len(found) >= count:
            return PrimeSet(tuple(int(p) for p in found[:count]))
        limit *= 2


@lru_cache(maxsize=None)
def max_common_primes(n: int) -> CollisionStats:
    """
    穷举 d ∈ [1, 2^n)，求不同奇素因子个数的最大值 (即 N0)

    Args:
        n: 位长，1 <= n <= 24

    Returns:
        CollisionStats，witness 为取到最大值的最小差值

    Raises:
        PrimeRangeError: n 超出穷举范围
    """
    if not 1 <= n <= MAX_BRUTE_FORCE_BITS:
        raise PrimeRangeError(f"位长 n={n} 超出穷举范围 [1, {MAX_BRUTE_FORCE_BITS}]")

    size = 1 << n
    omega = np.zeros(size, dtype=np.int16)
    for p in np.flatnonzero(_sieve(size)):
        if p > 2:
            omega[p::p] += 1
    omega[0] = -1

    witness = int(np.argmax(omega))
    stats = CollisionStats(n=n, n0=int(omega[witness]), witness=witness)
    logging.debug(f"max_common_primes({n}) = {stats.n0}, witness = {stats.witness}")
    return stats


def error_bound(n0: int, n_primes: int) -> Fraction:
    """单素数指纹协议的最大误差 N0/N"""
    if n_primes == 0:
        raise ZeroDivisionError("素数个数 N 不能为 0")
    if not 0 <= n0 <= n_primes:
        raise ValueError(f"需要 0 <= n0 <= N，得到 n0={n0}, N={n_primes}")
    return Fraction(n0, n_primes)


def _check_residue(p: int, j: int, bit: int):
    if not 0 <= j < p:
        raise ValueError(f"余数 j={j} 不在 [0, {p}) 内")
    if bit not in (0, 1):
        raise ValueError(f"bit 只能是 0 或 1，得到 {bit}")


def forward_div_step(p: int, j: int, bit: int) -> int:
    """读入一位后的新余数 (2j + bit) mod p"""
    _check_residue(p, j, bit)
    return (2 * j + bit) % p


def reverse_div_step(p: int, j: int, bit: int) -> int:
    """forward_div_step 的逆: 唯一满足 forward_div_step(p, j', bit) = j 的 j'"""
    _check_residue(p, j, bit)
    if bit == 0:
        return j // 2 if j % 2 == 0 else (j + p) // 2
    return (j - 1 + p) // 2 if j % 2 == 0 else (j - 1) // 2


def bits_value(bits: str) -> int:
    """二进制串 (高位在前) 的整数值，空串为 0"""
    _check_bits(bits)
    return int(bits, 2) if bits else 0


def _check_bits(bits: str):
    for ch in bits:
        if ch not in '01':
            raise WordFormatError(f"二进制串中出现非法字符 {ch!r}: {bits!r}")


def residue_of_word(p: int, bits: str) -> int:
    """
    从 0 开始逐位执行 forward_div_step

    Args:
        p: 奇素数
        bits: 高位在前的二进制串

    Returns:
        bits 的整数值 mod p
    """
    _check_bits(bits)
    residue = 0
    for ch in bits:
        residue = forward_div_step(p, residue, 1 if ch == '1' else 0)
    return residue


def fingerprint_equal(x: int, y: int, p: int) -> bool:
    """单轮指纹协议: 比较 x、y 模 p 的余数"""
    return x % p == y % p


def common_residue_count(x: int, y: int, primes: Iterable[int]) -> int:
    """指纹碰撞次数 t = #{p : x ≡ y (mod p)}"""
    return sum(1 for p in primes if fingerprint_equal(x, y, p))


def distinct_odd_prime_factors(value: int) -> Sequence[int]:
    """value 的不同奇素因子，升序"""
    factors = []
    value = abs(value)
    while value and value % 2 == 0:
        value //= 2
    divisor = 3
    while divisor * divisor <= value:
        if value % divisor == 0:
            factors.append(divisor)
            while value % divisor == 0:
                value //= divisor
        divisor += 2
    if value > 1:
        factors.append(value)
    return factors
