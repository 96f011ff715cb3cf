"""
语言模块
L0(n)、L1(n)、L2(n,k) 的成员判定、实例生成 (含最坏情况实例) 以及语料文件读写
"""
import os
import re
import random
import logging
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.error_handler import CorpusFormatError, QfaToolsError
from ..core.number_theory import bits_value, max_common_primes

KINDS = ('member', 'nonmember', 'adversarial')
LANGUAGES = ('l0', 'l2')

Block = Tuple[str, str, str, str]


@dataclass(frozen=True)
class BlockString:
    """按块解析的输入串，raw 只含 0/1/#"""

    raw: str
    n: int
    blocks: Tuple[Block, ...] = ()
    language: str = 'l2'

    @property
    def k(self) -> int:
        return len(self.blocks)


def normalize(word: str) -> str:
    return word.replace('♯', '#')


def _reverse(bits: str) -> str:
    return bits[::-1]


def _block_pattern(n: int, k: int) -> 're.Pattern':
    bits = f"([01]{{{n}}})"
    block = f"{bits}#{bits}##{bits}#{bits}#"
    return re.compile('##'.join([block] * k))


def block_text(w1: str, w2: str, w3: str, w4: str) -> str:
    return f"{w1}#{w2}##{w3}#{w4}#"


def join_blocks(blocks: Sequence[Block]) -> str:
    return '##'.join(block_text(*block) for block in blocks)


def l0_text(w1: str, w2: str) -> str:
    return f"{w1}#{w2}"


def parse_blocks(word: str, n: int, k: int) -> Optional[Tuple[Block, ...]]:
    """精确解析 k 个块，格式不符返回 None"""
    if n < 1 or k < 1:
        return None
    match = _block_pattern(n, k).fullmatch(normalize(word))
    if match is None:
        return None
    groups = match.groups()
    return tuple(tuple(groups[i:i + 4]) for i in range(0, len(groups), 4))


def in_l0(word: str, n: int) -> bool:
    """word = w#w^R 且 |w| = n"""
    if n < 1:
        return False
    match = re.fullmatch(f"([01]{{{n}}})#([01]{{{n}}})", normalize(word))
    return match is not None and match.group(2) == _reverse(match.group(1))


def reversal_holds(block: Block) -> bool:
    w1, w2, w3, w4 = block
    return w1 + w2 == _reverse(w3 + w4)


def match_holds(block: Block) -> bool:
    return block[0] == _reverse(block[1])


def in_l2(word: str, n: int, k: int) -> bool:
    """存在 j 使 w_j1 = w_j2^R，且之前每块都满足 (w_i1 w_i2) = (w_i3 w_i4)^R"""
    blocks = parse_blocks(word, n, k)
    if blocks is None:
        return False
    for block in blocks:
        if match_holds(block):
            return True
        if not reversal_holds(block):
            return False
    return False


def in_l1(word: str, n: int) -> bool:
    """(w1 = w2^R) ∨ ((w1w2) = (w3w4)^R)，精确单块格式"""
    blocks = parse_blocks(word, n, 1)
    if blocks is None:
        return False
    return match_holds(blocks[0]) or reversal_holds(blocks[0])


def membership(word: str, n: int, k: int, language: str) -> bool:
    if language == 'l0':
        return in_l0(word, n)
    if language == 'l1':
        return in_l1(word, n)
    return in_l2(word, n, k)


# ---------------------------------------------------------------- 生成器

def _bits(rng: random.Random, n: int) -> str:
    return format(rng.getrandbits(n), f"0{n}b")


def _to_bits(value: int, n: int) -> str:
    return format(value, f"0{n}b")


def _random_block(rng: random.Random, n: int) -> Block:
    return tuple(_bits(rng, n) for _ in range(4))


def _reversal_block(rng: random.Random, n: int, w1: str = None, w2: str = None) -> Block:
    """满足 (w1w2) = (w3w4)^R 但 w1 ≠ w2^R 的块"""
    while True:
        a = w1 if w1 is not None else _bits(rng, n)
        b = w2 if w2 is not None else _bits(rng, n)
        if a != _reverse(b):
            return a, b, _reverse(b), _reverse(a)
        if w1 is not None and w2 is not None:
            raise QfaToolsError(f"给定的 w1={w1}, w2={w2} 满足 w1 = w2^R，不能构成反转块")


def _matching_block(rng: random.Random, n: int) -> Block:
    w1 = _bits(rng, n)
    return w1, _reverse(w1), _bits(rng, n), _bits(rng, n)


def _broken_block(rng: random.Random, n: int) -> Block:
    """两个条件都不满足的块"""
    while True:
        block = _random_block(rng, n)
        if not match_holds(block) and not reversal_holds(block):
            return block


def adversarial_pair(rng: random.Random, n: int) -> Tuple[str, str]:
    """
    返回 (x, y) 使 |val(x) - val(y^R)| 等于 max_common_primes(n) 的 witness，碰撞数达到 N0
    """
    witness = max_common_primes(n).witness
    low = rng.randrange(0, (1 << n) - witness)
    a, b = low, low + witness
    if rng.random() < 0.5:
        a, b = b, a
    return _to_bits(a, n), _reverse(_to_bits(b, n))


def _member_blocks(rng: random.Random, n: int, k: int) -> List[Block]:
    j = rng.randint(1, k)
    blocks = [_reversal_block(rng, n) for _ in range(j - 1)]
    blocks.append(_matching_block(rng, n))
    blocks.extend(_random_block(rng, n) for _ in range(k - j))
    return blocks


def _nonmember_blocks(rng: random.Random, n: int, k: int) -> List[Block]:
    if rng.random() < 0.5:
        return [_reversal_block(rng, n) for _ in range(k)]
    broken_at = rng.randint(1, k)
    blocks = [_reversal_block(rng, n) for _ in range(broken_at - 1)]
    blocks.append(_broken_block(rng, n))
    blocks.extend(_random_block(rng, n) for _ in range(k - broken_at))
    return blocks


def _adversarial_blocks(rng: random.Random, n: int, k: int) -> List[Block]:
    blocks = []
    for _ in range(k):
        x, y = adversarial_pair(rng, n)
        blocks.append(_reversal_block(rng, n, x, y))
    return blocks


def gen_instances(n: int, k: int, kind: str, count: int, seed, language: str = 'l2') -> List[BlockString]:
    """
    按种子确定性地生成实例

    Args:
        n: 每段位长
        k: 块数 (language='l0' 时忽略)
        kind: member / nonmember / adversarial
        count: 实例个数
        seed: 随机种子
        language: 'l2' (块格式，k=1 即 L1) 或 'l0'

    Returns:
        BlockString 列表，member/nonmember 已用判定器校验

    Raises:
        QfaToolsError: 请求无法满足
    """
    if kind not in KINDS:
        raise QfaToolsError(f"未知的实例类型: {kind}")
    if language not in LANGUAGES:
        raise QfaToolsError(f"未知的语言: {language}")
    if n < 1:
        raise QfaToolsError(f"位长必须为正: n={n}")
    if count < 0:
        raise QfaToolsError(f"实例个数不能为负数: {count}")
    if language == 'l2' and k < 1:
        raise QfaToolsError(f"块数为 {k} 的语言是空集，无法生成 {kind} 实例")

    rng = random.Random(seed)
    instances = []
    for _ in range(count):
        if language == 'l0':
            if kind == 'member':
                w = _bits(rng, n)
                x, y = w, _reverse(w)
            elif kind == 'nonmember':
                x, y = _bits(rng, n), _bits(rng, n)
                while y == _reverse(x):
                    y = _bits(rng, n)
            else:
                x, y = adversarial_pair(rng, n)
            instance = BlockString(l0_text(x, y), n, (), 'l0')
            expected = kind == 'member'
            actual = in_l0(instance.raw, n)
        else:
            if kind == 'member':
                blocks = _member_blocks(rng, n, k)
            elif kind == 'nonmember':
                blocks = _nonmember_blocks(rng, n, k)
            else:
                blocks = _adversarial_blocks(rng, n, k)
            instance = BlockString(join_blocks(blocks), n, tuple(blocks), 'l2')
            expected = kind == 'member'
            actual = in_l2(instance.raw, n, k)
        if actual != expected:
            raise QfaToolsError(f"生成的实例与判定器不一致: {instance.raw}")
        instances.append(instance)

    logging.debug(f"生成 {count} 个 {language} {kind} 实例 (n={n}, k={k}, seed={seed})")
    return instances


L1_PATHS = ('match', 'reversal', 'none')


def _broken_adversarial_block(rng: random.Random, n: int) -> Block:
    """w1、w2 取最坏情况对，(w3w4)^R 与 w1w2 之差取 2n 位的 witness"""
    witness = max_common_primes(2 * n).witness
    for _ in range(64):
        x, y = adversarial_pair(rng, n)
        value = bits_value(x + y)
        candidates = [v for v in (value + witness, value - witness) if 0 <= v < (1 << (2 * n))]
        if candidates:
            tail = _reverse(_to_bits(rng.choice(candidates), 2 * n))
            return x, y, tail[:n], tail[n:]
    raise QfaToolsError(f"n={n} 时找不到两个条件同时取最坏情况的块")


def gen_l1_instances(n: int, path: str, count: int, seed, adversarial: bool = False) -> List[BlockString]:
    """
    单块实例，按 L1 的判定路径分类

    Args:
        path: match (w1 = w2^R)、reversal (只满足反转条件) 或 none (非成员)
        adversarial: 为真时 w1、w2 取碰撞最多的对，none 路径的后半块也取最坏情况
    """
    if path not in L1_PATHS:
        raise QfaToolsError(f"未知的 L1 路径: {path}")
    if n < 1 or count < 0:
        raise QfaToolsError(f"需要 n >= 1 且 count >= 0: n={n}, count={count}")
    if path == 'match' and adversarial:
        raise QfaToolsError("match 路径不存在最坏情况对 (w1 = w2^R 时碰撞数恒为 N)")

    rng = random.Random(seed)
    instances = []
    for _ in range(count):
        if path == 'match':
            block = _matching_block(rng, n)
        elif path == 'reversal':
            block = _reversal_block(rng, n, *adversarial_pair(rng, n)) if adversarial else _reversal_block(rng, n)
        else:
            block = _broken_adversarial_block(rng, n) if adversarial else _broken_block(rng, n)
        instance = BlockString(block_text(*block), n, (block,), 'l1')
        if in_l1(instance.raw, n) != (path != 'none'):
            raise QfaToolsError(f"生成的实例与判定器不一致: {instance.raw}")
        instances.append(instance)
    return instances


def repeated_reversal_word(n: int, k: int, difference: int = 3) -> str:
    """
    k 个相同的反转块，val(w1) - val(w2^R) = difference (超出 n 位时取最大可表示差)
    """
    if n < 1 or k < 1:
        raise QfaToolsError(f"需要 n >= 1 且 k >= 1: n={n}, k={k}")
    difference = max(1, min(difference, (1 << n) - 1))
    w1 = _to_bits(difference, n)
    w2 = '0' * n
    return join_blocks([_reversal_block(random.Random(0), n, w1, w2)] * k)


def all_l0_words(n: int) -> List[str]:
    """所有 x#y，|x| = |y| = n，按字典序"""
    words = [_to_bits(v, n) for v in range(1 << n)]
    return [l0_text(x, y) for x in words for y in words]


def all_l1_words(n: int) -> List[str]:
    """所有单块 L1 格式串 (共 2^(4n) 个)"""
    words = [_to_bits(v, n) for v in range(1 << n)]
    return [block_text(*quad) for quad in itertools.product(words, repeat=4)]


# ---------------------------------------------------------------- 步序号

def block_span(n: int) -> int:
    """一个块加上块间分隔 ## 的符号数"""
    return 4 * n + 7


def stage3_split_step(n: int, block: int = 0) -> int:
    """第 block 块 (从 0 计) 中 w2 之后第一个 # 的步序号 (第 0 步是 ¢)"""
    return block * block_span(n) + 2 * n + 2


def restart_step(n: int, block: int = 0) -> int:
    """第 block 块之后回到起点的那个 # 的步序号"""
    return block * block_span(n) + 4 * n + 7


# ---------------------------------------------------------------- 语料文件

def write_corpus(path: str, words: Sequence[str], header: Dict[str, object]) -> str:
    """每行一个串，头部为 '# key=value' 注释"""
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        for key in sorted(header):
            f.write(f"# {key}={header[key]}\n")
        for word in words:
            f.write(f"{word}\n")
    logging.info(f"已写出语料 {path} ({len(words)} 个串)")
    return path


def read_corpus(path: str) -> Tuple[Dict[str, str], List[str]]:
    """
    读取语料文件

    Returns:
        (头部字典, 串列表)

    Raises:
        CorpusFormatError: 文件无法读取或串含非法字符
    """
    header: Dict[str, str] = {}
    words: List[str] = []
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise CorpusFormatError(f"无法读取语料 {path}: {str(e)}") from e

    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith('# '):
            key, sep, value = line[2:].partition('=')
            if sep:
                header[key.strip()] = value.strip()
            continue
        word = normalize(line)
        if any(ch not in '01#' for ch in word):
            raise CorpusFormatError(f"{path} 第 {number} 行含非法字符: {line!r}")
        words.append(word)
    return header, words


def word_values(instance: BlockString) -> List[Tuple[int, int]]:
    """每块 (或 L0 的一对) 的 (val(w1), val(w2^R))"""
    if instance.language == 'l0':
        x, y = instance.raw.split('#')
        return [(bits_value(x), bits_value(_reverse(y)))]
    return [(bits_value(w1), bits_value(_reverse(w2))) for w1, w2, _, _ in instance.blocks]
