"""
测试语言模块: 成员判定、确定性实例生成与语料文件
"""
import os
import unittest

from hypothesis import given, settings, strategies as st

from qfa_tools.core.error_handler import CorpusFormatError, QfaToolsError
from qfa_tools.core.number_theory import bits_value, max_common_primes
from qfa_tools.processing.languages import (
    KINDS, all_l0_words, all_l1_words, block_span, gen_instances, gen_l1_instances, in_l0,
    in_l1, in_l2, join_blocks, membership, parse_blocks, read_corpus, repeated_reversal_word,
    restart_step, stage3_split_step, word_values, write_corpus,
)
from tests.test_utils import TempFolder

REVERSAL = ('11', '00', '00', '11')
MATCH = ('10', '01', '11', '00')
BROKEN = ('11', '00', '01', '11')


class TestOracles(unittest.TestCase):

    def test_l0(self):
        self.assertTrue(in_l0('0110#0110', 4))
        self.assertTrue(in_l0('1000♯0001', 4))
        self.assertFalse(in_l0('0110#0111', 4))
        self.assertFalse(in_l0('011#110', 4))
        self.assertFalse(in_l0('0110#0110', 0))

    def test_l1(self):
        self.assertTrue(in_l1(join_blocks([MATCH]), 2))
        self.assertTrue(in_l1(join_blocks([REVERSAL]), 2))
        self.assertFalse(in_l1(join_blocks([BROKEN]), 2))

    def test_l2_needs_reversal_chain_before_match(self):
        self.assertTrue(in_l2(join_blocks([REVERSAL, MATCH]), 2, 2))
        self.assertTrue(in_l2(join_blocks([MATCH, BROKEN]), 2, 2))
        self.assertFalse(in_l2(join_blocks([BROKEN, MATCH]), 2, 2))
        self.assertFalse(in_l2(join_blocks([REVERSAL, REVERSAL]), 2, 2))
        self.assertFalse(in_l2(join_blocks([REVERSAL, MATCH]), 2, 1))

    def test_parse_blocks(self):
        self.assertEqual(parse_blocks(join_blocks([REVERSAL, MATCH]), 2, 2), (REVERSAL, MATCH))
        self.assertIsNone(parse_blocks('11#00##00#11', 2, 1))
        self.assertIsNone(parse_blocks(join_blocks([REVERSAL]), 2, 0))

    def test_membership_dispatch(self):
        word = join_blocks([REVERSAL])
        self.assertTrue(membership(word, 2, 1, 'l1'))
        self.assertFalse(membership(word, 2, 1, 'l2'))
        self.assertFalse(membership(word, 2, 1, 'l0'))


class TestGenerators(unittest.TestCase):

    def test_deterministic(self):
        first = [i.raw for i in gen_instances(3, 2, 'member', 10, seed=7)]
        second = [i.raw for i in gen_instances(3, 2, 'member', 10, seed=7)]
        self.assertEqual(first, second)
        self.assertNotEqual(first, [i.raw for i in gen_instances(3, 2, 'member', 10, seed=8)])

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=3),
           st.sampled_from(KINDS), st.integers(min_value=0, max_value=10 ** 6))
    def test_generated_instances_agree_with_oracle(self, n, k, kind, seed):
        for instance in gen_instances(n, k, kind, 5, seed):
            self.assertEqual(in_l2(instance.raw, n, k), kind == 'member')
            self.assertEqual(instance.k, k)

    def test_adversarial_pairs_reach_n0(self):
        witness = max_common_primes(4).witness
        for instance in gen_instances(4, 1, 'adversarial', 20, seed=1, language='l0'):
            (x, y), = word_values(instance)
            self.assertEqual(abs(x - y), witness)
            self.assertFalse(in_l0(instance.raw, 4))

    def test_l1_paths(self):
        for path, expected in (('match', True), ('reversal', True), ('none', False)):
            for instance in gen_l1_instances(3, path, 10, seed=3):
                self.assertEqual(in_l1(instance.raw, 3), expected)
        for instance in gen_l1_instances(3, 'none', 10, seed=3, adversarial=True):
            w1, w2, w3, w4 = instance.blocks[0]
            gap = abs(bits_value(w1 + w2) - bits_value((w3 + w4)[::-1]))
            self.assertEqual(gap, max_common_primes(6).witness)

    def test_invalid_requests(self):
        with self.assertRaises(QfaToolsError):
            gen_instances(3, 1, 'unknown', 1, seed=0)
        with self.assertRaises(QfaToolsError):
            gen_instances(3, 0, 'member', 1, seed=0)
        with self.assertRaises(QfaToolsError):
            gen_l1_instances(3, 'match', 1, seed=0, adversarial=True)

    def test_repeated_reversal_word(self):
        word = repeated_reversal_word(4, 2)
        self.assertEqual(word, '0011#0000##0000#1100###0011#0000##0000#1100#')
        self.assertFalse(in_l2(word, 4, 2))
        blocks = parse_blocks(word, 4, 2)
        self.assertEqual(bits_value(blocks[0][0]) - bits_value(blocks[0][1][::-1]), 3)

    def test_exhaustive_lists(self):
        self.assertEqual(len(all_l0_words(2)), 16)
        self.assertEqual(sum(in_l0(w, 2) for w in all_l0_words(2)), 4)
        self.assertEqual(len(all_l1_words(1)), 16)


class TestStepIndices(unittest.TestCase):

    def test_offsets(self):
        self.assertEqual(block_span(4), 23)
        self.assertEqual(stage3_split_step(4), 10)
        self.assertEqual(stage3_split_step(4, block=1), 33)
        self.assertEqual(restart_step(4), 23)

    def test_split_step_points_at_sharp_after_w2(self):
        word = repeated_reversal_word(4, 2)
        framed_word = '¢' + word + '$'
        self.assertEqual(framed_word[stage3_split_step(4)], '#')
        self.assertEqual(framed_word[stage3_split_step(4) - 1], '0')
        self.assertEqual(framed_word[stage3_split_step(4, 1)], '#')


class TestCorpusFiles(unittest.TestCase):

    def test_write_and_read(self):
        words = [i.raw for i in gen_instances(2, 1, 'nonmember', 4, seed=0)]
        with TempFolder() as folder:
            path = write_corpus(os.path.join(folder, 'sub', 'c.txt'), words, {'n': 2, 'k': 1, 'language': 'l2'})
            header, loaded = read_corpus(path)
        self.assertEqual(loaded, words)
        self.assertEqual(header, {'k': '1', 'language': 'l2', 'n': '2'})

    def test_bad_corpus(self):
        with TempFolder() as folder:
            path = os.path.join(folder, 'bad.txt')
            with open(path, 'w', encoding='utf-8') as f:
                f.write('# n=2\n01#10\n01x10\n')
            with self.assertRaises(CorpusFormatError):
                read_corpus(path)
            with self.assertRaises(CorpusFormatError):
                read_corpus(os.path.join(folder, 'absent.txt'))


if __name__ == '__main__':
    unittest.main()
