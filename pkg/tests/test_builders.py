"""
测试自动机构造: 状态数公式、良构性以及关键输入上的接受概率
"""
import re
import unittest

import numpy as np

from qfa_tools.core.automata import Symbol, check_wellformed, run
from qfa_tools.core.error_handler import BuildError
from qfa_tools.core.number_theory import odd_primes
from qfa_tools.processing.builders import (
    FourierBlock, M1Params, build_m0p, build_m0q, build_m1p, build_m1q, build_m2p, build_m2q,
    build_machine, lemma7_params, m0_state_count, m1_state_count, restart_states,
    stage3_gathering_states, theorem1_params, theorem2_params,
)

SMALL = M1Params(odd_primes(2), odd_primes(2))


class TestFourierBlock(unittest.TestCase):

    def test_unitary(self):
        for size in (1, 2, 5, 8):
            for sign in (1, -1):
                matrix = FourierBlock(size, sign).matrix()
                self.assertTrue(np.allclose(matrix.conj().T @ matrix, np.eye(size), atol=1e-12))

    def test_column_matches_matrix(self):
        block = FourierBlock(6)
        self.assertTrue(np.allclose(np.array(block.column(4)), block.matrix()[:, 3]))

    def test_gathering_row(self):
        # 第 N 行全为 1/√N，零余数分支在此相干叠加
        block = FourierBlock(4)
        for k in range(1, 5):
            self.assertAlmostEqual(block.amplitude(k, 4), 0.5, places=12)

    def test_inverse_undoes_forward(self):
        forward = FourierBlock(5, 1).matrix()
        inverse = FourierBlock(5, -1).matrix()
        self.assertTrue(np.allclose(inverse @ forward, np.eye(5), atol=1e-12))

    def test_invalid(self):
        with self.assertRaises(BuildError):
            FourierBlock(0)
        with self.assertRaises(BuildError):
            FourierBlock(3, 2)


class TestM0(unittest.TestCase):

    def test_state_count(self):
        primes = odd_primes(2)
        spec = build_m0q(primes)
        self.assertEqual(spec.num_states, 25)
        self.assertEqual(m0_state_count(primes), 25)
        self.assertEqual(spec.column_counts(), {'LEFT_END': 1, '0': 16, '1': 16, 'SHARP': 8, 'RIGHT_END': 8})
        for count in range(1, 11):
            primes = odd_primes(count)
            self.assertEqual(build_m0q(primes).num_states, 1 + 3 * sum(primes))

    def test_wellformed(self):
        for count in range(1, 9):
            self.assertTrue(check_wellformed(build_m0q(odd_primes(count))).ok)
            self.assertTrue(check_wellformed(build_m0p(odd_primes(count))).ok)

    def test_quadratic_versus_linear_collision(self):
        primes = odd_primes(8)
        self.assertAlmostEqual(run(build_m0q(primes), '0000#1111').p_accept, 1 / 16, delta=1e-9)
        self.assertAlmostEqual(run(build_m0p(primes), '0000#1111').p_accept, 1 / 4, delta=1e-12)

    def test_members_accepted(self):
        primes = odd_primes(8)
        for word in ('0110#0110', '1000#0001', '1111#1111', '0#0'):
            self.assertAlmostEqual(run(build_m0q(primes), word).p_accept, 1.0, delta=1e-9)
            self.assertAlmostEqual(run(build_m0p(primes), word).p_accept, 1.0, delta=1e-12)

    def test_empty_prime_set(self):
        with self.assertRaises(BuildError):
            build_m0q(odd_primes(0))


class TestM1(unittest.TestCase):

    def test_state_counts(self):
        self.assertEqual(m1_state_count(SMALL), 1 + 6 * 8 * 8 + 2)
        self.assertEqual(build_m1q(SMALL).num_states, m1_state_count(SMALL))
        self.assertEqual(build_m1p(SMALL).num_states, m1_state_count(SMALL))
        self.assertEqual(build_m2q(SMALL).num_states, m1_state_count(SMALL, loop=True))
        self.assertEqual(m1_state_count(SMALL, loop=True), m1_state_count(SMALL) + 4)

    def test_wellformed(self):
        for n1 in range(1, 5):
            for n2 in range(1, 5):
                params = M1Params(odd_primes(n1), odd_primes(n2))
                for spec in (build_m1q(params), build_m1p(params), build_m2q(params), build_m2p(params),
                             build_m1q(params, halt_stage3=False), build_m1p(params, halt_stage3=False)):
                    report = check_wellformed(spec)
                    self.assertTrue(report.ok, (n1, n2, spec.kind, report.violations[:3]))

    def test_unlooped_m2_is_m1(self):
        for params in (SMALL, M1Params(odd_primes(3), odd_primes(2))):
            for looped, plain in ((build_m2q(params, loop=False), build_m1q(params)),
                                  (build_m2p(params, loop=False), build_m1p(params))):
                self.assertEqual(looped.state_names, plain.state_names)
                self.assertEqual(looped.partition, plain.partition)
                for symbol in Symbol:
                    self.assertEqual(dict(looped.columns[symbol]), dict(plain.columns[symbol]), symbol)

    def test_matching_block_accepted(self):
        for spec in (build_m1q(SMALL), build_m1p(SMALL), build_m2q(SMALL)):
            self.assertAlmostEqual(run(spec, '10#01##11#00#').p_accept, 1.0, delta=1e-9)

    def test_reversal_block_never_rejected_at_last_stage(self):
        # w1 = 11, w2 = 00 不匹配，但 (w1w2)^R = w3w4
        result = run(build_m1p(SMALL), '11#00##00#11#')
        self.assertAlmostEqual(result.p_accept + result.p_reject, 1.0, delta=1e-12)
        self.assertGreater(result.p_accept, 0.0)

    def test_state_groups(self):
        spec = build_m2q(SMALL)
        self.assertEqual(len(stage3_gathering_states(spec, SMALL)), 8)
        self.assertEqual(len(restart_states(spec, SMALL)), 4)

    def test_empty_prime_sets(self):
        with self.assertRaises(BuildError):
            M1Params(odd_primes(0), odd_primes(2))


_FOURIER_SOURCES = {
    Symbol.SHARP: re.compile(r"q\[\d+,0,\d+,\d+,2\]|q\[\d+,0,\d+,0,4\]|s\[\d+,0,\d+,\d+\]|t\[\d+,0,\d+\]"),
    Symbol.RIGHT_END: re.compile(r"q\[\d+,0,2\]|t\[\d+,0,\d+\]"),
}


def _fourier_source(name: str, symbol: Symbol) -> bool:
    pattern = _FOURIER_SOURCES.get(symbol)
    return bool(pattern and pattern.fullmatch(name))


class TestEmulationShape(unittest.TestCase):
    """经典仿真与量子机共享状态和列的定义域，只在傅里叶块处换成确定转移"""

    def assert_emulates(self, quantum, classical):
        self.assertEqual(quantum.state_names, classical.state_names)
        self.assertEqual(quantum.partition, classical.partition)
        fourier_columns = 0
        for symbol in Symbol:
            self.assertEqual(set(quantum.columns[symbol]), set(classical.columns[symbol]), symbol)
            for source, q_column in quantum.columns[symbol].items():
                p_column = classical.columns[symbol][source]
                q_targets = {t for t, _ in q_column}
                p_targets = {t for t, _ in p_column}
                if q_targets == p_targets:
                    # 相同支撑上的概率是振幅模的平方
                    q_entries = dict(q_column)
                    for target, probability in p_column:
                        self.assertAlmostEqual(probability, abs(q_entries[target]) ** 2, places=12)
                    continue
                name = quantum.state_names[source]
                self.assertTrue(_fourier_source(name, symbol), (name, symbol))
                self.assertEqual(len(p_column), 1)
                self.assertLessEqual(p_targets, q_targets)
                self.assertEqual(p_column[0][1], 1.0)
                fourier_columns += 1
        return fourier_columns

    def test_m0(self):
        primes = odd_primes(3)
        self.assertEqual(self.assert_emulates(build_m0q(primes), build_m0p(primes)), 3)

    def test_m1_and_m2(self):
        params = M1Params(odd_primes(2), odd_primes(3))
        self.assertGreater(self.assert_emulates(build_m1q(params), build_m1p(params)), 0)
        self.assertGreater(self.assert_emulates(build_m2q(params), build_m2p(params)), 0)
        self.assertGreater(self.assert_emulates(build_m1q(params, halt_stage3=False),
                                                build_m1p(params, halt_stage3=False)), 0)


class TestParameters(unittest.TestCase):

    def test_theorem1_params(self):
        params = theorem1_params(4, 1, 3)
        self.assertEqual((params.n1, params.n2), (8, 9))

    def test_theorem2_params(self):
        params = theorem2_params(4, 1, 3, 4)
        self.assertEqual((params.n1, params.n2), (2, 9))
        self.assertEqual(params.primes1.primes, (3, 5))

    def test_lemma7_params(self):
        self.assertEqual(lemma7_params(4, 3).n1, 4)
        self.assertEqual(lemma7_params(4, 3, 'classical').n1, 8)
        with self.assertRaises(BuildError):
            lemma7_params(4, 3, 'other')

    def test_build_machine(self):
        self.assertEqual(build_machine('m0q', odd_primes(2)).num_states, 25)
        self.assertEqual(build_machine('m2p', SMALL).kind, 'pfa')
        with self.assertRaises(BuildError):
            build_machine('m3q', SMALL)


if __name__ == '__main__':
    unittest.main()
