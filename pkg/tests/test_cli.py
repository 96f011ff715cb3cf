"""
测试命令行入口的退出码与输出
"""
import io
import os
import json
import unittest
from contextlib import redirect_stderr, redirect_stdout

from qfa_tools.cli import EXIT_ASSERTION, EXIT_INVALID, EXIT_OK, main
from tests.test_utils import TempFolder

COMMON = ['--no-progress', '--log-mode', 'QUIET', '--config', 'absent-config.json']


class TestCli(unittest.TestCase):

    def setUp(self):
        self.folder_ctx = TempFolder()
        self.folder = self.folder_ctx.__enter__()

    def tearDown(self):
        self.folder_ctx.__exit__(None, None, None)

    def _main(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(argv) + COMMON + ['--output-folder', self.folder])
        return code, out.getvalue(), err.getvalue()

    def _path(self, name: str) -> str:
        return os.path.join(self.folder, name)

    def test_build_prints_summary(self):
        code, out, _ = self._main('build', 'm0q', '--primes', '2', '--out', self._path('m0q.json'))
        self.assertEqual(code, EXIT_OK)
        self.assertIn('states: 25', out)
        self.assertIn('columns[SHARP]: 8', out)
        self.assertTrue(os.path.exists(self._path('m0q.json')))

    def test_build_default_path(self):
        code, _, _ = self._main('build', 'm1p', '--n1', '1', '--n2', '1')
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(os.path.exists(self._path('m1p.json')))

    def test_run_prints_twelve_decimals(self):
        self._main('build', 'm0q', '--primes', '8', '--out', self._path('m0q.json'))
        code, out, _ = self._main('run', self._path('m0q.json'), '0000#1111')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('p_accept: 0.062500000000', out)
        self.assertIn('p_residual: 0.000000000000', out)

    def test_verify(self):
        spec_path = self._path('m0p.json')
        self._main('build', 'm0p', '--primes', '3', '--out', spec_path)
        code, out, _ = self._main('verify', spec_path)
        self.assertEqual(code, EXIT_OK)
        self.assertIn('violations: 0', out)

        with open(spec_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        data['columns']['LEFT_END'][0]['re'] = 0.9
        with open(spec_path, 'w', encoding='utf-8') as f:
            json.dump(data, f)
        code, out, _ = self._main('verify', spec_path)
        self.assertEqual(code, EXIT_ASSERTION)
        self.assertIn('[norm]', out)

    def test_gen_and_corpus(self):
        spec_path, corpus_path = self._path('m0q.json'), self._path('words.txt')
        self._main('build', 'm0q', '--primes', '4', '--out', spec_path)
        code, _, _ = self._main('gen', '--n', '3', '--kind', 'nonmember', '--language', 'l0',
                                '--count', '5', '--seed', '3', '--out', corpus_path)
        self.assertEqual(code, EXIT_OK)
        code, out, _ = self._main('corpus', spec_path, corpus_path, '--out', 'result', '--format', 'json')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('words: 5  errors: 0', out)
        with open(self._path('result.json'), 'r', encoding='utf-8') as f:
            rows = json.load(f)
        self.assertEqual(len(rows), 5)
        self.assertTrue(all(row['oracle_member'] == 'false' for row in rows))

    def test_experiment_exit_codes(self):
        code, out, _ = self._main('experiment', 'lemma3', '--n', '2', '--primes', '2', '--count', '2')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('failed: 0', out)
        self.assertTrue(os.path.exists(self._path('lemma3.csv')))
        self.assertTrue(os.path.exists(self._path('lemma3.json')))

        code, out, _ = self._main('experiment', 'theorem2', '--k', '1', '--format', 'csv')
        self.assertEqual(code, EXIT_ASSERTION)
        self.assertIn('FAIL theorem2-failure', out)

    def test_exhaustive_flag(self):
        code, out, _ = self._main('experiment', 'lemma8', '--n', '2', '--n1', '2', '--n2', '2', '--exhaustive',
                                  '--format', 'csv')
        self.assertEqual(code, EXIT_OK)
        self.assertIn('rows: 256  failed: 0', out)
        code, _, err = self._main('experiment', 'lemma8', '--n', '5', '--exhaustive')
        self.assertEqual(code, EXIT_INVALID)
        self.assertIn('n <= 4', err)

    def test_invalid_input(self):
        code, _, err = self._main('experiment', 'lemma3', '--n', '0')
        self.assertEqual(code, EXIT_INVALID)
        self.assertIn('n', err)
        code, _, _ = self._main('build', 'm0q', '--primes', '2', '--cutpoint', '1.5')
        self.assertEqual(code, EXIT_INVALID)
        self._main('build', 'm0q', '--primes', '2', '--out', self._path('m0q.json'))
        code, _, _ = self._main('run', self._path('m0q.json'), '01x')
        self.assertEqual(code, EXIT_INVALID)

    def test_identical_invocations_are_byte_identical(self):
        args = ('experiment', 'lemma4', '--n', '2', '--primes', '3', '--count', '3', '--seed', '9', '--format', 'csv')
        self._main(*args)
        with open(self._path('lemma4.csv'), 'rb') as f:
            first = f.read()
        self._main(*args)
        with open(self._path('lemma4.csv'), 'rb') as f:
            self.assertEqual(f.read(), first)


if __name__ == '__main__':
    unittest.main()
