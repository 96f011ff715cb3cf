"""
测试实验控制器
"""
import os
import unittest

from qfa_tools.controllers import ExperimentConfig, ExperimentController
from qfa_tools.core.config_manager import ConfigManager, ConfigValidationError
from qfa_tools.core.error_handler import ErrorHandler, ExperimentError, QfaToolsError, SpecFormatError
from qfa_tools.processing.languages import read_corpus
from tests.test_utils import TempFolder, quiet_config


def _read(path: str) -> bytes:
    with open(path, 'rb') as f:
        return f.read()


class TestConfig(unittest.TestCase):

    def test_defaults_validate(self):
        manager = ConfigManager()
        manager.validate_config()
        self.assertEqual(manager.get('cutpoint'), 0.5)

    def test_update_rolls_back_on_error(self):
        manager = ConfigManager()
        with self.assertRaises(ConfigValidationError):
            manager.update({'cutpoint': 1.5})
        self.assertEqual(manager.get('cutpoint'), 0.5)
        manager.update({'cutpoint': None, 'seed': 7})
        self.assertEqual(manager.as_dict['seed'], 7)
        self.assertEqual(manager.as_dict['cutpoint'], 0.5)

    def test_bad_values(self):
        for bad in ({'max_workers': 0}, {'output_format': 'xml'}, {'log_mode': 'LOUD'},
                    {'amplitude_tolerance': 0.1}):
            with self.assertRaises(ConfigValidationError):
                ConfigManager().update(bad)


class TestErrorHandler(unittest.TestCase):

    def test_wraps_foreign_errors(self):
        handler = ErrorHandler()

        def explode():
            raise KeyError('x')

        with self.assertRaises(QfaToolsError):
            handler.safe_execute(explode, error_msg='boom')
        def refuse():
            raise ExperimentError('kept')

        with self.assertRaises(ExperimentError):
            handler.safe_execute(refuse)
        stats = handler.get_error_stats()
        self.assertIn('explode', stats)


class TestExperimentController(unittest.TestCase):
    """实验控制器"""

    def setUp(self):
        self.folder_ctx = TempFolder()
        self.folder = self.folder_ctx.__enter__()
        self.controller = ExperimentController(**quiet_config(self.folder))

    def tearDown(self):
        self.folder_ctx.__exit__(None, None, None)

    def _path(self, name: str) -> str:
        return os.path.join(self.folder, name)

    def test_build_run_verify(self):
        spec = self.controller.build('m0q', self._path('m0q.json'), primes=2)
        self.assertEqual(spec.num_states, 25)
        self.assertAlmostEqual(self.controller.run_word(self._path('m0q.json'), '01#10').p_accept, 1.0, delta=1e-9)
        self.assertTrue(self.controller.verify(self._path('m0q.json')).ok)

    def test_build_m1_from_theorem_parameters(self):
        spec = self.controller.build('m1p', self._path('m1p.json'), n=2, c=1, d=1)
        self.assertEqual(spec.kind, 'pfa')
        with self.assertRaises(ExperimentError):
            self.controller.build('m1q', self._path('x.json'), n1=2)
        with self.assertRaises(ExperimentError):
            self.controller.build('m0q', self._path('x.json'))

    def test_run_word_errors(self):
        self.controller.build('m0q', self._path('m0q.json'), primes=2)
        with self.assertRaises(QfaToolsError):
            self.controller.run_word(self._path('m0q.json'), '01#10#')
        with self.assertRaises(SpecFormatError):
            self.controller.run_word(self._path('absent.json'), '0#0')

    def test_generate_and_run_corpus(self):
        self.controller.build('m0q', self._path('m0q.json'), primes=4)
        corpus = self.controller.generate(self._path('l0.txt'), 3, 1, 'member', count=6, seed=5, language='l0')
        header, words = read_corpus(corpus)
        self.assertEqual(header['language'], 'l0')
        self.assertEqual(len(words), 6)

        path, rows = self.controller.run_corpus(self._path('m0q.json'), corpus, 'l0-result')
        self.assertTrue(path.endswith('l0-result.csv'))
        self.assertEqual([row.word for row in rows], words)
        self.assertTrue(all(row.member and row.decision == 'accept' for row in rows))

    def test_corpus_errors_are_rows(self):
        self.controller.build('m0q', self._path('m0q.json'), primes=2)
        corpus = self.controller.generate(self._path('l2.txt'), 2, 1, 'member', count=3, seed=5)
        with self.assertLogs(level='INFO') as logs:
            _, rows = self.controller.run_corpus(self._path('m0q.json'), corpus, 'l2-result', fmt='json')
        self.assertTrue(all(row.error for row in rows))
        self.assertIn('run', self.controller.error_handler.get_error_stats())
        self.assertTrue(any('错误统计' in line for line in logs.output))

    def test_lemma3_experiment(self):
        reports, paths = self.controller.run_experiment(ExperimentConfig('lemma3', n=2, primes=2, count=3))
        self.assertTrue(all(report.passed for report in reports))
        self.assertEqual(sorted(os.path.basename(p) for p in paths), ['lemma3.csv', 'lemma3.json'])
        names = {report.experiment for report in reports}
        self.assertEqual(names, {'lemma3', 'lemma3-max-nonmember', 'lemma3-adversarial'})

    def test_lemma4_experiment(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('lemma4', n=3, primes=3, count=3), 'csv')
        self.assertTrue(all(report.passed for report in reports))
        self.assertTrue(any(report.experiment == 'lemma4-square' for report in reports))

    def test_lemma7_and_lemma8_experiments(self):
        for name in ('lemma7', 'lemma8'):
            reports, _ = self.controller.run_experiment(ExperimentConfig(name, n=2, n1=2, n2=2), 'csv')
            failed = [r.as_row() for r in reports if not r.passed]
            self.assertEqual(failed, [])

    def test_lemma7_at_n4(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('lemma7', n=4, n1=4, d=3, count=20), 'csv')
        failed = [r.as_row() for r in reports if not r.passed]
        self.assertEqual(failed, [])
        paths = [r for r in reports if r.experiment.startswith('lemma7-')]
        self.assertEqual(len(paths), 100)
        self.assertTrue(all(r.params['N1'] == 4 and r.params['N2'] == 9 for r in paths))
        self.assertEqual({r.experiment for r in paths}, {'lemma7-match', 'lemma7-reversal', 'lemma7-none'})

    def test_exhaustive_l1_corpus_is_opt_in(self):
        sampled = self.controller._l1_corpus(ExperimentConfig('lemma7', n=4, count=4, seed=1))
        self.assertEqual(len(sampled), 20)
        full = self.controller._l1_corpus(ExperimentConfig('lemma7', n=3, exhaustive=True))
        self.assertEqual(len(full), 16 ** 3)
        self.assertEqual(len(set(full)), 16 ** 3)
        with self.assertRaises(ExperimentError):
            self.controller.run_experiment(ExperimentConfig('lemma8', n=5, exhaustive=True))

    def test_lemma7_includes_split_checks(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('lemma7', n=2, n1=2, n2=2), 'json')
        kinds = {report.experiment for report in reports}
        self.assertTrue({'lemma5', 'lemma6', 'lemma7-match', 'lemma7-reversal', 'lemma7-none'} <= kinds)

    def test_theorem2_experiment(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('theorem2'), 'csv')
        self.assertTrue(all(report.passed for report in reports))
        self.assertEqual(sum(1 for r in reports if r.experiment == 'theorem2'), 8)
        self.assertGreater(reports[-1].observed, 0.6)

    def test_theorem2_failure_row_below_threshold(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('theorem2', k=1), 'csv')
        failure = reports[-1]
        self.assertEqual(failure.experiment, 'theorem2-failure')
        self.assertEqual(failure.predicted_low, 0.6)
        self.assertAlmostEqual(failure.observed, 0.5, places=9)
        self.assertFalse(failure.passed)

    def test_theorem1_experiment_structure(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('theorem1', n=2, c=1, d=1, count=2), 'csv')
        states = [r for r in reports if r.experiment == 'states']
        self.assertEqual(len(states), 1)
        self.assertTrue(states[0].passed)
        matches = [r for r in reports if r.experiment == 'theorem1-block-match']
        self.assertTrue(matches and all(r.passed for r in matches))
        self.assertTrue(any(r.experiment == 'theorem1-member' for r in reports))

    def test_theorem1_recognition_at_n4(self):
        reports, _ = self.controller.run_experiment(
            ExperimentConfig('theorem1', n=4, c=1, d=3, count=200), 'csv')
        failed = [r.as_row() for r in reports if not r.passed]
        self.assertEqual(failed, [])
        recognition = {r.experiment: r for r in reports if r.experiment.startswith('theorem1-')
                       and not r.experiment.startswith('theorem1-block')}
        self.assertEqual(set(recognition), {'theorem1-member', 'theorem1-nonmember', 'theorem1-adversarial'})
        for report in recognition.values():
            self.assertEqual(report.observed, 0.0)
            self.assertIn('words=200', report.detail)
            self.assertEqual(report.params['k'], 4)

    def test_states_experiment(self):
        reports, _ = self.controller.run_experiment(ExperimentConfig('states', machine='m0'), 'csv')
        self.assertEqual(len(reports), 10)
        self.assertTrue(all(report.passed for report in reports))
        for machine in ('m1', 'm2'):
            reports, _ = self.controller.run_experiment(ExperimentConfig('states', machine=machine), 'csv')
            self.assertEqual(len(reports), 9)
            self.assertTrue(all(report.passed for report in reports))

    def test_determinism(self):
        config = ExperimentConfig('lemma3', n=2, primes=3, count=4, seed=11)
        _, first = self.controller.run_experiment(config)
        contents = [_read(p) for p in first]
        with TempFolder() as other:
            controller = ExperimentController(**quiet_config(other))
            _, second = controller.run_experiment(config)
            self.assertEqual(contents, [_read(p) for p in second])

    def test_invalid_experiments(self):
        for config in (ExperimentConfig('lemma3', n=9), ExperimentConfig('theorem2', a=100.0),
                       ExperimentConfig('lemma7', n=13), ExperimentConfig('nope'),
                       ExperimentConfig('states', machine='m5')):
            with self.assertRaises(ExperimentError):
                self.controller.run_experiment(config)


if __name__ == '__main__':
    unittest.main()
