"""
命令行入口
子命令: build、run、corpus、verify、experiment、gen
"""
import os
import sys
import argparse
import traceback
from typing import Any, Dict, List, Optional

from .controllers.experiment_controller import EXPERIMENTS, MACHINE_IDS, ExperimentConfig, ExperimentController
from .core.config_manager import ConfigValidationError
from .core.error_handler import QfaToolsError
from .processing.languages import KINDS, LANGUAGES

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ASSERTION = 2


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', default='config.json', help='配置文件路径')
    parser.add_argument('--output-folder', default=None, help='输出文件夹路径')
    parser.add_argument('--cutpoint', type=float, default=None, help='接受判定的分界点 (默认 0.5)')
    parser.add_argument('--workers', type=int, default=None, help='线程池工作线程数')
    parser.add_argument('--no-progress', action='store_true', help='不显示进度条')
    parser.add_argument('--log-mode', choices=['VERBOSE', 'NORMAL', 'QUIET'], default=None,
                        help='日志模式：VERBOSE(详细)、NORMAL(正常)、QUIET(静默)')
    parser.add_argument('--debug', action='store_true', help='启用调试模式')
    return parser


def _add_size_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--primes', type=int, default=None, help='M0 的素数个数 N')
    parser.add_argument('--n1', type=int, default=None, help='第一组素数个数 N1')
    parser.add_argument('--n2', type=int, default=None, help='第二组素数个数 N2')
    parser.add_argument('--n', type=int, default=None, help='位长 n')
    parser.add_argument('--c', type=float, default=None, help='块数指数 c (k = n^c)')
    parser.add_argument('--d', type=int, default=None, help='N2 = d·N0\' 中的常数 d')


def build_parser() -> argparse.ArgumentParser:
    """构造参数解析器"""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog='qfa-tools',
        description='模除指纹量子/概率有限自动机的构造、模拟与误差界验证',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest='command', required=True)

    build = sub.add_parser('build', parents=[common], help='构造自动机并写出描述文件')
    build.add_argument('machine', choices=MACHINE_IDS)
    _add_size_flags(build)
    build.add_argument('--out', default=None, help='描述文件路径 (默认 <output-folder>/<machine>.json)')

    run = sub.add_parser('run', parents=[common], help='运行一个输入串')
    run.add_argument('spec', help='描述文件')
    run.add_argument('word', help='0/1/# 组成的输入串，不含端标记')

    corpus = sub.add_parser('corpus', parents=[common], help='运行语料文件并写出结果表')
    corpus.add_argument('spec', help='描述文件')
    corpus.add_argument('corpus', help='语料文件')
    corpus.add_argument('--language', choices=['l0', 'l1', 'l2'], default=None, help='用于 oracle_member 列的语言')
    corpus.add_argument('--n', type=int, default=None, help='位长 n (默认取语料头部)')
    corpus.add_argument('--k', type=int, default=1, help='L2 的块数')
    corpus.add_argument('--out', default='corpus', help='结果文件名 (不含扩展名)')
    corpus.add_argument('--format', choices=['csv', 'json'], default=None)

    verify = sub.add_parser('verify', parents=[common], help='检查描述文件的良构性')
    verify.add_argument('spec', help='描述文件')

    experiment = sub.add_parser('experiment', parents=[common], help='运行数值实验')
    experiment.add_argument('name', choices=EXPERIMENTS)
    _add_size_flags(experiment)
    experiment.add_argument('--a', type=float, default=None, help='N1 = N0·n^c / a 中的 a')
    experiment.add_argument('--k', type=int, default=None, help='块数')
    experiment.add_argument('--machine', choices=['m0', 'm1', 'm2'], default=None, help='states 实验的公式')
    experiment.add_argument('--max-primes', type=int, default=None, help='states 实验的素数个数上限')
    experiment.add_argument('--seed', type=int, default=None, help='随机种子')
    experiment.add_argument('--count', type=int, default=None, help='每类实例个数')
    experiment.add_argument('--exhaustive', action='store_true', help='lemma7/lemma8 使用全部 16^n 个单块串 (n <= 4)')
    experiment.add_argument('--format', choices=['csv', 'json'], default=None, help='只导出一种格式')

    gen = sub.add_parser('gen', parents=[common], help='生成语料文件')
    gen.add_argument('--n', type=int, required=True, help='位长 n')
    gen.add_argument('--k', type=int, default=1, help='块数')
    gen.add_argument('--kind', choices=KINDS, default='member')
    gen.add_argument('--language', choices=LANGUAGES, default='l2')
    gen.add_argument('--count', type=int, default=None, help='实例个数')
    gen.add_argument('--seed', type=int, default=None, help='随机种子')
    gen.add_argument('--out', required=True, help='语料文件路径')

    return parser


def _config_updates(args: argparse.Namespace) -> Dict[str, Any]:
    updates = {
        'output_folder': args.output_folder,
        'cutpoint': args.cutpoint,
        'max_workers': args.workers,
        'log_mode': args.log_mode,
    }
    if args.no_progress:
        updates['show_progress'] = False
    if args.debug:
        updates['log_level'] = 'DEBUG'
    return updates


def _size_params(args: argparse.Namespace) -> Dict[str, Any]:
    params = {'primes': args.primes, 'n1': args.n1, 'n2': args.n2, 'n': args.n}
    if args.c is not None:
        params['c'] = args.c
    if args.d is not None:
        params['d'] = args.d
    return params


def cmd_build(controller: ExperimentController, args: argparse.Namespace) -> int:
    out = args.out or os.path.join(controller.config['output_folder'], f"{args.machine}.json")
    spec = controller.build(args.machine, out, **_size_params(args))
    part = spec.partition
    print(f"machine: {args.machine}")
    print(f"states: {spec.num_states}")
    print(f"accepting: {len(part.accepting)}  rejecting: {len(part.rejecting)}  nonhalting: {len(part.nonhalting)}")
    for symbol, count in spec.column_counts().items():
        print(f"columns[{symbol}]: {count}")
    print(f"written: {out}")
    return EXIT_OK


def cmd_run(controller: ExperimentController, args: argparse.Namespace) -> int:
    result = controller.run_word(args.spec, args.word)
    for key, value in result.as_row(12).items():
        print(f"{key}: {value}")
    return EXIT_OK


def cmd_corpus(controller: ExperimentController, args: argparse.Namespace) -> int:
    path, rows = controller.run_corpus(args.spec, args.corpus, args.out, args.language, args.n, args.k, args.format)
    failed = sum(1 for row in rows if row.error)
    print(f"words: {len(rows)}  errors: {failed}")
    print(f"written: {path}")
    return EXIT_OK


def cmd_verify(controller: ExperimentController, args: argparse.Namespace) -> int:
    report = controller.verify(args.spec)
    print(f"kind: {report.kind}  states: {report.num_states}  violations: {len(report.violations)}")
    for violation in report.violations[:20]:
        print(f"  [{violation.kind}] {violation.symbol} {violation.states}: {violation.message} ({violation.deviation:.3e})")
    return EXIT_OK if report.ok else EXIT_ASSERTION


def cmd_experiment(controller: ExperimentController, args: argparse.Namespace) -> int:
    fields = {
        'n': args.n, 'c': args.c, 'd': args.d, 'a': args.a, 'k': args.k, 'primes': args.primes,
        'n1': args.n1, 'n2': args.n2, 'machine': args.machine, 'max_primes': args.max_primes,
        'seed': args.seed, 'count': args.count, 'exhaustive': True if args.exhaustive else None,
    }
    experiment = ExperimentConfig(args.name, **{key: value for key, value in fields.items() if value is not None})
    reports, paths = controller.run_experiment(experiment, args.format)
    failed = [report for report in reports if not report.passed]
    print(f"experiment: {args.name}  rows: {len(reports)}  failed: {len(failed)}")
    for report in failed[:20]:
        row = report.as_row()
        print(f"  FAIL {row['experiment']} {row['params']} observed={row['observed']} "
              f"predicted=[{row['predicted_low']}, {row['predicted_high']}]")
    for path in paths:
        print(f"written: {path}")
    return EXIT_OK if not failed else EXIT_ASSERTION


def cmd_gen(controller: ExperimentController, args: argparse.Namespace) -> int:
    path = controller.generate(args.out, args.n, args.k, args.kind, args.count, args.seed, args.language)
    print(f"written: {path}")
    return EXIT_OK


COMMANDS = {
    'build': cmd_build,
    'run': cmd_run,
    'corpus': cmd_corpus,
    'verify': cmd_verify,
    'experiment': cmd_experiment,
    'gen': cmd_gen,
}


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回进程退出码"""
    args = build_parser().parse_args(argv)

    try:
        config_file = args.config if args.config and os.path.exists(args.config) else None
        controller = ExperimentController(config_file, **_config_updates(args))
        return COMMANDS[args.command](controller, args)
    except ConfigValidationError as e:
        print(f"\n配置错误: {str(e)}", file=sys.stderr)
        return EXIT_INVALID
    except QfaToolsError as e:
        print(f"\n处理错误: {str(e)}", file=sys.stderr)
        return EXIT_INVALID
    except KeyboardInterrupt:
        print("\n程序已被用户中断", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        print(f"\n程序异常: {str(e)}", file=sys.stderr)
        if args.debug:
            traceback.print_exc()
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
