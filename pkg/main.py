"""
qfa-tools 主入口
"""
import sys


def check_dependencies() -> bool:
    """检查所需依赖是否已安装"""
    required_modules = {
        'numpy': '傅里叶块与素数筛',
        'tqdm': '进度条显示',
    }

    missing_modules = []
    for module, description in required_modules.items():
        try:
            __import__(module)
        except ImportError:
            missing_modules.append((module, description))

    if missing_modules:
        print("\n缺少必要的依赖模块:", file=sys.stderr)
        for module, description in missing_modules:
            print(f"  - {module}: {description}", file=sys.stderr)
        print("\n请使用以下命令安装所需依赖:", file=sys.stderr)
        print("pip install -r requirements.txt", file=sys.stderr)
        return False
    return True


if __name__ == '__main__':
    if not check_dependencies():
        sys.exit(1)

    from qfa_tools.cli import main
    sys.exit(main())
