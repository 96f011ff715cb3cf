from setuptools import setup, find_packages

setup(
    name="qfa_tools",
    version="0.1.0",
    packages=find_packages(exclude=("tests", "tests.*", "examples", "examples.*")),
    install_requires=[
        "numpy>=1.24",
        "tqdm>=4.65.0",
    ],
    extras_require={
        "test": ["hypothesis>=6.80"],
    },
    description="模除指纹量子/概率有限自动机：构造、精确模拟与误差界验证",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    keywords="quantum finite automata,probabilistic automata,fingerprinting",
    entry_points={
        "console_scripts": [
            "qfa-tools=qfa_tools.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
)
