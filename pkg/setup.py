import os
from setuptools import setup, find_packages

this_directory = os.path.abspath(os.path.dirname(__file__))
try:
    with open(os.path.join(this_directory, "README.md"), encoding="utf-8") as f:
        long_description = f.read()
except FileNotFoundError:
    long_description = ""

setup(
    name="simple-dpogd",
    version="0.1.0",
    description="Simulator for distributed proximal online gradient descent over time-varying networks, with centralized and ADMM baselines",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    python_requires=">=3.10",
    install_requires=[
        "pydantic>=2.10.5,<3.0.0",
        "logzero>=1.7.0,<2.0.0",
        "jinja2>=3.1.5,<4.0.0",
        "typer>=0.15.1",
        "PyYAML>=6.0.2",
        "numpy>=1.26",
        "scipy>=1.11",
        "networkx>=3.2",
        "matplotlib>=3.8",
        "pandas>=2.1",
    ],
    extras_require={
        "dev": [
            "ruff==0.2.0",
            "mypy>=1.14.1,<2.0.0",
            "pytest>=8.3.4,<9.0.0",
            "pytest-mock>=3.14.0,<4.0.0",
            "hypothesis>=6.100",
        ]
    },
    entry_points={"console_scripts": ["dpogd=dpogd.harness.cli:app"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: OS Independent",
    ],
)
