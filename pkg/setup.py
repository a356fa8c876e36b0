#!/usr/bin/env python3
"""
Setup script for the Birth-and-Death Cut-off Analyzer
"""

from setuptools import setup, find_packages
from pathlib import Path

# Read README for long description
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding='utf-8')

# Read requirements
def read_requirements(filename):
    """Read requirements from file, excluding comments and blank lines"""
    requirements = []
    try:
        with open(this_directory / filename, 'r', encoding='utf-8') as f:
            for line in f.readlines():
                line = line.split('#')[0].strip()
                if line:
                    requirements.append(line)
    except FileNotFoundError:
        pass
    return requirements

setup(
    name="bd-cutoff-analyzer",
    version="1.0.0",
    description="Exact separation cut-off analysis for finite birth-and-death chains",
    long_description=long_description,
    long_description_content_type="text/markdown",

    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["processor", "system_check"],
    include_package_data=True,
    package_data={"": ["config/settings.yaml"]},

    python_requires=">=3.9",
    install_requires=read_requirements("requirements.txt"),
    extras_require={
        "dev": read_requirements("requirements-dev.txt"),
    },

    entry_points={
        "console_scripts": [
            "bd-cutoff=processor:main",
            "bd-cutoff-check=system_check:main",
        ],
    },

    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],

    keywords="markov chain birth death cutoff separation mixing time spectrum",
)
