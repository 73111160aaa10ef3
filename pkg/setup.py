import os
from setuptools import setup, find_packages


def read(filename):
    """Read a file and return its contents.
    """
    with open(os.path.join(os.path.dirname(__file__), filename)) as infile:
        content = infile.read()

    return content


def requirements(filename):
    """Requirement specifiers of a requirements file, comments skipped."""
    return [line.strip() for line in read(filename).splitlines()
            if line.strip() and not line.strip().startswith('#')]


setup(
    name="tops",
    version="0.1.0",
    author="The tops developers",
    description=("Trees of predictors: an ensemble method that grows a tree "
                 "of locally trained predictors and aggregates them along "
                 "root-to-leaf paths."),
    license="GPLv3",
    keywords="ensemble learning model trees boosting",
    packages=find_packages(exclude=['test', 'test.*']),
    package_data={'tops': ['data/*.csv', 'data/*.yaml']},
    long_description=read('README.md'),
    long_description_content_type='text/markdown',
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Developers",
        "Intended Audience :: Healthcare Industry",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    python_requires='>=3.6',
    install_requires=requirements('requirements.txt'),
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['tops=tops.scripts.cli:main']},
)
