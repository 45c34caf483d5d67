from setuptools import setup, find_packages
import re

# Read version from scla/__init__.py
with open('scla/__init__.py') as f:
    version = re.search(r'^__version__ = ["\']([^"\']+)["\']', f.read(), re.MULTILINE).group(1)

setup(
    name='scla',
    version=version,
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    package_data={
        'scla': ['schemas/*.json'],
        'scla.sdk.crc': ['catalog.yaml'],
    },
    install_requires=[
        'python-dotenv',
        'click>=8.0',
        'PyYAML',
        'click_option_group',
        'rich',
        'numpy',
        'scipy',
        'simpy',
        'jsonschema',
    ],
    extras_require={
        'dev': [
            'pytest',
        ],
    },
    entry_points={
        'console_scripts': [
            'scla=scla.cli.__main__:main',
        ],
    },
    author='CLI Developer',
    description='Safety Communication Layer Analyzer - residual error rates, CRC properness and black-channel simulation.',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
)
