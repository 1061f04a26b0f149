"""Setup script."""

import time

from setuptools import setup

with open('README.md', encoding='utf-8') as f:
    long_description = f.read()

setup(name='imitator',
      # Use a datestamp as the version.
      version=time.strftime('%Y%m%d'),
      packages=['imitator'],
      description='Geometric core of two-stage human motion imitation',
      author='The imitator developers',
      license='GPLv3',
      long_description=long_description,
      long_description_content_type='text/markdown',
      keywords=['human', 'motion', 'texture', 'rendering', 'avatar'],
      classifiers=[
          'Development Status :: 4 - Beta',
          'Environment :: Console',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
          'Programming Language :: Python :: 3 :: Only',
          'Topic :: Multimedia :: Graphics :: 3D Rendering',
          'Topic :: Scientific/Engineering',
      ],
      data_files=[('etc', ['imitator.cfg'])],
      scripts=['imitate'],
      install_requires=[
          'matplotlib',
          'numpy',
          'pandas',
          'pint',
          'Pillow',
          'scipy'])
