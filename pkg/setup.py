#!/usr/bin/env python

"""Setup file for the ``haloplan`` module. Configuration is in ``setup.cfg``."""

from setuptools import setup


setup()
