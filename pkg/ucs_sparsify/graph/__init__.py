# This file makes 'graph' a Python package.
