# This file makes 'ucs' a Python package.
