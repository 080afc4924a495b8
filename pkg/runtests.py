#!/usr/bin/env python
import sys
import unittest

if __name__ == "__main__":
    suite = unittest.defaultTestLoader.discover("tests", top_level_dir=".")
    result = unittest.TextTestRunner(verbosity=int(sys.argv[1]) if len(sys.argv) > 1 else 1).run(suite)
    sys.exit(not result.wasSuccessful())
