"""Minimal deterministic test runner: python3 run_tests.py [test ids...]

Failure reports use workspace-relative paths so output is stable across checkouts.
Exit status is 0 iff every selected test passes.
"""
import os
import sys
import traceback
import unittest

sys.dont_write_bytecode = True
ROOT = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, ROOT)


def format_failure(err):
    exc_type, exc_value, tb = err
    lines = ["Traceback (most recent call last):"]
    for frame in traceback.extract_tb(tb):
        path = os.path.abspath(frame.filename)
        if not path.startswith(ROOT + os.sep):
            continue
        rel = os.path.relpath(path, ROOT)
        lines.append('  File "%s", line %d, in %s' % (rel, frame.lineno, frame.name))
        if frame.line:
            lines.append("    " + frame.line.strip())
    name = exc_type.__module__ + "." + exc_type.__name__ if exc_type.__module__ != "builtins" else exc_type.__name__
    lines.append("%s: %s" % (name, exc_value))
    return "\n".join(lines)


class Result(unittest.TestResult):
    def __init__(self):
        super().__init__()
        self.reports = []
        self.passed = 0

    def addSuccess(self, test):
        self.passed += 1

    def addFailure(self, test, err):
        self.reports.append(("FAIL", test.id(), format_failure(err)))

    def addError(self, test, err):
        self.reports.append(("ERROR", test.id(), format_failure(err)))


def main(argv):
    loader = unittest.TestLoader()
    if argv:
        suite = unittest.TestSuite(loader.loadTestsFromName(name) for name in argv)
    else:
        suite = loader.discover(os.path.join(ROOT, "tests"), top_level_dir=ROOT)
    result = Result()
    suite.run(result)
    for kind, test_id, report in result.reports:
        print("=" * 70)
        print("%s: %s" % (kind, test_id))
        print("-" * 70)
        print(report)
    print("%d passed, %d failed" % (result.passed, len(result.reports)))
    return 0 if not result.reports else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
