import unittest

from calc.string_utils import StringUtils


class StringUtilsTest(unittest.TestCase):
    def test_contains_ignore_case(self):
        self.assertTrue(StringUtils.contains_ignore_case("Hello World", "WORLD"))
        self.assertFalse(StringUtils.contains_ignore_case(None, "a"))

    def test_contains_ignore_case_sharp_s(self):
        self.assertFalse(StringUtils.contains_ignore_case("ß", "SS"))

    def test_replace_each(self):
        self.assertEqual(StringUtils.replace_each("aba", ["a"], ["z"]), "zbz")

    def test_replace_each_with_none_entries(self):
        self.assertEqual(StringUtils.replace_each("abc", ["a", None], ["x", "y"]), "xbc")
        self.assertEqual(StringUtils.replace_each("abc", ["a", "b"], [None, "y"]), "ayc")

    def test_abbreviate(self):
        self.assertEqual(StringUtils.abbreviate("abcdefg", 6), "abc...")
        self.assertEqual(StringUtils.abbreviate("abcdefg", 7), "abcdefg")
        self.assertEqual(StringUtils.abbreviate("abcdefgh", 4), "a...")
