import unittest

from calc.number_utils import NumberUtils


class NumberUtilsTest(unittest.TestCase):
    def test_decimal(self):
        self.assertEqual(NumberUtils.create_number("42"), ("int", 42))
        self.assertEqual(NumberUtils.create_number("2147483648"), ("long", 2147483648))

    def test_hex_int(self):
        self.assertEqual(NumberUtils.create_number("0x7FFFFFFF"), ("int", 0x7FFFFFFF))
        self.assertEqual(NumberUtils.create_number("#FF"), ("int", 255))

    def test_hex_long(self):
        self.assertEqual(NumberUtils.create_number("0x80000000"), ("long", 0x80000000))
        self.assertEqual(NumberUtils.create_number("0x100000000"), ("long", 0x100000000))

    def test_hex_big(self):
        self.assertEqual(NumberUtils.create_number("0x10000000000000000")[0], "big")

    def test_float(self):
        self.assertEqual(NumberUtils.create_number("1.5"), ("float", 1.5))

    def test_is_digits(self):
        self.assertTrue(NumberUtils.is_digits("0123"))
        self.assertFalse(NumberUtils.is_digits("12a"))
        self.assertFalse(NumberUtils.is_digits(""))
