import unittest

from calc.roman import from_roman, to_roman


class RomanTest(unittest.TestCase):
    def test_to_roman_basic(self):
        self.assertEqual(to_roman(3), "III")
        self.assertEqual(to_roman(1994), "MCMXCIV")

    def test_to_roman_four(self):
        self.assertEqual(to_roman(4), "IV")
        self.assertEqual(to_roman(14), "XIV")

    def test_from_roman(self):
        self.assertEqual(from_roman("MCMXCIV"), 1994)
        self.assertEqual(from_roman("xiv"), 14)

    def test_from_roman_nine(self):
        self.assertEqual(from_roman("IX"), 9)
        self.assertEqual(from_roman("XCIX"), 99)

    def test_round_trip(self):
        for n in range(1, 200):
            self.assertEqual(from_roman(to_roman(n)), n)
