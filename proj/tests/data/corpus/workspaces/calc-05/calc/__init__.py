"""Small numeric and text helpers used as a repair target."""
