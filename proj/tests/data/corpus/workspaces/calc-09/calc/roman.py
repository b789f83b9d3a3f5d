_TABLE = [
    (1000, "M"), (900, "CM"), (500, "D"), (400, "CD"),
    (100, "C"), (90, "XC"), (50, "L"), (40, "XL"),
    (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I"),
]

_VALUES = {"I": 1, "V": 5, "X": 10, "L": 50, "C": 100, "D": 500, "M": 1000}


def to_roman(number):
    if number <= 0 or number >= 4000:
        raise ValueError("out of range")
    parts = []
    for value, symbol in _TABLE:
        if number >= value:
            parts.append(symbol)
            number -= value
    return "".join(parts)


def from_roman(text):
    total = 0
    previous = 0
    for ch in reversed(text.upper()):
        value = _VALUES[ch]
        if value < previous:
            total -= value
        else:
            total += value
            previous = value
    return total
