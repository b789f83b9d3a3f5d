class NumberUtils:
    """Parses numeric literals into (kind, value) pairs."""

    @staticmethod
    def create_number(s):
        if s is None:
            return None
        s = s.strip()
        if not s:
            raise ValueError("blank string is not a number")
        prefix_len = 0
        for prefix in ("0x", "0X", "#"):
            if s.startswith(prefix):
                prefix_len = len(prefix)
                break
        if prefix_len > 0:
            hexDigits = len(s) - prefix_len
            if hexDigits > 16:
                return ("big", int(s[prefix_len:], 16))
            if hexDigits > 8 or (hexDigits == 8 and s[prefix_len] > "7"):
                return ("long", int(s[prefix_len:], 16))
            return ("int", int(s[prefix_len:], 16))
        if "." in s or "e" in s or "E" in s:
            return ("float", float(s))
        value = int(s)
        if -2**31 <= value < 2**31:
            return ("int", value)
        return ("long", value)

    @staticmethod
    def is_digits(s):
        if not s:
            return False
        for ch in s:
            if ch < "0" or ch > "9":
                return False
        return True
