class StringUtils:
    """Null-tolerant string helpers."""

    @staticmethod
    def contains_ignore_case(text, search):
        if text is None or search is None:
            return False
        return search.lower() in text.lower()

    @staticmethod
    def replace_each(text, search_list, replacement_list):
        if not text or not search_list or not replacement_list:
            return text
        if len(search_list) != len(replacement_list):
            raise ValueError("search and replacement lists differ in length")
        result = text
        for search, replacement in zip(search_list, replacement_list):
            if search is None or replacement is None:
                continue
            if not search:
                continue
            result = result.replace(search, replacement)
        return result

    @staticmethod
    def abbreviate(text, max_width):
        if text is None:
            return None
        if max_width < 4:
            raise ValueError("minimum abbreviation width is 4")
        if len(text) <= max_width:
            return text
        return text[:max_width - 3] + "..."
