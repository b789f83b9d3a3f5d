class Interval:
    """Closed integer interval [start, end]."""

    def __init__(self, start, end):
        if end < start:
            raise ValueError("end before start")
        self.start = start
        self.end = end

    def contains(self, point):
        return self.start <= point <= self.end

    def overlaps(self, other):
        return self.start <= other.end and other.start <= self.end

    def __eq__(self, other):
        return (self.start, self.end) == (other.start, other.end)

    def __repr__(self):
        return "Interval(%d, %d)" % (self.start, self.end)


def merge_all(intervals):
    merged = []
    for current in sorted(intervals, key=lambda iv: iv.start):
        if merged and merged[-1].overlaps(current):
            last = merged[-1]
            merged[-1] = Interval(last.start, max(last.end, current.end))
        else:
            merged.append(current)
    return merged
