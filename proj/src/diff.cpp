#include "devlore/diff.hpp"

#include <algorithm>

namespace devlore::diff {

std::vector<Edit> diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto n = static_cast<long>(a.size());
  const auto m = static_cast<long>(b.size());
  const long max = n + m;
  const long offset = max + 1;
  std::vector<long> v(static_cast<std::size_t>(2 * max + 3), 0);
  std::vector<std::vector<long>> trace;

  long found_d = -1;
  for (long d = 0; d <= max && found_d < 0; ++d) {
    trace.push_back(v);
    for (long k = -d; k <= d; k += 2) {
      long x;
      if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) {
        x = v[offset + k + 1];
      } else {
        x = v[offset + k - 1] + 1;
      }
      long y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x >= n && y >= m) {
        found_d = d;
        break;
      }
    }
  }

  // Walk the snapshots backwards; each step contributes a diagonal then one edit.
  std::vector<Edit> out;
  long x = n, y = m;
  for (long d = found_d; d > 0; --d) {
    const auto& pv = trace[static_cast<std::size_t>(d)];
    long k = x - y;
    long prev_k = (k == -d || (k != d && pv[offset + k - 1] < pv[offset + k + 1])) ? k + 1 : k - 1;
    long prev_x = pv[offset + prev_k];
    long prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      --x;
      --y;
      out.push_back({Op::Equal, static_cast<std::size_t>(x), static_cast<std::size_t>(y)});
    }
    if (x == prev_x) {
      --y;
      out.push_back({Op::Insert, 0, static_cast<std::size_t>(y)});
    } else {
      --x;
      out.push_back({Op::Delete, static_cast<std::size_t>(x), 0});
    }
    x = prev_x;
    y = prev_y;
  }
  while (x > 0 && y > 0) {
    --x;
    --y;
    out.push_back({Op::Equal, static_cast<std::size_t>(x), static_cast<std::size_t>(y)});
  }
  std::reverse(out.begin(), out.end());

  // Within each run of changes, list deletions before insertions.
  for (std::size_t i = 0; i < out.size();) {
    if (out[i].op == Op::Equal) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < out.size() && out[j].op != Op::Equal) ++j;
    std::stable_partition(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(j),
                          [](const Edit& e) { return e.op == Op::Delete; });
    i = j;
  }
  return out;
}

std::vector<std::string> split_keep_ends(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start + 1));
    start = nl + 1;
  }
  return lines;
}

namespace {

std::string range(std::size_t start, std::size_t count) {
  // Unified-diff convention: an empty range names the line before it.
  if (count == 0) return std::to_string(start) + ",0";
  if (count == 1) return std::to_string(start + 1);
  return std::to_string(start + 1) + "," + std::to_string(count);
}

void emit_line(std::string& out, char tag, const std::string& line) {
  out += tag;
  out += line;
  if (line.empty() || line.back() != '\n') out += "\n\\ No newline at end of file\n";
}

}  // namespace

std::string unified_diff(const std::string& path, std::string_view before, std::string_view after,
                         std::size_t context) {
  auto a = split_keep_ends(before);
  auto b = split_keep_ends(after);
  auto edits = diff_lines(a, b);
  if (std::all_of(edits.begin(), edits.end(), [](const Edit& e) { return e.op == Op::Equal; })) return {};

  std::string out = "--- a/" + path + "\n+++ b/" + path + "\n";
  std::size_t i = 0;
  while (i < edits.size()) {
    while (i < edits.size() && edits[i].op == Op::Equal) ++i;
    if (i == edits.size()) break;
    std::size_t start = i >= context ? i - context : 0;
    // Extend the hunk while the next change is within 2*context equal lines.
    std::size_t end = i;
    for (;;) {
      while (end < edits.size() && edits[end].op != Op::Equal) ++end;
      std::size_t gap = end;
      while (gap < edits.size() && edits[gap].op == Op::Equal) ++gap;
      if (gap < edits.size() && gap - end <= 2 * context) {
        end = gap;
        continue;
      }
      end = std::min(edits.size(), end + context);
      break;
    }

    std::size_t old_start = 0, new_start = 0, old_count = 0, new_count = 0;
    bool old_set = false, new_set = false;
    // Starting positions: the first edit in the hunk tells us where each side begins.
    for (std::size_t k = start; k < end; ++k) {
      const auto& e = edits[k];
      if (!old_set && e.op != Op::Insert) {
        old_start = e.old_index;
        old_set = true;
      }
      if (!new_set && e.op != Op::Delete) {
        new_start = e.new_index;
        new_set = true;
      }
      if (e.op != Op::Insert) ++old_count;
      if (e.op != Op::Delete) ++new_count;
    }
    // A side with no lines in the hunk starts after the lines consumed before it.
    if (!old_set || !new_set) {
      std::size_t consumed_old = 0, consumed_new = 0;
      for (std::size_t k = 0; k < start; ++k) {
        if (edits[k].op != Op::Insert) ++consumed_old;
        if (edits[k].op != Op::Delete) ++consumed_new;
      }
      if (!old_set) old_start = consumed_old;
      if (!new_set) new_start = consumed_new;
    }

    out += "@@ -" + range(old_start, old_count) + " +" + range(new_start, new_count) + " @@\n";
    for (std::size_t k = start; k < end; ++k) {
      const auto& e = edits[k];
      switch (e.op) {
        case Op::Equal: emit_line(out, ' ', a[e.old_index]); break;
        case Op::Delete: emit_line(out, '-', a[e.old_index]); break;
        case Op::Insert: emit_line(out, '+', b[e.new_index]); break;
      }
    }
    i = end;
  }
  return out;
}

}  // namespace devlore::diff
