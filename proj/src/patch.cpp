#include "devlore/patch.hpp"

#include "devlore/diff.hpp"
#include "devlore/error.hpp"
#include "devlore/text.hpp"

#include <algorithm>
#include <optional>

namespace devlore {
namespace {

namespace fs = std::filesystem;

struct Line {
  std::string content;
  std::string ending;  // "\n", "\r\n" or "" for an unterminated last line
};

struct FileState {
  std::string original;
  std::vector<Line> lines;
  std::string dominant_ending = "\n";
  bool final_newline = true;
};

FileState load_state(const std::string& bytes) {
  FileState st;
  st.original = bytes;
  std::size_t crlf = 0, lf = 0;
  for (auto& raw : diff::split_keep_ends(bytes)) {
    Line l;
    if (text::ends_with(raw, "\r\n")) {
      l.content = raw.substr(0, raw.size() - 2);
      l.ending = "\r\n";
      ++crlf;
    } else if (text::ends_with(raw, "\n")) {
      l.content = raw.substr(0, raw.size() - 1);
      l.ending = "\n";
      ++lf;
    } else {
      l.content = raw;
    }
    st.lines.push_back(std::move(l));
  }
  if (crlf > lf) st.dominant_ending = "\r\n";
  st.final_newline = st.lines.empty() || !st.lines.back().ending.empty();
  return st;
}

std::string render(const FileState& st) {
  std::string out;
  for (const auto& l : st.lines) out += l.content + l.ending;
  return out;
}

std::string strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return std::string(s);
}

std::string rtrim_blanks(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return std::string(s);
}

std::string collapse_blanks(std::string_view s) {
  std::string out;
  bool in_run = false;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!in_run) out += ' ';
      in_run = true;
    } else {
      out += c;
      in_run = false;
    }
  }
  return rtrim_blanks(out);
}

using Normalizer = std::string (*)(std::string_view);
constexpr Normalizer kTiers[] = {strip_cr, rtrim_blanks, collapse_blanks};

std::vector<std::size_t> find_matches(const FileState& st, const std::vector<std::string>& search, Normalizer norm) {
  std::vector<std::string> needle;
  for (const auto& s : search) needle.push_back(norm(strip_cr(s)));
  std::vector<std::string> hay;
  for (const auto& l : st.lines) hay.push_back(norm(l.content));
  std::vector<std::size_t> hits;
  if (needle.size() > hay.size()) return hits;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) hits.push_back(i);
  }
  return hits;
}

std::string checked_relative(const fs::path& root, const std::string& file_path) {
  fs::path p(file_path);
  auto norm = p.lexically_normal();
  if (file_path.empty() || p.is_absolute() || norm.empty() || *norm.begin() == ".." || file_path.find('\0') != std::string::npos) {
    throw Error(ErrorCode::FileOutsideWorkspace, file_path);
  }
  std::error_code ec;
  auto real_root = fs::weakly_canonical(root, ec);
  auto real_file = fs::weakly_canonical(root / norm, ec);
  auto rel = real_file.lexically_relative(real_root);
  if (ec || rel.empty() || *rel.begin() == "..") throw Error(ErrorCode::FileOutsideWorkspace, file_path);
  return norm.generic_string();
}

std::map<std::string, std::string> hash_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    out[entry.path().lexically_relative(root).generic_string()] = text::sha256_hex(text::read_file(entry.path()));
  }
  return out;
}

}  // namespace

PatchResult apply_edit_script(const fs::path& workspace, const EditScript& script) {
  std::map<std::string, FileState> files;
  PatchResult result;
  for (std::size_t bi = 0; bi < script.blocks.size(); ++bi) {
    const auto& block = script.blocks[bi];
    auto rel = checked_relative(workspace, block.file_path);
    auto it = files.find(rel);
    if (it == files.end()) {
      auto full = workspace / rel;
      if (!fs::is_regular_file(full)) {
        throw Error(ErrorCode::SearchNotFound, "block " + std::to_string(bi + 1) + ": no such file " + rel);
      }
      it = files.emplace(rel, load_state(text::read_file(full))).first;
    }
    auto& st = it->second;

    std::optional<std::size_t> at;
    for (std::size_t tier = 0; tier < std::size(kTiers) && !at; ++tier) {
      auto hits = find_matches(st, block.search_lines, kTiers[tier]);
      if (hits.size() > 1) {
        throw Error(ErrorCode::AmbiguousMatch, "block " + std::to_string(bi + 1) + " matches " + rel + " at lines " +
                                                   std::to_string(hits[0] + 1) + " and " + std::to_string(hits[1] + 1));
      }
      if (hits.size() == 1) at = hits[0];
    }
    if (!at) throw Error(ErrorCode::SearchNotFound, "block " + std::to_string(bi + 1) + " not found in " + rel);

    std::vector<Line> replacement;
    for (const auto& r : block.replace_lines) replacement.push_back({strip_cr(r), st.dominant_ending});
    auto first = st.lines.begin() + static_cast<std::ptrdiff_t>(*at);
    first = st.lines.erase(first, first + static_cast<std::ptrdiff_t>(block.search_lines.size()));
    st.lines.insert(first, replacement.begin(), replacement.end());
    // Every line but the last is terminated; the last keeps the file's original convention.
    for (std::size_t i = 0; i + 1 < st.lines.size(); ++i) {
      if (st.lines[i].ending.empty()) st.lines[i].ending = st.dominant_ending;
    }
    if (!st.lines.empty()) {
      auto& last = st.lines.back().ending;
      if (!st.final_newline) {
        last.clear();
      } else if (last.empty()) {
        last = st.dominant_ending;
      }
    }
    ++result.applied_blocks;
  }

  // All blocks matched; only now touch the disk.
  for (const auto& [rel, st] : files) {
    auto after = render(st);
    if (after == st.original) continue;
    text::write_file(workspace / rel, after);
    result.modified_files.push_back(rel);
    result.unified_diff += diff::unified_diff(rel, st.original, after);
  }
  return result;
}

WorkspaceCopy::WorkspaceCopy(const fs::path& source) : dir_("devlore-ws"), source_(source), root_(dir_.path() / "ws") {
  std::error_code ec;
  fs::copy(source, root_, fs::copy_options::recursive | fs::copy_options::copy_symlinks, ec);
  if (ec) throw Error(ErrorCode::Io, "copying workspace " + source.string() + ": " + ec.message());
  pristine_ = hash_tree(root_);
}

PatchResult WorkspaceCopy::apply(const EditScript& script) {
  auto result = apply_edit_script(root_, script);
  for (const auto& rel : result.modified_files) {
    patched_[rel] = text::sha256_hex(text::read_file(root_ / rel));
  }
  return result;
}

void WorkspaceCopy::revert() {
  auto current = hash_tree(root_);
  for (const auto& [rel, hash] : pristine_) {
    auto it = current.find(rel);
    if (it == current.end()) throw Error(ErrorCode::RevertFailed, "tracked file removed: " + rel);
    if (it->second == hash) continue;
    auto p = patched_.find(rel);
    if (p == patched_.end() || p->second != it->second) {
      throw Error(ErrorCode::RevertFailed, "file modified outside the patch engine: " + rel);
    }
  }
  for (const auto& [rel, hash] : current) {
    if (!pristine_.count(rel)) {
      fs::remove(root_ / rel);
    } else if (hash != pristine_.at(rel)) {
      fs::copy_file(source_ / rel, root_ / rel, fs::copy_options::overwrite_existing);
    }
  }
  // Directories created by test runs.
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (entry.is_directory() && !entry.is_symlink()) dirs.push_back(entry.path());
  }
  std::sort(dirs.rbegin(), dirs.rend());
  for (const auto& d : dirs) {
    if (!fs::exists(source_ / d.lexically_relative(root_)) && fs::is_empty(d)) fs::remove(d);
  }
  if (hash_tree(root_) != pristine_) throw Error(ErrorCode::RevertFailed, "tree differs from pristine after restore");
  patched_.clear();
}

}  // namespace devlore
