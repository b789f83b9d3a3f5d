#include "devlore/text.hpp"

#include "devlore/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>
#include <system_error>

namespace devlore {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::DuplicateBugId: return "DuplicateBugId";
    case ErrorCode::MissingWorkspace: return "MissingWorkspace";
    case ErrorCode::InvalidArtifactConfig: return "InvalidArtifactConfig";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::TracerFailed: return "TracerFailed";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::TestRunFailedToStart: return "TestRunFailedToStart";
    case ErrorCode::TokenBudgetExceeded: return "TokenBudgetExceeded";
    case ErrorCode::EndpointUnavailable: return "EndpointUnavailable";
    case ErrorCode::ContextOverflow: return "ContextOverflow";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::ReplayFixtureMissing: return "ReplayFixtureMissing";
    case ErrorCode::NoLocationsFound: return "NoLocationsFound";
    case ErrorCode::OrphanLineEntry: return "OrphanLineEntry";
    case ErrorCode::MalformedEditBlock: return "MalformedEditBlock";
    case ErrorCode::NoEditBlocks: return "NoEditBlocks";
    case ErrorCode::AmbiguousClassPath: return "AmbiguousClassPath";
    case ErrorCode::SearchNotFound: return "SearchNotFound";
    case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::FileOutsideWorkspace: return "FileOutsideWorkspace";
    case ErrorCode::RevertFailed: return "RevertFailed";
    case ErrorCode::TestHarnessFailure: return "TestHarnessFailure";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace devlore

namespace devlore::text {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

namespace {
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }
}  // namespace

std::string_view ltrim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return s;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) { return rtrim(ltrim(s)); }

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return s;
  std::size_t cut = max_bytes;
  // back off over continuation bytes so the cut lands on a sequence boundary
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return s.substr(0, cut);
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

}  // namespace devlore::text
