#pragma once

#include "devlore/error.hpp"

#include <stdlib.h>

#include <filesystem>
#include <string>
#include <system_error>

namespace devlore {

/// mkdtemp-backed directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "devlore") {
    auto pattern = (std::filesystem::temp_directory_path() / (prefix + "-XXXXXX")).string();
    if (::mkdtemp(pattern.data()) == nullptr) throw Error(ErrorCode::Io, "mkdtemp failed for " + pattern);
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    if (!path_.empty()) std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  TempDir(TempDir&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }
  TempDir& operator=(TempDir&&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace devlore
