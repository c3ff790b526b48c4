#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "relik/errors.hpp"
#include "relik/report.hpp"

namespace relik::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Error with a file location ("path", "path:line" or "path:line:col").
class LocatedError : public Error {
 public:
  LocatedError(std::string kind, std::string location, const std::string& message)
      : Error(std::move(kind), message), location_(std::move(location)) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

struct InputFile {
  std::string path;
  std::string digest;
};

/// Reads files and remembers their digests in read order.
class InputLog {
 public:
  /// Throws LocatedError("io", path, ...) when the file cannot be read.
  std::string read(const std::string& path);
  const std::vector<InputFile>& files() const noexcept { return files_; }

 private:
  std::vector<InputFile> files_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// {"tool", "version", "command", "argv", "params", "seed", "inputs"}.
Json make_manifest(const std::string& command, const std::vector<std::string>& argv,
                   const Json& params, std::uint64_t seed, const std::vector<InputFile>& inputs);

}  // namespace relik::cli
