#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace relik::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LocatedError("io", path, "cannot open file for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw LocatedError("io", path, "read failed");
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LocatedError("io", path, "cannot open file for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw LocatedError("io", path, "write failed");
}

std::string InputLog::read(const std::string& path) {
  std::string text = read_file(path);
  files_.push_back({path, hex64(fnv1a64(text))});
  return text;
}

Json make_manifest(const std::string& command, const std::vector<std::string>& argv,
                   const Json& params, std::uint64_t seed, const std::vector<InputFile>& inputs) {
  Json m = Json::object();
  m["tool"] = "relik";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["argv"] = argv;
  m["params"] = params;
  m["seed"] = seed;
  Json files = Json::array();
  for (const auto& f : inputs) files.push_back({{"path", f.path}, {"fnv1a64", f.digest}});
  m["inputs"] = std::move(files);
  return m;
}

}  // namespace relik::cli
