#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>

#include "mono3d/errors.hpp"

namespace mono3d {

// Shortest round-trip decimal form; locale independent, so CSV output is
// byte-stable across runs.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  return out;
}

}  // namespace mono3d
