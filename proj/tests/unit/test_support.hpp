#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

// Scratch directory per test case, wiped on entry.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("FSAT_TEST_TMP");
  std::filesystem::path dir = std::filesystem::path(base ? base : std::filesystem::temp_directory_path().string()) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
