#pragma once

#include <doctest.h>

#include <filesystem>
#include <string>

#include "geoquad/error.hpp"

/// Kind of the geoquad::Error thrown by fn; fails the test if none is thrown.
template <class Fn>
geoquad::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const geoquad::Error& e) {
    return e.kind();
  }
  FAIL("expected geoquad::Error");
  return geoquad::ErrorKind::IoError;
}

/// Message of the geoquad::Error thrown by fn.
template <class Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const geoquad::Error& e) {
    return e.what();
  }
  FAIL("expected geoquad::Error");
  return {};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("geoquad_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
