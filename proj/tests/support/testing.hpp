#pragma once

#include <gtest/gtest.h>

#include "ab3/error.hpp"
#include "ports.hpp"

namespace ab3::testing {

// Kind of the ab3::Error raised by f; records a failure when nothing is thrown.
template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ab3::Error thrown";
  return ErrorKind::kIo;
}

}  // namespace ab3::testing
