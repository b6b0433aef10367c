#pragma once

#include <gtest/gtest.h>

#include "pbl/error.hpp"

namespace pbl::testing {

/// Kind of the pbl::Error thrown by f; records a failure if nothing is thrown.
template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no pbl::Error thrown";
  return ErrorKind::io;
}

}  // namespace pbl::testing
