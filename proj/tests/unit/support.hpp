#pragma once

#include <doctest.h>

#include "errors.hpp"

// Runs expr and checks it throws gevreg::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                           \
  do {                                                                  \
    bool thrown_ = false;                                               \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const gevreg::Error& e_) {                                 \
      thrown_ = true;                                                   \
      CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());           \
    }                                                                   \
    CHECK_MESSAGE(thrown_, "expected gevreg::Error from " #expr);       \
  } while (false)
