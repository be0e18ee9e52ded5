#pragma once

#include <doctest.h>

#include "nsdde/error.hpp"

// Checks that `expr` throws nsdde::Error with the given code.
#define CHECK_THROWS_CODE(expr, expected)                          \
    do {                                                           \
        bool thrown_ = false;                                      \
        try {                                                      \
            (void)(expr);                                          \
        } catch (const nsdde::Error& e_) {                         \
            thrown_ = true;                                        \
            CHECK_MESSAGE(e_.code() == (expected), e_.what());     \
        }                                                          \
        CHECK_MESSAGE(thrown_, "expected nsdde::Error: " #expr);   \
    } while (0)
