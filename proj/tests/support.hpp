#pragma once

#include <functional>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "modea/error.hpp"

namespace support {

inline modea::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const modea::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return modea::ErrorCode::Io;
}

}  // namespace support
