// SPDX-License-Identifier: Apache-2.0
//
// grassfeed: limited-feedback block diagonalization simulator
// Copyright (C) 2026 The grassfeed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <optional>

#include "grassfeed/error.hpp"

template <typename F>
std::optional<grassfeed::ErrorKind> error_kind(F&& f) {
    try {
        f();
    } catch (const grassfeed::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

#define CHECK_KIND(expr, k) CHECK(error_kind([&] { (void)(expr); }) == std::optional(grassfeed::ErrorKind::k))
