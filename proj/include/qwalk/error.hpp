// Copyright 2026 The qwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qwalk {

enum class Errc {
    InvalidArgument,
    WidthOutOfRange,
    WidthMismatch,
    TypeMismatch,
    ValueOverflow,
    AliasedRegister,
    UnknownRegister,
    NonZeroAncilla,
    NonInjective,
    EmptyStack,
    StackOrder,
    NonZeroTarget,
    DuplicateBranch,
    UnsortedWindow,
    LayoutMismatch,
    ZeroNorm,
    Singular,
    Io,
};

constexpr std::string_view errcName(Errc c) {
    switch (c) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::WidthOutOfRange: return "WidthOutOfRange";
        case Errc::WidthMismatch: return "WidthMismatch";
        case Errc::TypeMismatch: return "TypeMismatch";
        case Errc::ValueOverflow: return "ValueOverflow";
        case Errc::AliasedRegister: return "AliasedRegister";
        case Errc::UnknownRegister: return "UnknownRegister";
        case Errc::NonZeroAncilla: return "NonZeroAncilla";
        case Errc::NonInjective: return "NonInjective";
        case Errc::EmptyStack: return "EmptyStack";
        case Errc::StackOrder: return "StackOrder";
        case Errc::NonZeroTarget: return "NonZeroTarget";
        case Errc::DuplicateBranch: return "DuplicateBranch";
        case Errc::UnsortedWindow: return "UnsortedWindow";
        case Errc::LayoutMismatch: return "LayoutMismatch";
        case Errc::ZeroNorm: return "ZeroNorm";
        case Errc::Singular: return "Singular";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
   public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errcName(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

   private:
    Errc code_;
};

}  // namespace qwalk
