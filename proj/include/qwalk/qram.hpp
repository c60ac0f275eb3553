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

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

/// Classical word memory behind a QRAM query. Addresses past the end of
/// `words` read as 0.
class QramImage {
   public:
    QramImage() = default;

    QramImage(std::vector<std::uint64_t> words, unsigned addressWidth, unsigned wordWidth)
        : words_(std::move(words)), addressWidth_(addressWidth), wordWidth_(wordWidth) {
        validate();
    }

    const std::vector<std::uint64_t> &words() const { return words_; }
    unsigned addressWidth() const { return addressWidth_; }
    unsigned wordWidth() const { return wordWidth_; }
    std::size_t size() const { return words_.size(); }

    std::uint64_t read(std::uint64_t address) const { return address < words_.size() ? words_[address] : 0; }

    /// Binary layout (little endian): addressWidth:u8, wordWidth:u8,
    /// count:u64, then count words of 8 bytes.
    void save(const std::string &path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
        out.put(static_cast<char>(addressWidth_));
        out.put(static_cast<char>(wordWidth_));
        writeU64(out, words_.size());
        for (std::uint64_t w : words_) writeU64(out, w);
        if (!out) throw Error(Errc::Io, "write failed for '" + path + "'");
    }

    static QramImage load(const std::string &path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
        const int aw = in.get();
        const int ww = in.get();
        if (aw == EOF || ww == EOF) throw Error(Errc::Io, "truncated header in '" + path + "'");
        const std::uint64_t count = readU64(in, path);
        if (aw > 63 || count > (std::uint64_t{1} << aw)) {
            throw Error(Errc::Io, "word count exceeds address space in '" + path + "'");
        }
        std::vector<std::uint64_t> words(count);
        for (auto &w : words) w = readU64(in, path);
        return QramImage(std::move(words), static_cast<unsigned>(aw), static_cast<unsigned>(ww));
    }

    friend bool operator==(const QramImage &, const QramImage &) = default;

   private:
    void validate() const {
        if (addressWidth_ < 1 || addressWidth_ > 63) throw Error(Errc::WidthOutOfRange, "QRAM address width");
        if (wordWidth_ < 1 || wordWidth_ > 64) throw Error(Errc::WidthOutOfRange, "QRAM word width");
        if (words_.size() > (std::uint64_t{1} << addressWidth_)) {
            throw Error(Errc::InvalidArgument, "more words than the address width can reach");
        }
        for (std::uint64_t w : words_) {
            if (w > lowMask(wordWidth_)) throw Error(Errc::ValueOverflow, "QRAM word wider than word width");
        }
    }

    static void writeU64(std::ofstream &out, std::uint64_t v) {
        std::array<char, 8> bytes{};
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(bytes.data(), 8);
    }

    static std::uint64_t readU64(std::ifstream &in, const std::string &path) {
        std::array<unsigned char, 8> bytes{};
        in.read(reinterpret_cast<char *>(bytes.data()), 8);
        if (!in) throw Error(Errc::Io, "truncated data in '" + path + "'");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        return v;
    }

    std::vector<std::uint64_t> words_;
    unsigned addressWidth_ = 1;
    unsigned wordWidth_ = 1;
};

}  // namespace qwalk
