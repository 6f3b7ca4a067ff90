#pragma once

// Little-endian scalar helpers shared by the binary file formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

#include "evdenoise/errors.hpp"

namespace evdenoise::detail {

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    const U bits = std::bit_cast<U>(value);
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    }
    out.write(buf.data(), buf.size());
}

// Reads a value and advances `offset`; throws ParseError on truncation.
template <typename T>
T get_le(std::istream& in, std::size_t& offset) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    std::array<unsigned char, sizeof(T)> buf{};
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw ParseError("unexpected end of file", offset + static_cast<std::size_t>(in.gcount()));
    }
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bits |= static_cast<U>(static_cast<U>(buf[i]) << (8 * i));
    }
    offset += sizeof(T);
    return std::bit_cast<T>(bits);
}

// Reads exactly `magic.size()` bytes and compares them.
inline void expect_magic(std::istream& in, std::string_view magic, std::size_t& offset) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (in.gcount() != static_cast<std::streamsize>(got.size()) || got != magic) {
        throw ParseError("bad magic, expected '" + std::string(magic) + "'", offset);
    }
    offset += magic.size();
}

}  // namespace evdenoise::detail
