#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace profcat {

// 64-bit FNV-1a. Used for checksums and fingerprints, never for security.
class Fnv1a64 {
public:
    void update(std::string_view bytes) noexcept;
    void update_field(std::string_view bytes) noexcept; // appends a 0x1f separator
    std::uint64_t digest() const noexcept { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string to_hex64(std::uint64_t value);

} // namespace profcat
