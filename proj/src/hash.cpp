#include "profcat/hash.hpp"

#include <cstdio>

namespace profcat {

void Fnv1a64::update(std::string_view bytes) noexcept
{
    for (unsigned char ch : bytes) {
        state_ ^= ch;
        state_ *= 0x100000001b3ULL;
    }
}

void Fnv1a64::update_field(std::string_view bytes) noexcept
{
    update(bytes);
    update(std::string_view("\x1f", 1));
}

std::string Fnv1a64::hex() const { return to_hex64(state_); }

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    Fnv1a64 h;
    h.update(bytes);
    return h.digest();
}

std::string to_hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace profcat
