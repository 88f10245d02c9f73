#ifndef VKRL_COMMON_HPP
#define VKRL_COMMON_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace vkrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
    double w = a - kTwoPi * std::floor((a + kPi) / kTwoPi);
    // floor() can land exactly on the upper edge after rounding
    if (w >= kPi) w -= kTwoPi;
    if (w < -kPi) w = -kPi;
    return w;
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// 64-bit FNV-1a. Used for map fingerprints, file hashes and payload checksums.
class Fnv1a {
public:
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    template <typename T>
        requires std::is_arithmetic_v<T>
    void update_value(T v) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &v, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
        update(bytes, sizeof(T));
    }
    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hex64(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
        v >>= 4;
    }
    return s;
}

namespace io {

// Little-endian scalar serialization shared by the kernel and checkpoint formats.
template <typename T>
    requires std::is_arithmetic_v<T>
void write_le(std::ostream& os, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
    requires std::is_arithmetic_v<T>
T read_le(std::istream& is, const char* what = "value") {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw Error(std::string("unexpected end of file while reading ") + what);
    }
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

inline void write_f64_array(std::ostream& os, std::span<const double> values) {
    for (double v : values) write_le(os, v);
}

inline void read_f64_array(std::istream& is, std::span<double> out, const char* what) {
    for (double& v : out) v = read_le<double>(is, what);
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, const char* what, std::size_t max_len = 1u << 20) {
    const auto n = read_le<std::uint32_t>(is, what);
    if (n > max_len) throw Error(std::string("corrupt length for ") + what);
    std::string s(n, '\0');
    if (n > 0 && !is.read(s.data(), n)) throw Error(std::string("unexpected end of file while reading ") + what);
    return s;
}

}  // namespace io

}  // namespace vkrl

#endif  // VKRL_COMMON_HPP
