#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace collabnet {

inline constexpr std::string_view kToolVersion = "collabnet 0.1.0";

/// Bad or inconsistent input data. Mapped to process exit code 1 by the CLI.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, rank deficiency, degenerate fits.
/// Mapped to process exit code 2 by the CLI.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// x * log2(x) with the 0 log 0 = 0 convention.
inline double plogp2(double x) {
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

/**
 * Deterministic splittable PRNG (splitmix64 core).
 *
 * All randomness in the toolkit flows through this type, seeded from a single
 * run seed and split per stage, so identical configurations reproduce outputs
 * bit for bit. std:: distributions are avoided on purpose: their draw
 * sequences are implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGamma);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via the Marsaglia polar method; caches the pair.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * scale;
        has_cached_ = true;
        return u * scale;
    }

    /// Uniform integer in [0, n). Modulo bias is negligible at toolkit scales.
    std::uint64_t below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    /// Derives an independent child stream keyed by (tag, index).
    Rng split(std::string_view tag, std::uint64_t index = 0) const {
        std::uint64_t h = 1469598103934665603ULL; // FNV-1a
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        Rng child(state_ ^ h ^ (index * kGamma));
        child.next_u64();
        return child;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

/// Splits on a delimiter, keeping empty fields, trimming surrounding blanks.
inline std::vector<std::string> split_fields(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

/// Strict double parse; `context` names the offending location in the error.
inline double parse_double(const std::string& field, const std::string& context) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw InputError(context + ": malformed numeric value '" + field + "'");
    }
    return value;
}

inline int parse_int(const std::string& field, const std::string& context) {
    int value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw InputError(context + ": malformed integer '" + field + "'");
    }
    return value;
}

} // namespace collabnet
