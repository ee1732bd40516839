#pragma once

#include <cstdint>

#include "sphertwist/field.hpp"

namespace sphertwist {

// Deterministic splitmix64 stream. Every fuzz suite and corpus generator
// derives its randomness from one of these, seeded explicitly, so runs are
// reproducible across platforms (no std::mt19937 distribution variance).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). n = 0 returns 0.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    // Uniform in [lo, hi] inclusive.
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next_u64() & 1) != 0; }

    // Fork an independent stream (for per-job determinism under parallelism).
    Rng fork(std::uint64_t salt) {
        Rng r(state_ ^ (salt * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
        r.next_u64();
        return r;
    }

    template <class K>
    K field_element();
    template <class K>
    K nonzero_field_element() {
        for (;;) {
            K x = field_element<K>();
            if (!is_zero(x)) return x;
        }
    }

private:
    std::uint64_t state_;
};

template <>
inline Fp Rng::field_element<Fp>() {
    return Fp(static_cast<long long>(below(Fp::modulus())));
}

// Small numerators keep rational elimination from blowing up in fuzz runs.
template <>
inline Rational Rng::field_element<Rational>() {
    return Rational(range(-6, 6));
}

} // namespace sphertwist
