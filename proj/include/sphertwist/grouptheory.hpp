#pragma once

// The group generated by two spherical twists, classified by the
// intersection number: commuting at i = 0, braid at i = 1, free at i >= 2.
// Freeness is certified by ping-pong on explicit separating objects, with
// every word of bounded length checked against the strict W-set
// inequalities.

#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sphertwist/spherical.hpp"

namespace sphertwist {

// A reduced word in two twist generators: letters (generator index 1 or 2,
// nonzero twist exponent), adjacent letters on different generators.
struct TwistWord {
    std::vector<std::pair<int, int>> letters;
};

inline void validate_word(const TwistWord& w) {
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        require(w.letters[i].first == 1 || w.letters[i].first == 2, errc::usage,
                "word letters use generator indices 1 and 2");
        require(w.letters[i].second != 0, errc::usage, "word letters need nonzero exponents");
        require(i == 0 || w.letters[i].first != w.letters[i - 1].first, errc::usage,
                "word is not reduced: adjacent letters share a generator");
    }
}

// Canonical reduced form: adjacent letters on one generator merge, letters
// whose exponents cancel disappear, cascading. Letters still need valid
// generator indices and nonzero exponents.
inline TwistWord reduce_word(const TwistWord& w) {
    TwistWord r;
    for (auto& [g, e] : w.letters) {
        require(g == 1 || g == 2, errc::usage, "word letters use generator indices 1 and 2");
        require(e != 0, errc::usage, "word letters need nonzero exponents");
        if (!r.letters.empty() && r.letters.back().first == g) {
            r.letters.back().second += e;
            if (r.letters.back().second == 0) r.letters.pop_back();
        } else {
            r.letters.push_back({g, e});
        }
    }
    return r;
}

inline std::string format_word(const TwistWord& w) {
    if (w.letters.empty()) return "(empty)";
    std::ostringstream out;
    for (auto& [g, e] : w.letters) {
        out << 'T' << g;
        if (e != 1) out << '^' << e;
        out << ' ';
    }
    std::string s = out.str();
    s.pop_back();
    return s;
}

// Prepend one generator power to a reduced word, merging into the leading
// letter when the generators agree.
inline TwistWord prepend_letter(TwistWord w, int gen, int exp) {
    if (!w.letters.empty() && w.letters.front().first == gen) {
        w.letters.front().second += exp;
        if (w.letters.front().second == 0) w.letters.erase(w.letters.begin());
    } else {
        w.letters.insert(w.letters.begin(), {gen, exp});
    }
    return w;
}

// Apply a word of twists to an object, rightmost letter first, minimizing as
// it goes. The letters index the two given spherical objects. The word is
// reduced first, so formally cancelling input is fine.
template <class K>
Object<K> apply_word(const TwistWord& w, const SphericalObject<K>& e1,
                     const SphericalObject<K>& e2, const Object<K>& m,
                     std::uint64_t size_cap = 10000) {
    require(e1.object.alg == m.alg && e2.object.alg == m.alg && m.alg != nullptr, errc::usage,
            "AlgebraMismatch: word application needs one algebra");
    const TwistWord reduced = reduce_word(w);
    Object<K> x = m;
    for (auto it = reduced.letters.rbegin(); it != reduced.letters.rend(); ++it) {
        x = twist_power(it->first == 1 ? e1 : e2, it->second, x);
        require(static_cast<std::uint64_t>(x.size()) <= size_cap, errc::precondition,
                "SizeCap: word application exceeded " + std::to_string(size_cap) +
                    " summands at " + format_word(reduced));
    }
    return x;
}

// Equality criterion for twist powers: T_{E1}^{k1} = T_{E2}^{k2} exactly when
// the objects agree up to shift and the exponents agree.
struct CommuteReport {
    bool equal = false;
    std::optional<int> shift;
    std::string reason;
};

template <class K>
CommuteReport commute_test(const SphericalObject<K>& e1, int k1, const SphericalObject<K>& e2,
                           int k2) {
    require(k1 != 0 && k2 != 0, errc::usage, "ZeroPower: exponents must be nonzero");
    require(e1.d > 1 && e2.d > 1, errc::precondition,
            "DNotGreaterThanOne: the classification needs d > 1");
    CommuteReport r;
    const auto iso = iso_up_to_shift(e1.object, e2.object);
    if (!iso.has_value()) {
        r.reason = "the objects are distinct";
        return r;
    }
    r.shift = iso->first;
    if (k1 != k2) {
        r.reason = "the objects agree up to shift but the exponents differ";
        return r;
    }
    r.equal = true;
    r.reason = "the objects agree up to shift " + std::to_string(iso->first) +
               " and the exponents match";
    return r;
}

// One verified step of a ping-pong run: after applying `word` to the seed,
// the strict W-set inequality lhs > rhs held.
struct PingPongStep {
    TwistWord word;
    long long lhs = 0;
    long long rhs = 0;
};

struct PingPongSample {
    TwistWord word;
    std::vector<std::pair<int, int>> classes; // summand multiset of the image
    bool in_w1 = false;
};

struct PingPongCertificate {
    int max_word_length = 0;
    long long words_checked = 0;
    std::vector<PingPongSample> sampled_orbit;
    std::vector<PingPongStep> inequality_trace;
};

namespace detail {

template <class K>
struct PingPongContext {
    const SphericalObject<K>* e1;
    const SphericalObject<K>* e2;
    int k1, k2;
    int max_len;
    std::uint64_t size_cap;
};

// Apply one more generator power on the left of an already-verified word,
// check the W-set transition and nontriviality, then branch into every
// reduced continuation. The subtree below a seed covers every reduced word
// whose rightmost letter matches that seed's W-set.
template <class K>
void pingpong_step(const PingPongContext<K>& ctx, const Object<K>& x, const Object<K>& seed,
                   const TwistWord& word, int depth, int gen, int sign,
                   PingPongCertificate& cert) {
    const int k = gen == 1 ? ctx.k1 : ctx.k2;
    const SphericalObject<K>& e = gen == 1 ? *ctx.e1 : *ctx.e2;
    const Object<K> y = twist_power(e, sign * k, x);
    require(static_cast<std::uint64_t>(y.size()) <= ctx.size_cap, errc::precondition,
            "SizeCap: ping-pong orbit exceeded " + std::to_string(ctx.size_cap) + " summands");
    const TwistWord next = prepend_letter(word, gen, sign * k);

    // T_{E1}-letters must land in W_1 = {i(., E2) > i(., E1)} and
    // T_{E2}-letters in W_2, per the inclusion chain of the theorem.
    const long long to_e1 = intersection_number(y, ctx.e1->object).total;
    const long long to_e2 = intersection_number(y, ctx.e2->object).total;
    const long long lhs = gen == 1 ? to_e2 : to_e1;
    const long long rhs = gen == 1 ? to_e1 : to_e2;
    require(lhs > rhs, errc::soundness,
            "CertificateFailure: W-set inequality fails after " + format_word(next));
    require(!iso_up_to_shift(y, seed).has_value(), errc::soundness,
            "CertificateFailure: " + format_word(next) + " acts as a shift on the seed");

    ++cert.words_checked;
    cert.inequality_trace.push_back({next, lhs, rhs});
    if (depth == 0) cert.sampled_orbit.push_back({next, y.class_multiset(), gen == 1});

    if (depth + 1 == ctx.max_len) return;
    for (int g : {1, 2})
        for (int s : {1, -1})
            if (!(g == gen && s == -sign)) // skip the cancelling letter
                pingpong_step(ctx, y, seed, next, depth + 1, g, s, cert);
}

} // namespace detail

// Certify that the twist powers ping-pong between the two W-sets on every
// reduced word up to the given length. Seeds come from the separating-object
// construction in both directions. Any failed inequality would contradict
// the freeness theorem and is raised as a soundness error.
template <class K>
PingPongCertificate pingpong_verify(const SphericalObject<K>& e1, int k1,
                                    const SphericalObject<K>& e2, int k2, int max_word_length,
                                    std::uint64_t size_cap = 10000, int threads = 1) {
    require(k1 != 0 && k2 != 0, errc::usage, "ZeroPower: exponents must be nonzero");
    require(max_word_length >= 1, errc::usage, "ping-pong needs a positive word length");
    require(e1.d > 1 && e2.d > 1, errc::precondition,
            "DNotGreaterThanOne: the classification needs d > 1");
    require(intersection_number(e1.object, e2.object).total >= 2, errc::precondition,
            "ping-pong requires intersection number at least 2");

    // seed2 lies in W_2 (closer to E1), seed1 in W_1 (closer to E2).
    const Object<K> seed2 = build_separating_object(e1, e2).s;
    const Object<K> seed1 = build_separating_object(e2, e1).s;

    PingPongCertificate cert;
    cert.max_word_length = max_word_length;
    cert.sampled_orbit.push_back({TwistWord{}, seed1.class_multiset(), true});
    cert.sampled_orbit.push_back({TwistWord{}, seed2.class_multiset(), false});

    const detail::PingPongContext<K> ctx{&e1, &e2, k1, k2, max_word_length, size_cap};
    // Four independent root branches: (seed, first generator sign).
    struct Root {
        const Object<K>* seed;
        int seed_gen; // 1 when the seed lies in W_2 and expects T_{E1} first
        int sign;
    };
    const std::vector<Root> roots = {{&seed2, 1, 1}, {&seed2, 1, -1}, {&seed1, 2, 1},
                                     {&seed1, 2, -1}};

    auto run_root = [&](const Root& r) {
        PingPongCertificate part;
        part.max_word_length = max_word_length;
        detail::pingpong_step(ctx, *r.seed, *r.seed, TwistWord{}, 0, r.seed_gen, r.sign, part);
        return part;
    };

    std::vector<PingPongCertificate> parts(roots.size());
    if (threads > 1) {
        std::vector<std::future<PingPongCertificate>> futures;
        futures.reserve(roots.size());
        for (auto& r : roots)
            futures.push_back(std::async(std::launch::async, [&run_root, &r] {
                return run_root(r);
            }));
        for (std::size_t i = 0; i < futures.size(); ++i) parts[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < roots.size(); ++i) parts[i] = run_root(roots[i]);
    }
    // Deterministic merge in root order, independent of scheduling.
    for (auto& part : parts) {
        cert.words_checked += part.words_checked;
        for (auto& s : part.sampled_orbit) cert.sampled_orbit.push_back(s);
        for (auto& s : part.inequality_trace) cert.inequality_trace.push_back(s);
    }
    return cert;
}

// Object-level braid criterion: T_{E1} T_{E2} (E1) is a shift of E2.
template <class K>
bool braid_relation_check(const SphericalObject<K>& e1, const SphericalObject<K>& e2) {
    require(e1.d > 1 && e2.d > 1, errc::precondition,
            "DNotGreaterThanOne: the classification needs d > 1");
    TwistWord w;
    w.letters = {{1, 1}, {2, 1}};
    return iso_up_to_shift(apply_word(w, e1, e2, e1.object), e2.object).has_value();
}

enum class PairKind { Commuting, Braid, Free };

inline std::string to_string(PairKind k) {
    switch (k) {
    case PairKind::Commuting: return "Commuting";
    case PairKind::Braid: return "Braid";
    default: return "Free";
    }
}

struct PairClassification {
    PairKind kind = PairKind::Free;
    int intersection = 0;
    // Commuting: T_{E1}(E2) = E2[l]. Braid: T_{E1}T_{E2}(E1) = E2[l].
    std::optional<int> shift_witness;
    std::optional<PingPongCertificate> certificate;
};

// The trichotomy for the group generated by two twists, with the witness the
// theorems promise in each branch.
template <class K>
PairClassification classify_pair(const SphericalObject<K>& e1, const SphericalObject<K>& e2,
                                 int max_word_length = 6, std::uint64_t size_cap = 10000,
                                 int threads = 1) {
    require(e1.object.alg == e2.object.alg && e1.object.alg != nullptr, errc::usage,
            "AlgebraMismatch: classification needs objects over one algebra");
    require(e1.d > 1 && e2.d > 1, errc::precondition,
            "DNotGreaterThanOne: the classification needs d > 1");
    require(!iso_up_to_shift(e1.object, e2.object).has_value(), errc::not_distinct,
            "NotDistinct: the objects agree up to shift");

    PairClassification r;
    r.intersection = intersection_number(e1.object, e2.object).total;
    if (r.intersection == 0) {
        r.kind = PairKind::Commuting;
        const auto iso = iso_up_to_shift(twist(e1, e2.object), e2.object);
        require(iso.has_value(), errc::soundness,
                "a disjoint twist failed to fix the other object");
        r.shift_witness = iso->first;
    } else if (r.intersection == 1) {
        r.kind = PairKind::Braid;
        TwistWord w;
        w.letters = {{1, 1}, {2, 1}};
        const auto iso = iso_up_to_shift(apply_word(w, e1, e2, e1.object, size_cap), e2.object);
        require(iso.has_value(), errc::soundness,
                "the braid witness T1 T2 (E1) is not a shift of E2");
        r.shift_witness = iso->first;
    } else {
        r.kind = PairKind::Free;
        r.certificate = pingpong_verify(e1, 1, e2, 1, max_word_length, size_cap, threads);
    }
    return r;
}

} // namespace sphertwist
