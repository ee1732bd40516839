#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <vector>

#include "sphertwist/grouptheory.hpp"
#include "sphertwist/zigzag.hpp"

using namespace sphertwist;

namespace {

const MultiGraph kEdge{{"1", "2"}, {{0, 1}}};
const MultiGraph kDouble{{"1", "2"}, {{0, 1}, {0, 1}}};
const MultiGraph kTriple{{"1", "2"}, {{0, 1}, {0, 1}, {0, 1}}};
const MultiGraph kDisjoint{{"1", "2"}, {}};

TwistWord word(std::vector<std::pair<int, int>> letters) {
    TwistWord w;
    w.letters = std::move(letters);
    return w;
}

template <class K>
bool iso_on_the_nose(const Object<K>& x, const Object<K>& y) {
    const auto r = iso_up_to_shift(x, y);
    return r.has_value() && r->first == 0;
}

} // namespace

TEST_CASE("word validation, reduction, and formatting") {
    CHECK_NOTHROW(validate_word(word({{1, 2}, {2, -1}, {1, 1}})));
    CHECK_THROWS_AS(validate_word(word({{3, 1}})), error);
    CHECK_THROWS_AS(validate_word(word({{1, 0}})), error);
    CHECK_THROWS_AS(validate_word(word({{1, 1}, {1, 1}})), error);

    CHECK(reduce_word(word({{1, 1}, {1, -1}})).letters.empty());
    CHECK(reduce_word(word({{1, 2}, {2, 1}, {2, -1}, {1, 3}})).letters ==
          std::vector<std::pair<int, int>>{{1, 5}});
    CHECK_THROWS_AS(reduce_word(word({{1, 1}, {0, 2}})), error);

    CHECK(format_word(word({})) == "(empty)");
    CHECK(format_word(word({{1, 1}, {2, -2}})) == "T1 T2^-2");

    const auto merged = prepend_letter(word({{1, 2}, {2, 1}}), 1, -2);
    CHECK(merged.letters == std::vector<std::pair<int, int>>{{2, 1}});
}

TEST_CASE("applying twist words to objects") {
    const auto alg = build_zigzag<Rational>(kEdge);
    const auto e1 = projective_spherical(alg, 0);
    const auto e2 = projective_spherical(alg, 1);
    const auto m = projective_object(alg, 1, 2);

    // Empty and cancelling words leave the object alone.
    CHECK(iso_on_the_nose(apply_word(word({}), e1, e2, m), m));
    CHECK(iso_on_the_nose(apply_word(word({{1, 1}, {1, -1}}), e1, e2, m), m));
    CHECK(iso_on_the_nose(apply_word(word({{2, -2}, {2, 2}}), e1, e2, m), m));

    // Rightmost letter applies first: T1 T2 (M) = T1 of T2(M).
    const auto lhs = apply_word(word({{1, 1}, {2, 1}}), e1, e2, m);
    const auto rhs = twist(e1, twist(e2, m));
    CHECK(iso_on_the_nose(lhs, rhs));

    // The braid witness on the single edge: T1 T2 (E1) is a shift of E2.
    const auto braid = apply_word(word({{1, 1}, {2, 1}}), e1, e2, e1.object);
    CHECK(iso_up_to_shift(braid, e2.object).has_value());

    // Size caps abort oversized orbits.
    CHECK_THROWS_AS(apply_word(word({{1, 1}, {2, 1}}), e1, e2, m, 1), error);
    try {
        apply_word(word({{1, 1}, {2, 1}}), e1, e2, m, 1);
        CHECK(false);
    } catch (const error& e) {
        CHECK(e.kind() == errc::precondition);
    }
}

TEST_CASE("twist power equality criterion") {
    const auto alg = build_zigzag<Rational>(kEdge);
    const auto e1 = projective_spherical(alg, 0);
    const auto e2 = projective_spherical(alg, 1);

    // Reflexivity, and stability under shifting the object.
    for (int k : {1, 2, -3}) CHECK(commute_test(e1, k, e1, k).equal);
    const auto shifted = commute_test(e1, 2, shift_spherical(e1, 5), 2);
    CHECK(shifted.equal);
    CHECK(shifted.shift.has_value());

    // Same object, different exponents: twists have infinite order.
    const auto diff_exp = commute_test(e1, 2, e1, 3);
    CHECK_FALSE(diff_exp.equal);
    CHECK(diff_exp.shift.has_value());
    CHECK(!diff_exp.reason.empty());

    // Distinct objects never give equal powers.
    const auto distinct = commute_test(e1, 1, e2, 1);
    CHECK_FALSE(distinct.equal);
    CHECK_FALSE(distinct.shift.has_value());

    CHECK_THROWS_AS(commute_test(e1, 0, e2, 1), error);
    CHECK_THROWS_AS(commute_test(e1, 1, e2, 0), error);
}

TEST_CASE("braid relation witness across the three graph shapes") {
    const auto single = build_zigzag<Rational>(kEdge);
    CHECK(braid_relation_check(projective_spherical(single, 0),
                               projective_spherical(single, 1)));

    const auto far = build_zigzag<Rational>(kDisjoint);
    CHECK_FALSE(braid_relation_check(projective_spherical(far, 0),
                                     projective_spherical(far, 1)));

    const auto dbl = build_zigzag<Rational>(kDouble);
    CHECK_FALSE(braid_relation_check(projective_spherical(dbl, 0),
                                     projective_spherical(dbl, 1)));
}

TEST_CASE("classification trichotomy") {
    const auto far = build_zigzag<Rational>(kDisjoint);
    const auto commuting =
        classify_pair(projective_spherical(far, 0), projective_spherical(far, 1));
    CHECK(commuting.kind == PairKind::Commuting);
    CHECK(commuting.intersection == 0);
    REQUIRE(commuting.shift_witness.has_value());
    CHECK(*commuting.shift_witness == 0);
    CHECK_FALSE(commuting.certificate.has_value());

    const auto single = build_zigzag<Rational>(kEdge);
    const auto braid =
        classify_pair(projective_spherical(single, 0), projective_spherical(single, 1));
    CHECK(braid.kind == PairKind::Braid);
    CHECK(braid.intersection == 1);
    CHECK(braid.shift_witness.has_value());

    const auto dbl = build_zigzag<Fp>(kDouble);
    const auto free_pair = classify_pair(projective_spherical(dbl, 0),
                                         projective_spherical(dbl, 1), 3);
    CHECK(free_pair.kind == PairKind::Free);
    CHECK(free_pair.intersection == 2);
    REQUIRE(free_pair.certificate.has_value());
    // 4 roots, each branching into 3 continuations per extra letter.
    CHECK(free_pair.certificate->words_checked == 4 * (1 + 3 + 9));
    CHECK(free_pair.certificate->inequality_trace.size() == 4 * 13);
    for (auto& step : free_pair.certificate->inequality_trace) CHECK(step.lhs > step.rhs);
    // Two seeds plus the four one-letter images.
    CHECK(free_pair.certificate->sampled_orbit.size() == 6);

    CHECK(to_string(PairKind::Commuting) == "Commuting");
    CHECK(to_string(PairKind::Braid) == "Braid");
    CHECK(to_string(PairKind::Free) == "Free");
}

TEST_CASE("classification is symmetric and rejects degenerate input") {
    const auto single = build_zigzag<Rational>(kEdge);
    const auto e1 = projective_spherical(single, 0);
    const auto e2 = projective_spherical(single, 1);
    CHECK(classify_pair(e1, e2).kind == classify_pair(e2, e1).kind);

    try {
        classify_pair(e1, shift_spherical(e1, 2));
        CHECK(false);
    } catch (const error& e) {
        CHECK(e.kind() == errc::not_distinct);
    }

    const auto other = build_zigzag<Rational>(kEdge);
    CHECK_THROWS_AS(classify_pair(e1, projective_spherical(other, 1)), error);
}

TEST_CASE("ping-pong certificates count words and stay deterministic") {
    const auto alg = build_zigzag<Fp>(kDouble);
    const auto e1 = projective_spherical(alg, 0);
    const auto e2 = projective_spherical(alg, 1);

    const auto cert = pingpong_verify(e1, 1, e2, 1, 2);
    CHECK(cert.max_word_length == 2);
    CHECK(cert.words_checked == 4 * (1 + 3));
    REQUIRE(cert.inequality_trace.size() == 16);

    // A second serial run and a threaded run must agree step for step.
    for (const auto& again :
         {pingpong_verify(e1, 1, e2, 1, 2), pingpong_verify(e1, 1, e2, 1, 2, 10000, 2)}) {
        REQUIRE(again.inequality_trace.size() == cert.inequality_trace.size());
        for (std::size_t i = 0; i < cert.inequality_trace.size(); ++i) {
            CHECK(again.inequality_trace[i].word.letters ==
                  cert.inequality_trace[i].word.letters);
            CHECK(again.inequality_trace[i].lhs == cert.inequality_trace[i].lhs);
            CHECK(again.inequality_trace[i].rhs == cert.inequality_trace[i].rhs);
        }
    }

    // Non-unit and mixed exponents ping-pong as well.
    CHECK(pingpong_verify(e1, 2, e2, -1, 2).words_checked == 16);

    // Preconditions.
    const auto single = build_zigzag<Fp>(kEdge);
    CHECK_THROWS_AS(pingpong_verify(projective_spherical(single, 0), 1,
                                    projective_spherical(single, 1), 1, 2),
                    error);
    CHECK_THROWS_AS(pingpong_verify(e1, 0, e2, 1, 2), error);
    CHECK_THROWS_AS(pingpong_verify(e1, 1, e2, 1, 0), error);
}

TEST_CASE("triple edge pairs are free as well") {
    const auto alg = build_zigzag<Fp>(kTriple);
    const auto r = classify_pair(projective_spherical(alg, 0), projective_spherical(alg, 1), 2);
    CHECK(r.kind == PairKind::Free);
    CHECK(r.intersection == 3);
    CHECK(r.certificate.has_value());
}

TEST_CASE("single-twist deviation of the intersection square stays within two") {
    for (const MultiGraph* g : {&kEdge, &kDouble, &kTriple, &kDisjoint}) {
        const auto alg = build_zigzag<Fp>(*g);
        const auto e1 = projective_spherical(alg, 0);
        const auto e2 = projective_spherical(alg, 1);
        const long long i12 = intersection_number(e1.object, e2.object).total;
        const long long lhs =
            intersection_number(twist(e1, e2.object), e2.object).total - i12 * i12;
        CHECK(lhs <= 2);
        CHECK(lhs >= -2);
    }
}
