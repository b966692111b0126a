#include <gtest/gtest.h>

#include <chrono>
#include <vector>

#include "ssvs/counting.hpp"

using namespace ssvs;

namespace {

/// Count patterns over m mains and all two-way interactions by direct enumeration.
std::pair<unsigned long, unsigned long> brute_counts(unsigned m) {
    std::vector<std::pair<unsigned, unsigned>> pairs;
    for (unsigned i = 0; i < m; ++i)
        for (unsigned j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    const unsigned p = m + static_cast<unsigned>(pairs.size());
    unsigned long strong = 0, weak = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
        bool s = true, w = true;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (!(mask >> (m + k) & 1u)) continue;
            bool a = mask >> pairs[k].first & 1u, b = mask >> pairs[k].second & 1u;
            s = s && a && b;
            w = w && (a || b);
        }
        strong += s;
        weak += w;
    }
    return {strong, weak};
}

}  // namespace

TEST(Counting, SmallValues) {
    EXPECT_EQ(count_strong(0), 1);
    EXPECT_EQ(count_weak(0), 1);
    EXPECT_EQ(count_strong(2), 5);
    EXPECT_EQ(count_weak(2), 7);
    EXPECT_EQ(count_strong(3), 18);
    EXPECT_EQ(count_weak(3), 45);
}

TEST(Counting, MatchesEnumeration) {
    auto start = std::chrono::steady_clock::now();
    for (unsigned m = 1; m <= 5; ++m) {
        auto [s, w] = brute_counts(m);
        EXPECT_EQ(count_strong(m), s) << m;
        EXPECT_EQ(count_weak(m), w) << m;
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Counting, AllModelsAndOrdering) {
    EXPECT_EQ(count_all(3), 64);
    for (unsigned m = 1; m <= 30; ++m) {
        EXPECT_LE(count_strong(m), count_weak(m));
        EXPECT_LE(count_weak(m), count_all(m));
    }
}

TEST(Counting, LargeValuesAreExact) {
    // the leading term of the strong count is 2^C(m,2), from the full main set
    for (unsigned m : {20u, 40u}) {
        BigInt lead = pow2(static_cast<unsigned long>(m) * (m - 1) / 2);
        EXPECT_GT(count_strong(m), lead);
        EXPECT_LT(count_strong(m), 2 * lead);
    }
    EXPECT_NEAR(log2_big(count_all(40)), 820.0, 1e-12);
    EXPECT_NEAR(log2_big(BigInt(1000)), std::log2(1000.0), 1e-12);
}

TEST(Counting, Binomial) {
    EXPECT_EQ(binomial(5, 2), 10);
    EXPECT_EQ(binomial(5, 6), 0);
    EXPECT_EQ(binomial(60, 30), BigInt("118264581564861424"));
}
