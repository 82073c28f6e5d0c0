#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "wigcov/families.hpp"
#include "wigcov/states.hpp"
#include "wigcov/words.hpp"

using namespace wigcov;

namespace {

DetLetter L(int base, bool star = false, bool tr = false) { return {base, star, tr}; }

std::string rotate_min(const std::vector<int>& c) {
    std::string best;
    for (std::size_t r = 0; r < c.size(); ++r) {
        std::string s;
        for (std::size_t k = 0; k < c.size(); ++k) s += std::to_string(c[(r + k) % c.size()]) + ",";
        if (r == 0 || s < best) best = s;
    }
    return best;
}

std::multiset<std::string> describe(const std::vector<Factor>& fs) {
    std::multiset<std::string> out;
    for (const auto& f : fs) {
        if (f.kind == Factor::Kind::Phi)
            out.insert("phi:" + rotate_min(f.first));
        else
            out.insert(Factor{Factor::Kind::Hadamard, f.first, f.second}.to_string());
    }
    return out;
}

FiniteNState random_state(int n, int count, std::uint64_t seed) {
    std::vector<Matrix> ms;
    for (int k = 0; k < count; ++k) ms.push_back(families::random_fixed(n, seed + k, 3.0));
    return FiniteNState(DetFamily(n, ms));
}

} // namespace

TEST(Canonicalize, RotatesAndFuses) {
    EXPECT_EQ(parse_monomial("a0 x1 a1").to_string(), "x1 a1 a0");
    EXPECT_EQ(parse_monomial("x1 x2").to_string(), "x1 1 x2 1");
    EXPECT_EQ(parse_monomial("x1* a1").to_string(), "x1 a1");
    EXPECT_EQ(parse_monomial("x1 a1 x1").to_string(), "x1 a1 x1 1");
    EXPECT_EQ(parse_monomial("x a2* a3^t").to_string(), "x1 a2* a3^t");
    EXPECT_EQ(parse_monomial("1 x2 I").to_string(), "x2 1");
}

TEST(Canonicalize, DegreeZeroWords) {
    const auto m = parse_monomial("a1 a2");
    EXPECT_EQ(m.degree(), 0);
    EXPECT_EQ(m.to_string(), "a1 a2");
    EXPECT_EQ(parse_monomial("1").to_string(), "1");
}

TEST(Canonicalize, FlagsAreIdempotent) {
    EXPECT_EQ(parse_monomial("x1 a1**").to_string(), "x1 a1");
    EXPECT_EQ(parse_monomial("x1 a1^t^t").to_string(), "x1 a1");
    EXPECT_EQ(parse_monomial("x1 a1*^t").to_string(), parse_monomial("x1 a1^t*").to_string());
}

TEST(Canonicalize, BadTokens) {
    EXPECT_THROW(parse_monomial("x1 b2"), Error);
    EXPECT_THROW(parse_monomial("x1^t a1"), Error);
    EXPECT_THROW(parse_monomial("x1 a"), Error);
}

TEST(STransform, Examples) {
    EXPECT_EQ(s_transform(parse_monomial("x1 a1")).to_string(), "x1 a1^t");
    EXPECT_EQ(s_transform(parse_monomial("x3 a3 x4 a4")).to_string(), "x4 a3^t x3 a4^t");
    const auto w = parse_monomial("x1 a1 x2 a2");
    EXPECT_EQ(s_transform(s_transform(w)), w);
    const auto v = parse_monomial("x1 a1 a2* x2 x3 a3^t");
    EXPECT_EQ(s_transform(s_transform(v)), v);
    EXPECT_THROW(s_transform(parse_monomial("a1")), Error);
}

TEST(Adjoint, ReversesAndStars) {
    EXPECT_EQ(adjoint(parse_monomial("x1 a1 x2 a2")).to_string(), "x2 a1* x1 a2*");
    const auto w = parse_monomial("x1 a1 x2 a2 x3 a3");
    EXPECT_EQ(adjoint(adjoint(w)), w);
}

TEST(PolynomialTest, MergesDuplicates) {
    Polynomial p = Polynomial(parse_monomial("x1 a1")) + Polynomial(parse_monomial("a1 x1"));
    ASSERT_EQ(p.terms().size(), 1u);
    EXPECT_EQ(p.terms()[0].coeff, cplx(2.0));
    Polynomial q = cplx(3.0) * p;
    EXPECT_EQ(q.terms()[0].coeff, cplx(6.0));
}

TEST(Family, Builders) {
    const int n = 6;
    FiniteNState st(DetFamily(n, {families::diagonal_pattern(n, {1.0, -1.0}), families::identity(n),
                                  families::projection(n, 0.5)}));
    EXPECT_NEAR(std::abs(st.phi({L(0)})), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi({L(0), L(0)}) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi_hadamard({L(0)}, {L(0)}) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi({L(1), L(1), L(1)}) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi({L(2)}) - 0.5), 0.0, 1e-14);
    EXPECT_EQ(st.phi({}), cplx(1.0));
}

TEST(Family, ShiftMatrix) {
    FiniteNState st(DetFamily(4, {families::circulant(4, {0.0, 1.0, 0.0, 0.0})}));
    EXPECT_NEAR(std::abs(st.phi({L(0)})), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi({L(0), L(0), L(0), L(0)}) - 1.0), 0.0, 1e-14);
    // S^t = S^{-1} for a permutation matrix.
    EXPECT_NEAR(std::abs(st.phi({L(0), L(0, false, true)}) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi_transpose({L(0)}, {L(0)}) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(st.phi({L(0), L(0)})), 0.0, 1e-14);

    FiniteNState st3(DetFamily(3, {families::circulant(3, {0.0, 1.0})}));
    EXPECT_NEAR(std::abs(st3.phi({L(0), L(0, false, true)}) - 1.0), 0.0, 1e-14);
}

TEST(Family, HadamardOfDiagonals) {
    FiniteNState st(DetFamily(4, {families::diagonal_pattern(4, {1.0, 0.0}), families::diagonal_pattern(4, {1.0, 1.0, 0.0, 0.0})}));
    EXPECT_NEAR(std::abs(st.phi_hadamard({L(0)}, {L(1)}) - 0.25), 0.0, 1e-14);
    EXPECT_EQ(st.phi_hadamard({}, {}), cplx(1.0));
}

TEST(Family, Errors) {
    EXPECT_THROW(DetFamily(3, {Matrix::Identity(4, 4)}), Error);
    EXPECT_THROW(DetFamily(3, {Matrix::Identity(3, 3) * 10.0}, 5.0), Error);
    EXPECT_THROW(families::diagonal_pattern(3, {}), Error);
    EXPECT_THROW(families::circulant(2, {1.0, 2.0, 3.0}), Error);
    FiniteNState st(DetFamily(3, {families::identity(3)}));
    EXPECT_THROW(st.phi({L(1)}), Error);
}

TEST(Family, RandomFixedRespectsCap) {
    const Matrix m = families::random_fixed(40, 7, 2.0);
    EXPECT_LE(operator_norm_estimate(m), 2.0);
    EXPECT_GT(operator_norm_estimate(m), 0.5);
    EXPECT_EQ(m, families::random_fixed(40, 7, 2.0));
}

TEST(FiniteN, TracialSymmetricTranspose) {
    auto st = random_state(12, 3, 11);
    const DetWord u{L(0), L(1, true)}, v{L(2, false, true), L(0)};
    EXPECT_NEAR(std::abs(st.phi(concat(u, v)) - st.phi(concat(v, u))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(st.phi_hadamard(u, v) - st.phi_hadamard(v, u)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(st.phi_transpose(u, v) - st.phi_transpose(v, u)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(st.phi_transpose(u, v) - st.phi(concat(u, transpose(v)))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(st.phi(transpose(u)) - st.phi(u)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(st.phi_hadamard(u, transpose(v)) - st.phi_hadamard(u, v)), 0.0, 1e-12);
    // (A*)^t == (A^t)* as a matrix
    EXPECT_EQ(st.family().letter_matrix(L(0, true, true)), st.family().base(0).conjugate());
}

TEST(FiniteN, WordCacheIsShared) {
    auto st = random_state(5, 2, 3);
    FiniteNState copy = st;
    const DetWord w{L(0), L(1)};
    EXPECT_EQ(&st.family().word(w), &copy.family().word(w));
}

TEST(Symbolic, KeysAndMissingEntries) {
    SymbolicState s;
    s.set_phi({L(1), L(2)}, 0.25);
    EXPECT_EQ(s.phi({L(2), L(1)}), cplx(0.25));
    EXPECT_EQ(s.phi({L(1, false, true), L(2, false, true)}), cplx(0.25));
    EXPECT_EQ(s.phi({}), cplx(1.0));
    EXPECT_THROW(s.phi({L(3)}), Error);
    s.set_hadamard({L(1)}, {L(2)}, 0.5);
    EXPECT_EQ(s.phi_hadamard({L(2)}, {L(1, false, true)}), cplx(0.5));
    EXPECT_THROW(s.phi_hadamard({L(1)}, {L(3)}), Error);
}

TEST(PhiK, TwelvePointFactorizations) {
    const auto sigma = AnnularPairing::from_pairs(8, 4, {{1, 2}, {3, 10}, {4, 5}, {6, 9}, {7, 8}, {11, 12}});
    const auto fk = describe(phi_K_factors(kreweras(sigma)));
    std::multiset<std::string> want_k{"phi:" + rotate_min({1}),          "phi:" + rotate_min({7}),
                                      "phi:" + rotate_min({4}),          "phi:" + rotate_min({6, 8, 2, 10, 12}),
                                      "phi:" + rotate_min({3, 5, 9}),    "phi:" + rotate_min({11})};
    EXPECT_EQ(fk, want_k);

    const auto ft = describe(phi_tilde_K_factors(sigma));
    std::multiset<std::string> want_t{"phi:" + rotate_min({1}), "phi:" + rotate_min({7}), "phi:" + rotate_min({4}),
                                      "phi:" + rotate_min({11}), "phi_o(a6 a8 a2, a10 a12)", "phi_o(a3 a5, a9)"};
    EXPECT_EQ(ft, want_t);
}

TEST(PhiK, TwelvePointNumeric) {
    auto st = random_state(7, 12, 100);
    const auto sigma = AnnularPairing::from_pairs(8, 4, {{1, 2}, {3, 10}, {4, 5}, {6, 9}, {7, 8}, {11, 12}});
    std::vector<DetWord> letters;
    for (int k = 0; k < 12; ++k) letters.push_back({L(k)});
    auto a = [&](std::initializer_list<int> ids) {
        DetWord w;
        for (int i : ids) w.push_back(L(i - 1));
        return w;
    };
    const cplx want = st.phi(a({1})) * st.phi(a({7})) * st.phi(a({4})) * st.phi(a({6, 8, 2, 10, 12})) *
                      st.phi(a({3, 5, 9})) * st.phi(a({11}));
    EXPECT_NEAR(std::abs(eval_phi_K(sigma, letters, st) - want), 0.0, 1e-12);
    const cplx want_t = st.phi(a({1})) * st.phi(a({7})) * st.phi(a({4})) * st.phi_hadamard(a({6, 8, 2}), a({10, 12})) *
                        st.phi_hadamard(a({3, 5}), a({9})) * st.phi(a({11}));
    EXPECT_NEAR(std::abs(eval_phi_tilde_K(sigma, letters, st) - want_t), 0.0, 1e-12);
}

TEST(PhiK, SmallCasesAndIdentityLetters) {
    auto st = random_state(6, 4, 5);
    const auto s11 = enumerate_nc2(1, 1).front();
    std::vector<DetWord> two{{L(0)}, {L(1)}};
    EXPECT_NEAR(std::abs(eval_phi_K(s11, two, st) - st.phi({L(0), L(1)})), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(eval_phi_tilde_K(s11, two, st) - st.phi_hadamard({L(0)}, {L(1)})), 0.0, 1e-13);

    const auto s22 = enumerate_nc2(2, 2).front(); // (1,3)(2,4)
    std::vector<DetWord> four{{L(0)}, {L(1)}, {L(2)}, {L(3)}};
    const cplx want = st.phi_hadamard({L(0)}, {L(3)}) * st.phi_hadamard({L(1)}, {L(2)});
    EXPECT_NEAR(std::abs(eval_phi_tilde_K(s22, four, st) - want), 0.0, 1e-13);

    std::vector<DetWord> ones(6);
    for (const auto& s : enumerate_nc2(3, 3)) EXPECT_EQ(eval_phi_K(s, ones, st), cplx(1.0));
    for (const auto& s : filter_by_through(enumerate_nc2(4, 2), 2)) EXPECT_EQ(eval_phi_tilde_K(s, ones, st), cplx(1.0));
    EXPECT_THROW(eval_phi_tilde_K(filter_by_through(enumerate_nc2(3, 3), 3).front(), ones, st), Error);
}
