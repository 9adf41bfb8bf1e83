#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "mmv/complex_matrix.hpp"
#include "oracles.hpp"

using mmv::Complex;
using mmv::ComplexMatrix;
using mmv::SupportSet;
using mmv::WeightMatrix;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("ComplexMatrix construction and invariants") {
    ComplexMatrix m(2, 3);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m.is_zero());
    CHECK(m.is_finite());

    CHECK_THROWS_AS(ComplexMatrix(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(3, 0), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(2, 2, {Complex(1), Complex(2)}), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix({{1.0, 2.0}, {3.0}}), std::invalid_argument);

    const ComplexMatrix a{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(a(1, 0) == Complex(3.0));
    CHECK(a == ComplexMatrix{{1.0, 2.0}, {3.0, 4.0}});
    CHECK(a != ComplexMatrix(2, 2));

    const ComplexMatrix id = ComplexMatrix::identity(3);
    CHECK(id(0, 0) == Complex(1.0));
    CHECK(id(0, 1) == Complex(0.0));

    ComplexMatrix nf(1, 1);
    nf(0, 0) = Complex(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_FALSE(nf.is_finite());
}

TEST_CASE("ComplexMatrix arithmetic") {
    const ComplexMatrix a{{1.0, I}, {2.0, 0.0}};
    const ComplexMatrix b{{1.0, 1.0}, {1.0, 1.0}};
    CHECK((a + b)(0, 1) == Complex(1.0, 1.0));
    CHECK((a - b)(1, 0) == Complex(1.0));
    CHECK((Complex(2.0) * a)(1, 0) == Complex(4.0));
    CHECK_THROWS_AS(a + ComplexMatrix(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(a - ComplexMatrix(2, 1), std::invalid_argument);

    CHECK(a.frobenius_norm_sq() == Catch::Approx(6.0));
    CHECK(a.frobenius_norm() == Catch::Approx(std::sqrt(6.0)));
}

TEST_CASE("row_norms matches the stated cases") {
    CHECK(mmv::row_norms(ComplexMatrix{{3.0, 4.0}, {0.0, 0.0}}) ==
          std::vector<double>{5.0, 0.0});
    CHECK(mmv::row_norms(ComplexMatrix{{I, 0.0}, {0.0, 1.0}}) == std::vector<double>{1.0, 1.0});
    CHECK(mmv::row_norms(ComplexMatrix::zeros(3, 2)) == std::vector<double>(3, 0.0));
}

TEST_CASE("hard_threshold keeps the largest rows") {
    const ComplexMatrix s{{3.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}};

    SECTION("K = 1 keeps the largest row") {
        const auto [kept, support] = mmv::hard_threshold(s, 1);
        CHECK(kept == ComplexMatrix{{3.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
        CHECK(support == SupportSet({0}));
    }
    SECTION("K = rows leaves the matrix unchanged") {
        const auto [kept, support] = mmv::hard_threshold(s, 3);
        CHECK(kept == s);
        CHECK(support == SupportSet({0, 1, 2}));
    }
    SECTION("ties keep the lowest index") {
        const ComplexMatrix t{{1.0}, {1.0}, {0.5}};
        const auto [kept, support] = mmv::hard_threshold(t, 1);
        CHECK(support == SupportSet({0}));
        CHECK(kept(1, 0) == Complex(0.0));
    }
    SECTION("zero rows are kept but excluded from the support") {
        const ComplexMatrix z{{1.0}, {0.0}};
        const auto [kept, support] = mmv::hard_threshold(z, 2);
        CHECK(kept == z);
        CHECK(support == SupportSet({0}));
    }
    SECTION("K greater than the row count throws") {
        CHECK_THROWS_AS(mmv::hard_threshold(s, 4), std::invalid_argument);
    }
    SECTION("K = 0 zeroes everything") {
        const auto [kept, support] = mmv::hard_threshold(s, 0);
        CHECK(kept.is_zero());
        CHECK(support.empty());
    }
}

TEST_CASE("hard_threshold properties on random matrices") {
    mmv::RandomStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix s = oracles::random_matrix(6, 3, rng);
        const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 5.0);

        const auto [kept, support] = mmv::hard_threshold(s, k);
        CHECK(support.size() <= k);
        CHECK(mmv::row_support(kept) == support);

        // Idempotence.
        const auto [again, support2] = mmv::hard_threshold(kept, k);
        CHECK(again == kept);
        CHECK(support2 == support);

        // Best-K-rows property against exhaustive search.
        const double err = (s - kept).frobenius_norm();
        CHECK(err <= oracles::best_k_rows_error(s, k) + 1e-12);
    }
}

TEST_CASE("sparsify_to_support") {
    const ComplexMatrix s{{1.0}, {2.0}, {3.0}};
    CHECK(mmv::sparsify_to_support(s, SupportSet({0, 1, 2})) == s);
    CHECK(mmv::sparsify_to_support(s, SupportSet()).is_zero());
    CHECK(mmv::sparsify_to_support(s, SupportSet({1})) == ComplexMatrix{{0.0}, {2.0}, {0.0}});
    CHECK_THROWS_AS(mmv::sparsify_to_support(s, SupportSet({3})), std::invalid_argument);

    mmv::RandomStream rng(12);
    const ComplexMatrix r = oracles::random_matrix(5, 2, rng);
    CHECK(mmv::sparsify_to_support(r, mmv::row_support(r)) == r);
}

TEST_CASE("row_support") {
    CHECK(mmv::row_support(ComplexMatrix::zeros(4, 2)).empty());
    CHECK(mmv::row_support(ComplexMatrix{{0.0}, {5.0}, {0.0}}) == SupportSet({1}));
    CHECK_THROWS_AS(mmv::row_support(ComplexMatrix(1, 1), -1.0), std::invalid_argument);

    const ComplexMatrix s{{1.0}, {0.0}, {2.0}, {0.0}};
    CHECK(mmv::row_support(s).size() == 2);  // ||S||_0

    // tol filters small rows
    const ComplexMatrix t{{1e-8}, {1.0}};
    CHECK(mmv::row_support(t, 1e-6) == SupportSet({1}));
}

TEST_CASE("SupportSet semantics") {
    const SupportSet s({4, 1, 2});
    CHECK(s.indices() == std::vector<std::size_t>{1, 2, 4});
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(3));
    CHECK(s.max_index() == 4);
    CHECK_THROWS_AS(SupportSet({1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(SupportSet().max_index(), std::out_of_range);
    CHECK(SupportSet({1, 2}) == SupportSet({2, 1}));
}

TEST_CASE("weighted_inner_product") {
    SECTION("single entry") {
        const ComplexMatrix a{{Complex(1.0, 1.0)}};
        const ComplexMatrix b{{Complex(2.0, 0.0)}};
        const WeightMatrix w(1, 1, 3.0);
        CHECK(mmv::weighted_inner_product(a, b, w) == Complex(6.0, 6.0));
    }
    SECTION("all-ones weights give the Hermitian inner product") {
        mmv::RandomStream rng(13);
        const ComplexMatrix a = oracles::random_matrix(3, 4, rng);
        const Complex v = mmv::weighted_inner_product(a, a, WeightMatrix::ones(3, 4));
        CHECK(v.imag() == Catch::Approx(0.0).margin(1e-12));
        CHECK(v.real() == Catch::Approx(a.frobenius_norm_sq()));
    }
    SECTION("zero weights give zero") {
        const ComplexMatrix a{{1.0, 2.0}};
        CHECK(mmv::weighted_inner_product(a, a, WeightMatrix(1, 2, 0.0)) == Complex(0.0));
    }
    SECTION("shape mismatch throws") {
        CHECK_THROWS_AS(
            mmv::weighted_inner_product(ComplexMatrix(1, 2), ComplexMatrix(1, 2), WeightMatrix(2, 1)),
            std::invalid_argument);
        CHECK_THROWS_AS(
            mmv::weighted_inner_product(ComplexMatrix(1, 2), ComplexMatrix(2, 1), WeightMatrix(1, 2)),
            std::invalid_argument);
    }
    SECTION("self inner product is real and nonnegative for random inputs") {
        mmv::RandomStream rng(14);
        for (int t = 0; t < 10; ++t) {
            const ComplexMatrix a = oracles::random_matrix(2, 3, rng);
            WeightMatrix w(2, 3);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 3; ++j) w.set(i, j, rng.uniform() * 2.0);
            const Complex v = mmv::weighted_inner_product(a, a, w);
            CHECK(std::abs(v.imag()) <= 1e-12 * (1.0 + std::abs(v.real())));
            CHECK(v.real() >= -1e-15);
        }
    }
}

TEST_CASE("WeightMatrix validation") {
    CHECK_THROWS_AS(WeightMatrix(1, 1, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(WeightMatrix(1, 1, std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    WeightMatrix w(2, 2);
    CHECK_THROWS_AS(w.set(0, 0, -1.0), std::invalid_argument);
    w.set(0, 0, 0.25);
    CHECK(w(0, 0) == 0.25);
}

TEST_CASE("matrix products agree with naive evaluation") {
    mmv::RandomStream rng(15);
    const ComplexMatrix a = oracles::random_matrix(4, 5, rng);
    const ComplexMatrix b = oracles::random_matrix(5, 3, rng);

    const ComplexMatrix ab = mmv::multiply(a, b);
    REQUIRE(ab.rows() == 4);
    REQUIRE(ab.cols() == 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            Complex acc(0.0, 0.0);
            for (std::size_t k = 0; k < 5; ++k) acc += a(i, k) * b(k, j);
            CHECK(std::abs(ab(i, j) - acc) <= 1e-12);
        }

    const ComplexMatrix m = oracles::random_matrix(4, 3, rng);
    const ComplexMatrix ahm = mmv::hermitian_product(a, m);
    const ComplexMatrix expected = mmv::multiply(mmv::conj_transpose(a), m);
    CHECK((ahm - expected).frobenius_norm() <= 1e-12 * expected.frobenius_norm());

    const SupportSet gamma({1, 3});
    const ComplexMatrix restricted = mmv::restricted_product(a, b, gamma);
    const ComplexMatrix full = mmv::multiply(a, mmv::sparsify_to_support(b, gamma));
    CHECK((restricted - full).frobenius_norm() <= 1e-12 * (1.0 + full.frobenius_norm()));

    CHECK_THROWS_AS(mmv::multiply(a, ComplexMatrix(4, 2)), std::invalid_argument);
    CHECK_THROWS_AS(mmv::hermitian_product(a, ComplexMatrix(5, 2)), std::invalid_argument);
    CHECK_THROWS_AS(mmv::restricted_product(a, b, SupportSet({7})), std::invalid_argument);

    const ComplexMatrix att = mmv::conj_transpose(mmv::conj_transpose(a));
    CHECK(att == a);
}
