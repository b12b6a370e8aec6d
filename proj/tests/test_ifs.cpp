#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace ifsmeasure;
using namespace ifsmeasure::testing;

TEST(EvalMap, AffineMoebiusSine) {
    make_context(64);
    const auto a = MapSpec::affine(Scalar(1, 3), Scalar(2, 3));
    EXPECT_LT(err(eval_map(a, BigReal(1) / 2), BigReal(5) / 6), tol(70));
    EXPECT_LT(err(eval_map_derivative(a, BigReal(1) / 5), BigReal(1) / 3), tol(70));

    const auto m = MapSpec::moebius(Scalar(0), Scalar(1), Scalar(1), Scalar(2));
    EXPECT_LT(err(eval_map(m, BigReal(1)), BigReal(1) / 3), tol(70));
    const BigReal r = sqrt(BigReal(2)) - 1;
    EXPECT_LT(err(eval_map(m, r), r), tol(70));
    EXPECT_LT(err(eval_map_derivative(m, r), 2 * sqrt(BigReal(2)) - 3), tol(70));

    const auto s = MapSpec::sine_affine(Scalar(1, 6), Scalar(1, 4));
    EXPECT_LT(err(eval_map(s, BigReal(0)), BigReal(1) / 4), tol(70));
    EXPECT_LT(err(eval_map(s, BigReal(2)), BigReal(5) / 12), tol(70));
    EXPECT_LT(err(eval_map_derivative(s, BigReal(0)), pi_value() / 24), tol(70));
    for (double x : {0.1, 0.37, 0.9}) {
        EXPECT_NEAR(eval_map(s, BigReal(x)).convert_to<double>(), std::sin(M_PI * x / 4) / 6 + 0.25, 1e-15);
    }
}

TEST(EvalMap, CombinedValueAndDerivativeAgree) {
    make_context(64);
    for (const auto& m : sine(Scalar(1, 3), Scalar(2, 3)).maps) {
        const BigReal x = BigReal(3) / 7;
        auto [v, d] = eval_map_with_derivative(m, x);
        EXPECT_LT(err(v, eval_map(m, x)), tol(75));
        EXPECT_LT(err(d, eval_map_derivative(m, x)), tol(75));
    }
}

TEST(EvalMap, ComplexAgreesWithRealOnAxis) {
    make_context(64);
    for (const auto& cfg : {cantor(), moebius(), sine(Scalar(1, 3), Scalar(2, 3))}) {
        for (const auto& m : cfg.maps) {
            const BigReal x = BigReal(2) / 9;
            const auto z = eval_map(m, BigComplex(x));
            EXPECT_LT(err(z.re, eval_map(m, x)), tol(75));
            EXPECT_LT(abs(z.im), tol(75));
        }
    }
}

TEST(EvalMap, DerivativeMatchesCentralDifference) {
    auto ctx = make_context(90);
    const BigReal h = ctx.pow10_neg(30);
    for (const auto& cfg : {cantor(), moebius(), sine(Scalar(1, 3), Scalar(2, 3))}) {
        for (const auto& m : cfg.maps) {
            for (int j = 0; j <= 10; ++j) {
                const BigReal x = BigReal(j) / 10;
                const BigReal fd = (eval_map(m, BigReal(x + h)) - eval_map(m, BigReal(x - h))) / (2 * h);
                EXPECT_LT(err(fd, eval_map_derivative(m, x)), tol(50));
            }
        }
    }
}

TEST(EvalMap, MoebiusPoleIsADomainError) {
    make_context(40);
    const auto m = MapSpec::moebius(Scalar(0), Scalar(1), Scalar(1), Scalar(2));
    EXPECT_THROW(eval_map(m, BigReal(-2)), domain_error);
    EXPECT_THROW(MapSpec::moebius(Scalar(1), Scalar(2), Scalar(2), Scalar(4)), config_error);
    EXPECT_THROW(MapSpec::affine(Scalar(0), Scalar(1, 2)), config_error);
}

TEST(DerivativeBound, ClosedForms) {
    make_context(64);
    EXPECT_LT(err(derivative_bound(MapSpec::affine(Scalar(-1, 3), Scalar(1))), BigReal(1) / 3), tol(70));
    EXPECT_LT(err(derivative_bound(moebius().maps[0]), BigReal(1) / 4), tol(70));
    EXPECT_LT(err(derivative_bound(sine(Scalar(1, 2), Scalar(1, 2)).maps[1]), pi_value() / 12), tol(70));
    EXPECT_THROW(derivative_bound(MapSpec::moebius(Scalar(1), Scalar(0), Scalar(2), Scalar(-1))), domain_error);
}

TEST(CheckContraction, AffineSupIsTheRatio) {
    make_context(64);
    const auto r = check_contraction(cantor(), 64);
    EXPECT_LT(err(r.contraction_sup, BigReal(1) / 3), tol(70));
    EXPECT_TRUE(r.is_contracting);
    EXPECT_TRUE(r.maps_in_unit_interval);
}

TEST(CheckContraction, MoebiusSupAtTheLeftCorner) {
    make_context(64);
    const auto r = check_contraction(moebius(), 64);
    // |1/(z+2)^2| peaks at z = -1/4
    EXPECT_LT(err(r.contraction_sup, BigReal(16) / 49), tol(70));
    EXPECT_TRUE(r.is_contracting);
}

TEST(CheckContraction, SineAgreesWithDoubleGridOracle) {
    make_context(64);
    const auto r = check_contraction(sine(Scalar(1, 3), Scalar(2, 3)), 64);
    EXPECT_TRUE(r.is_contracting);
    EXPECT_LT(r.contraction_sup, BigReal("0.28"));

    // dense double-precision sweep of the whole rectangle
    double oracle = 0;
    const double eps = 0.1;
    for (int i = 0; i <= 400; ++i) {
        for (int j = 0; j <= 80; ++j) {
            const std::complex<double> z(-eps + (1 + 2 * eps) * i / 400.0, -eps + 2 * eps * j / 80.0);
            oracle = std::max(oracle, std::abs(M_PI / 12 * std::cos(M_PI * z / 4.0)));
        }
    }
    EXPECT_NEAR(r.contraction_sup.convert_to<double>(), oracle, 1e-4);
}

TEST(CheckContraction, MonotoneInEpsilon) {
    make_context(40);
    BigReal previous = 0;
    for (int d : {40, 20, 10, 5}) {
        auto cfg = moebius();
        cfg.epsilon = Scalar(1, d);
        const auto r = check_contraction(cfg, 64);
        EXPECT_GE(r.contraction_sup, previous);
        previous = r.contraction_sup;
    }
}

TEST(CheckContraction, ExpandingMapFails) {
    make_context(40);
    auto cfg = make_ifs({MapSpec::affine(Scalar(11, 10), Scalar(0)), MapSpec::affine(Scalar(1, 3), Scalar(2, 3))},
                        {Scalar(1, 2), Scalar(1, 2)});
    const auto r = check_contraction(cfg, 64);
    EXPECT_FALSE(r.is_contracting);
    EXPECT_FALSE(r.ok());
    bool named = false;
    for (const auto& m : r.messages) named = named || m.find("contraction check failed") != std::string::npos;
    EXPECT_TRUE(named);
    EXPECT_THROW(ValidatedSystem(cfg, make_context(40)), validation_error);
}

TEST(CheckContraction, LargestPassingEpsilonOnHalvingLadder) {
    make_context(40);
    // 1/(x+2): |1/(2-eps)^2| < 1 needs eps < 1, so eps = 3/2 fails and 3/4 passes
    auto cfg = moebius();
    cfg.epsilon = Scalar(3, 2);
    const auto r = check_contraction(cfg, 64);
    EXPECT_FALSE(r.is_contracting);
    ASSERT_TRUE(r.largest_passing_epsilon);
    EXPECT_LT(err(*r.largest_passing_epsilon, BigReal(3) / 4), tol(35));
}

TEST(CheckContraction, MapLeavingUnitInterval) {
    make_context(40);
    auto cfg = make_ifs({MapSpec::affine(Scalar(1, 2), Scalar(3, 4)), MapSpec::affine(Scalar(1, 3), Scalar(0))},
                        {Scalar(1, 2), Scalar(1, 2)});
    const auto r = check_contraction(cfg, 64);
    EXPECT_FALSE(r.maps_in_unit_interval);
    EXPECT_FALSE(r.ok());
}

TEST(CheckNonoverlap, Examples) {
    make_context(40);
    EXPECT_TRUE(check_nonoverlap(cantor(), 1).ok);
    EXPECT_TRUE(check_nonoverlap(cantor(), 4).ok);
    EXPECT_TRUE(check_nonoverlap(halves(), 1).ok);
    EXPECT_TRUE(check_nonoverlap(halves(), 3).ok);
    auto shifted = make_ifs({MapSpec::affine(Scalar(1, 2), Scalar(0)), MapSpec::affine(Scalar(1, 2), Scalar(1, 4))},
                            {Scalar(1, 2), Scalar(1, 2)});
    EXPECT_FALSE(check_nonoverlap(shifted, 1).ok);
    EXPECT_TRUE(check_nonoverlap(moebius(), 2).ok);
    EXPECT_TRUE(check_nonoverlap(sine(Scalar(1, 3), Scalar(2, 3)), 2).ok);
}

TEST(CheckNonoverlap, LevelOnePassImpliesDeeperPass) {
    make_context(40);
    for (const auto& cfg : {cantor(), halves(), moebius(), affine_pair(), sine(Scalar(1, 3), Scalar(2, 3))}) {
        ASSERT_TRUE(check_nonoverlap(cfg, 1).ok);
        EXPECT_TRUE(check_nonoverlap(cfg, 3).ok);
    }
}

TEST(CheckNonoverlap, NonMonotoneIsUnsupported) {
    make_context(40);
    // zero amplitude: constant map, derivative vanishes
    auto cfg = cantor();
    cfg.maps[0] = MapSpec::sine_affine(Scalar(0), Scalar(1, 4));
    EXPECT_THROW(check_nonoverlap(cfg, 1), unsupported_error);
}

TEST(CheckWeights, ConstantVectors) {
    make_context(40);
    EXPECT_TRUE(check_weights(cantor(), 101).ok);
    auto bad = cantor();
    bad.weights = WeightSpec::constant({Scalar(1, 3), Scalar(1, 3)});
    EXPECT_FALSE(check_weights(bad, 101).ok);
    bad.weights = WeightSpec::constant({Scalar(0), Scalar(1)});
    EXPECT_FALSE(check_weights(bad, 101).ok);
    bad.weights = WeightSpec::constant({Scalar(1, 2)});
    EXPECT_FALSE(check_weights(bad, 101).ok);
}

TEST(CheckWeights, Functions) {
    make_context(40);
    auto cfg = cantor();
    cfg.weights = WeightSpec::functions({Polynomial{{Scalar(1, 4), Scalar(1, 2)}},
                                         Polynomial{{Scalar(3, 4), Scalar(-1, 2)}}});
    EXPECT_TRUE(check_weights(cfg, 101).ok);
    cfg.weights = WeightSpec::functions({Polynomial{{Scalar(0), Scalar(1)}}, Polynomial{{Scalar(1), Scalar(-1)}}});
    const auto r = check_weights(cfg, 101);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.detail.find("sample 0"), std::string::npos);
}

TEST(Validate, ReportAndSystem) {
    auto ctx = make_context(40);
    ValidationOptions opts;
    opts.nonoverlap_level = 2;
    const auto r = validate(affine_pair(), opts);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.nonoverlapping);
    ASSERT_TRUE(r.nonoverlap_level_checked);
    EXPECT_EQ(*r.nonoverlap_level_checked, 2);

    const ValidatedSystem sys(moebius(), ctx);
    EXPECT_EQ(sys.size(), 2u);
    EXPECT_LT(err(sys.contraction_on_interval(), BigReal(1) / 4), tol(35));
    EXPECT_EQ(sys.context(), ctx);

    auto bad_q = affine_pair();
    bad_q.second_weights = WeightSpec::constant({Scalar(1, 2), Scalar(1, 3)});
    EXPECT_FALSE(validate(bad_q).ok());

    auto single = cantor();
    single.maps.pop_back();
    EXPECT_FALSE(validate(single).ok());
}
