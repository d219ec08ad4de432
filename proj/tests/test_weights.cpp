#include "tflab/weights.hpp"

#include <random>

#include <gtest/gtest.h>

namespace tflab
{
    namespace
    {
        RVector pt(Real a, Real b)
        {
            RVector r(2);
            r << a, b;
            return r;
        }

        std::vector<RVector> grid_sample(Real half, Real step)
        {
            std::vector<RVector> s;
            for (Real a = -half; a <= half + 1e-12; a += step)
                for (Real b = -half; b <= half + 1e-12; b += step)
                    s.push_back(pt(a, b));
            return s;
        }
    }  // namespace

    TEST(Weights, PolynomialValues)
    {
        EXPECT_DOUBLE_EQ(weight_eval(WeightSpec::polynomial(2), pt(0, 0)), 1);
        EXPECT_DOUBLE_EQ(weight_eval(WeightSpec::polynomial(2), pt(1, 0)), 2);
        EXPECT_NEAR(weight_eval(WeightSpec::polynomial(1), pt(3, 4)), std::sqrt(26.0), 1e-14);
        EXPECT_DOUBLE_EQ(weight_eval(WeightSpec::constant(), pt(7, -3)), 1);
        EXPECT_THROW(WeightSpec::polynomial(-1), ParameterError);
    }

    TEST(Weights, TabulatedMustBePositive)
    {
        auto w = WeightSpec::tabulated([](const RVector& r) { return r[0]; }, "x");
        EXPECT_DOUBLE_EQ(w(pt(2, 0)), 2);
        EXPECT_THROW(w(pt(-1, 0)), DomainError);
    }

    TEST(Weights, ModerateConstantOfPolynomialWeight)
    {
        // Exhaustive pair scan against the closed form (4/3)^{t/2}.
        const auto sample = grid_sample(3, 0.25);
        for (Real s : {1.0, 2.0})
        {
            const WeightSpec v = WeightSpec::polynomial(s);
            const auto est = moderate_constant_estimate(WeightFn(v), v, sample);
            const Real closed = polynomial_moderate_constant(s, s);
            EXPECT_LE(est.constant, closed * (1 + 1e-12));
            EXPECT_GT(est.constant, 1.0);  // not exactly submultiplicative
            EXPECT_NEAR(est.constant, closed, 0.02 * closed);
            EXPECT_FALSE(est.unbounded_growth);
        }
        EXPECT_DOUBLE_EQ(moderate_constant(WeightSpec::constant(), WeightSpec::polynomial(1)), 1);
        EXPECT_DOUBLE_EQ(moderate_constant(WeightSpec::polynomial(1), WeightSpec::polynomial(2)),
                         std::pow(4.0 / 3.0, 0.5));
        EXPECT_THROW(moderate_constant(WeightSpec::polynomial(3), WeightSpec::polynomial(1)), ParameterError);
    }

    TEST(Weights, ModerateConstantSpecialCases)
    {
        const auto sample = grid_sample(4, 0.5);
        const auto one = moderate_constant_estimate(WeightFn(WeightSpec::constant()), WeightSpec::polynomial(1), sample);
        EXPECT_DOUBLE_EQ(one.constant, 1);

        // v_s composed with the shear (y, eta) -> (y, y + eta): finite, bounded estimate.
        const WeightSpec v = WeightSpec::polynomial(1);
        WeightFn m = [&](const RVector& r) { return v(pt(r[0], r[0] + r[1])); };
        const auto est = moderate_constant_estimate(m, v, sample);
        EXPECT_TRUE(std::isfinite(est.constant));
        EXPECT_LE(est.constant, 3.0);
        EXPECT_FALSE(est.unbounded_growth);

        // exp(|r|) is not v_1-moderate: the sampled constant keeps growing.
        WeightFn e = [](const RVector& r) { return std::exp(r.norm()); };
        EXPECT_TRUE(moderate_constant_estimate(e, v, grid_sample(8, 0.5)).unbounded_growth);
        EXPECT_THROW(moderate_constant_estimate(m, v, {}), ParameterError);
    }

    TEST(Weights, TranslationBoundOnSequences)
    {
        const TruncatedLattice lat = build_lattice(1, 1, 1, 6);
        const WeightSpec v = WeightSpec::polynomial(2);
        const RVector m = weight_table(lat, WeightFn(v));
        std::mt19937 rng(11);
        std::uniform_real_distribution<Real> u(-1, 1);
        for (int trial = 0; trial < 20; ++trial)
        {
            CVector x = CVector::Zero(lat.size());
            for (Eigen::Index k = 0; k < lat.size(); ++k)
                if (lat.point(k).lpNorm<Eigen::Infinity>() <= 3)
                    x[k] = Complex(u(rng), u(rng));
            IVector g(2);
            g << trial % 4 - 2, trial % 3 - 1;
            const CVector y = translate_seq(lat, x, g).values;
            const Real bound = polynomial_moderate_constant(2, 2) * v(lat.base().point(g));
            for (Real p : {1.0, 2.0, inf})
                EXPECT_LE(lp_norm(y, p, m), bound * lp_norm(x, p, m) * (1 + 1e-12));
        }
    }
}  // namespace tflab
