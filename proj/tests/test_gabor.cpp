#include "tflab/gabor.hpp"

#include <random>

#include <gtest/gtest.h>

#include "battery.hpp"

namespace tflab
{
    namespace
    {
        const GaborSystem& lab()
        {
            static const GaborSystem sys = testing::default_system();
            return sys;
        }
    }  // namespace

    TEST(Gabor, AnalysisOfWindowAndShiftedWindow)
    {
        const GaborSystem& sys = lab();
        const TruncatedLattice& lat = sys.lattice();
        const CVector c = analysis(sys, sys.window());
        EXPECT_NEAR(std::abs(c[lat.origin_index()] - 1.0), 0, 1e-12);

        IVector mu(2);
        mu << 2, -3;  // (1, -1.5)
        const SampledSignal f = sys.atom(*lat.index_of(mu));
        const CVector cf = analysis(sys, f);
        const RVector m = lat.base().point(mu);
        for (Eigen::Index k = 0; k < lat.size(); ++k)
        {
            const Real d2 = (lat.point(k) - m).squaredNorm();
            EXPECT_NEAR(std::abs(cf[k]), std::exp(-kPi * d2 / 2), 1e-12);
        }

        SampledSignal z(1, sys.L(), sys.N());
        z.data().setZero();
        EXPECT_EQ(analysis(sys, z).norm(), 0);
    }

    TEST(Gabor, SynthesisIsAdjointOfAnalysis)
    {
        const GaborSystem& sys = lab();
        CVector e0 = CVector::Zero(sys.lattice().size());
        e0[sys.lattice().origin_index()] = 1;
        EXPECT_LT((synthesis(sys, e0).data() - sys.window().data()).norm(), 1e-15);

        std::mt19937 rng(4);
        std::normal_distribution<Real> n;
        for (int t = 0; t < 5; ++t)
        {
            CVector c(sys.lattice().size());
            for (auto& v : c)
                v = Complex(n(rng), n(rng));
            const SampledSignal f = testing::random_atom_signal(rng, sys.L(), sys.N());
            const Complex lhs = inner(synthesis(sys, c), f);
            const Complex rhs = c.dot(analysis(sys, f));  // sum conj(c) <f, pi g>, conjugated below
            EXPECT_LT(std::abs(lhs - std::conj(rhs)), 1e-10 * std::abs(lhs));
        }
        EXPECT_THROW(synthesis(sys, CVector::Zero(3)), ShapeError);
    }

    TEST(Gabor, RejectsOffGridLattice)
    {
        EXPECT_THROW(GaborSystem(gaussian_window(16, 512), build_lattice(0.3, 0.5, 1, 2)), ParameterError);
    }

    TEST(FrameBounds, GaussianHalfDensity)
    {
        const FrameBounds fb = frame_bounds(lab());
        EXPECT_GT(fb.A, 0.5);
        EXPECT_LT(fb.ratio(), 10);
        // Gaussian, alpha = beta = 1/2: S is close to (alpha beta)^{-1} = 4 on average.
        EXPECT_LT(fb.A, 4);
        EXPECT_GT(fb.B, 4);
    }

    TEST(FrameBounds, CriticalDensityDegenerates)
    {
        std::vector<Real> ratios;
        for (Real R : {4.0, 6.0, 8.0})
        {
            const GaborSystem sys(gaussian_window(32, 512), build_lattice(1, 1, 1, R));
            try
            {
                const FrameBounds fb = frame_bounds(sys);
                ratios.push_back(fb.A / fb.B);
            }
            catch (const NotAFrameError&)
            {
                ratios.push_back(0);
            }
        }
        EXPECT_LT(ratios[1], ratios[0]);
        EXPECT_LT(ratios[2], ratios[1]);
        const FrameBounds half = frame_bounds(lab());
        EXPECT_LT(ratios[2], 0.1 * half.A / half.B);
    }

    TEST(DualWindow, Reconstruction)
    {
        const GaborSystem& sys = lab();
        SolveReport rep;
        const SampledSignal h = dual_window(sys, &rep);
        EXPECT_LE(rep.residual, 1e-10);
        const GaborSystem dual = sys.with_window(h);
        const auto rel = [](const SampledSignal& a, const SampledSignal& f) { return (a.data() - f.data()).norm() / f.norm(); };

        // D_h C_g truncates the Gaussian-decaying g-coefficients.
        std::mt19937 rng(21);
        for (int t = 0; t < 5; ++t)
        {
            const SampledSignal f = testing::random_atom_signal(rng, sys.L(), sys.N());
            ASSERT_LE(tail_indicator(sys, f), 1e-8);
            EXPECT_LE(rel(synthesis(dual, analysis(sys, f)), f), 1e-9);
        }

        // D_g C_h truncates the h-coefficients, which only decay exponentially: at R = 5 it
        // reaches 1e-6 for the centered Gaussian, and for spread-out signals one unit later.
        EXPECT_LE(rel(synthesis(sys, analysis(dual, sys.window())), sys.window()), 1e-6);
        const GaborSystem wide = testing::default_system(6);
        const GaborSystem wide_dual = wide.with_window(dual_window(wide));
        for (int t = 0; t < 5; ++t)
        {
            const SampledSignal f = testing::random_atom_signal(rng, sys.L(), sys.N());
            EXPECT_LE(rel(synthesis(wide, analysis(wide_dual, f)), f), 1e-6);
        }
    }

    TEST(TightWindow, ParsevalAfterRetightening)
    {
        const GaborSystem& sys = lab();
        const GaborSystem tight = sys.with_window(tight_window(sys));
        const FrameBounds fb = frame_bounds(tight);
        EXPECT_TRUE(fb.tight(1e-6)) << fb.A << " " << fb.B;
        EXPECT_NEAR(fb.A, 1, 1e-6);

        std::mt19937 rng(8);
        for (int t = 0; t < 5; ++t)
        {
            const SampledSignal f = testing::random_atom_signal(rng, sys.L(), sys.N());
            EXPECT_NEAR(analysis(tight, f).squaredNorm(), f.norm() * f.norm(), 1e-6);
        }

        // Parseval system: the canonical dual is the window itself; a retightened
        // tight window is a multiple of itself.
        SolveReport rep;
        const SampledSignal h = dual_window(tight, &rep);
        EXPECT_LT((h.data() - tight.window().data()).norm() / tight.window().data().norm(), 1e-8);
        const SampledSignal again = tight_window(tight);
        EXPECT_LT((again.data() - tight.window().data()).norm() / tight.window().data().norm(), 1e-6);
    }
}  // namespace tflab
