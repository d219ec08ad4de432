#include "tflab/signal.hpp"

#include <random>

#include <gtest/gtest.h>

#include "battery.hpp"

namespace tflab
{
    namespace
    {
        constexpr Real kL = 16;
        constexpr Eigen::Index kN = 512;

        SampledSignal random_signal(unsigned seed)
        {
            std::mt19937 rng(seed);
            return testing::random_atom_signal(rng, kL, kN);
        }

        // Direct Riemann sum of int f(t) conj(g(t - x)) e^{-2 pi i w t} dt with g given in closed form.
        Complex stft_quadrature(const SampledSignal& f, Real x, Real w)
        {
            Complex acc = 0;
            for (Eigen::Index j = 0; j < f.N(); ++j)
            {
                const Real t = f.position(j);
                acc += f[j] * std::pow(2.0, 0.25) * std::exp(-kPi * (t - x) * (t - x)) * std::exp(-kTwoPi * kI * w * t);
            }
            return acc * f.dx();
        }
    }  // namespace

    TEST(Fourier, GaussianIsFixedPoint)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        const SampledSignal G = fourier(g);
        EXPECT_DOUBLE_EQ(G.L(), kN / kL);
        Real err = 0;
        for (Eigen::Index l = 0; l < kN; ++l)
        {
            const Real w = G.position(l);
            err = std::max(err, std::abs(G[l] - std::pow(2.0, 0.25) * std::exp(-kPi * w * w)));
        }
        EXPECT_LT(err, 1e-12);
    }

    TEST(Fourier, SpikeHasFlatModulusAndRoundTrip)
    {
        SampledSignal s(1, kL, kN);
        s.data().setZero();
        s[kN / 2 + 7] = 1;
        const CVector S = fourier(s).data();
        EXPECT_LT((S.cwiseAbs().array() - S.cwiseAbs().maxCoeff()).abs().maxCoeff(), 1e-13);

        const SampledSignal f = random_signal(1);
        std::mt19937 rng(5);
        std::normal_distribution<Real> n;
        SampledSignal r(1, kL, kN);
        for (Eigen::Index j = 0; j < kN; ++j)
            r[j] = Complex(n(rng), n(rng));
        for (const auto& x : {f, r})
        {
            const SampledSignal X = fourier(x);
            EXPECT_NEAR(X.norm(), x.norm(), 1e-12 * x.norm());
            EXPECT_LT((fourier(X, true).data() - x.data()).norm(), 1e-12 * x.data().norm());
        }
    }

    TEST(TfShift, IdentityUnitarityAndGroupLaw)
    {
        const SampledSignal f = random_signal(2);
        EXPECT_LT((tf_shift(f, 0, 0).data() - f.data()).norm(), 1e-15);
        bool snapped = false;
        const SampledSignal s = tf_shift(f, 1.25, -0.75, &snapped);
        EXPECT_FALSE(snapped);
        EXPECT_NEAR(s.norm(), f.norm(), 1e-13);
        tf_shift(f, 0.01, 0, &snapped);
        EXPECT_TRUE(snapped);

        const SampledSignal a = tf_shift(tf_shift(f, 0.5, 0), 1.25, 0);
        EXPECT_LT((a.data() - tf_shift(f, 1.75, 0).data()).norm(), 1e-13);

        // Shifted Gaussian in closed form.
        const SampledSignal g = gaussian_window(kL, kN);
        const SampledSignal p = tf_shift(g, 1, 2);
        Real err = 0;
        for (Eigen::Index j = 0; j < kN; ++j)
        {
            const Real t = g.position(j);
            err = std::max(err, std::abs(p[j] - std::exp(kTwoPi * kI * 2.0 * t) * std::pow(2.0, 0.25) *
                                                    std::exp(-kPi * (t - 1) * (t - 1))));
        }
        EXPECT_LT(err, 1e-12);
    }

    TEST(Stft, GaussianClosedFormAndQuadrature)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        EXPECT_NEAR(stft(g, g, {{0, 0}})[0].real(), 1, 1e-12);

        std::vector<TFPoint> pts;
        for (Real x : {-2.0, -0.5, 0.0, 1.0, 2.5})
            for (Real w : {-1.5, 0.0, 0.25, 2.0})
                pts.push_back({x, w});
        const CVector V = stft(g, g, pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            const Real want = std::exp(-kPi * (pts[i].x * pts[i].x + pts[i].w * pts[i].w) / 2);
            EXPECT_NEAR(std::abs(V[static_cast<Eigen::Index>(i)]), want, 1e-6 * want);
            const Complex q = stft_quadrature(g, pts[i].x, pts[i].w);
            EXPECT_LT(std::abs(V[static_cast<Eigen::Index>(i)] - q), 1e-12);
        }
    }

    TEST(Stft, Covariance)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        const Real mx = 1.5, mw = -1;
        const SampledSignal pg = tf_shift(g, mx, mw);
        for (const TFPoint& l : std::vector<TFPoint>{{0, 0}, {1, -0.5}, {2.5, 1}, {-1, 0.75}})
        {
            const Complex a = stft(pg, g, {l})[0];
            const Complex b = stft(g, g, {{l.x - mx, l.w - mw}})[0];
            EXPECT_NEAR(std::abs(a), std::abs(b), 1e-12);
        }
    }

    TEST(Stft, GridMatchesPointwise)
    {
        const SampledSignal f = random_signal(3);
        const SampledSignal g = gaussian_window(kL, kN);
        const PhaseSpaceFunction V = stft_grid(f, g, 8);
        EXPECT_EQ(V.Nx(), kN / 8);
        for (Eigen::Index i : {0, 10, 33, 63})
            for (Eigen::Index k : {0, 100, 256, 400})
                EXPECT_LT(std::abs(V(i, k) - stft(f, g, {{V.x(i), V.w(k)}})[0]), 1e-12);
    }

    TEST(ModulationNorm, MoyalIdentity)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        const WeightFn one = [](const RVector&) { return 1.0; };
        for (unsigned seed = 0; seed < 10; ++seed)
        {
            SampledSignal f = random_signal(100 + seed);
            f.data() *= 1.0 + seed;
            const auto est = modulation_norm_estimate(f, g, 2, 2, one);
            EXPECT_NEAR(est.value, f.norm() * g.norm(), 1e-4 * f.norm());
            EXPECT_TRUE(est.accurate);
        }
        SampledSignal z(1, kL, kN);
        z.data().setZero();
        EXPECT_EQ(modulation_norm_estimate(z, g, 1, 2, one).value, 0);
    }

    TEST(ModulationNorm, WeightedNormGrowsUnderDilation)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        const WeightSpec v = WeightSpec::polynomial(2);
        Real prev = 0;
        for (Real s : {1.0, 1.5, 2.0, 2.5})
        {
            SampledSignal f = SampledSignal::from_function(kL, kN, [&](Real t) { return Complex(std::exp(-kPi * t * t / (s * s))); });
            f.data() /= f.norm();
            const Real m = modulation_norm_estimate(f, g, 1, 1, WeightFn(v)).value;
            EXPECT_GT(m, prev);
            prev = m;
        }
    }

    TEST(DecayProfile, BumpOneAndZero)
    {
        auto sample = [&](const PhaseFn& s) { return PhaseSpaceFunction::sample(16, 64, 16, 64, s); };
        const std::vector<Real> radii = {0, 2, 4, 6, 8, 10};
        const PhaseFn bump = [](Real x, Real w) {
            const Real r2 = (x * x + w * w) / (2.5 * 2.5);
            return Complex(r2 < 1 ? std::exp(1 - 1 / (1 - r2)) : 0.0);
        };
        const DecayProfile pb = decay_at_infinity_profile(sample(bump), gaussian_phase_window(), radii);
        EXPECT_TRUE(pb.consistent);
        for (std::size_t i = 1; i < pb.tails.size(); ++i)
            EXPECT_LE(pb.tails[i], pb.tails[i - 1]);
        EXPECT_LT(pb.ratio, 1e-3);

        const DecayProfile p1 = decay_at_infinity_profile(sample([](Real, Real) { return Complex(1); }),
                                                          gaussian_phase_window(), radii);
        EXPECT_FALSE(p1.consistent);
        EXPECT_GT(p1.ratio, 0.1);

        const DecayProfile p0 = decay_at_infinity_profile(sample([](Real, Real) { return Complex(0); }),
                                                          gaussian_phase_window(), radii);
        for (Real t : p0.tails)
            EXPECT_EQ(t, 0);
        EXPECT_THROW(decay_at_infinity_profile(sample(bump), gaussian_phase_window(), {}), ParameterError);
    }

    TEST(CrossWigner, GaussianMassAndReality)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        const PhaseSpaceFunction W = cross_wigner(g, g);
        Real err = 0;
        for (Eigen::Index i = 0; i < W.Nx(); ++i)
            for (Eigen::Index k = 0; k < W.Nw(); ++k)
            {
                const Real x = W.x(i), w = W.w(k);
                // d = 1: W(g, g) = 2 exp(-2 pi (x^2 + w^2)).
                err = std::max(err, std::abs(W(i, k) - 2 * std::exp(-kTwoPi * (x * x + w * w))));
            }
        EXPECT_LT(err, 1e-4 * 2);

        const SampledSignal f = random_signal(9);
        const PhaseSpaceFunction Wf = cross_wigner(f, f);
        EXPECT_NEAR(Wf.values().sum().real() * Wf.dx() * Wf.dw(), f.norm() * f.norm(), 1e-8);
        EXPECT_LT(Wf.values().imag().cwiseAbs().maxCoeff(), 1e-10 * Wf.values().cwiseAbs().maxCoeff());
    }
}  // namespace tflab
