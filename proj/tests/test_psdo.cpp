#include "tflab/psdo.hpp"

#include <random>

#include <gtest/gtest.h>

#include "battery.hpp"

namespace tflab
{
    namespace
    {
        constexpr Real kL = 16;
        constexpr Eigen::Index kN = 512;

        Real max_rel(const CVector& a, const CVector& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

        SampledSignal signal(unsigned seed)
        {
            std::mt19937 rng(seed);
            return testing::random_atom_signal(rng, kL, kN);
        }

        const GaborSystem& lab()
        {
            static const GaborSystem sys = testing::default_system();
            return sys;
        }
    }  // namespace

    TEST(Psdo, ConstantSymbolIsIdentity)
    {
        const SampledSignal f = signal(1);
        for (SymbolForm form : {SymbolForm::KN, SymbolForm::Weyl})
            EXPECT_LT(max_rel(apply_psdo({form, Symbol::one()}, f).data(), f.data()), 1e-8);
    }

    TEST(Psdo, KnMultiplierAndFioAgreement)
    {
        const SampledSignal f = signal(2);
        auto m = [](Real w) { return Complex(std::exp(-w * w / 4), std::sin(w)); };
        SampledSignal F = fourier(f);
        for (Eigen::Index l = 0; l < F.N(); ++l)
            F[l] *= m(F.position(l));
        const SampledSignal want = fourier(F, true);
        EXPECT_LT(max_rel(apply_psdo({SymbolForm::KN, Symbol::multiplier(m)}, f).data(), want.data()), 1e-8);
        // Frequency-only symbols give the same operator in both forms.
        EXPECT_LT(max_rel(apply_psdo({SymbolForm::Weyl, Symbol::multiplier(m)}, f).data(), want.data()), 1e-8);

        const Symbol s = Symbol::gaussian_bump(1.5);
        const SampledSignal a = apply_psdo({SymbolForm::KN, s}, f);
        const SampledSignal b = apply_fio(s, PhaseSpec::from_quadratic(QuadraticPhase::identity(1)), f);
        EXPECT_LT((a.data() - b.data()).cwiseAbs().maxCoeff(), 1e-10);
    }

    TEST(Psdo, WeylOfPositionIsMultiplication)
    {
        const SampledSignal f = signal(3);
        const Symbol x([](Real t, Real) { return Complex(t); }, "x");
        SampledSignal want = f;
        for (Eigen::Index j = 0; j < f.N(); ++j)
            want[j] *= f.position(j);
        EXPECT_LT(max_rel(apply_psdo({SymbolForm::Weyl, x}, f).data(), want.data()), 1e-8);
    }

    TEST(ConvertForm, ConstantsFrequencySymbolsAndOperators)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        EXPECT_NE(weyl_to_kn_sign(), 0);

        const PhaseSpaceFunction one = PhaseSpaceFunction::sample_on(g, [](Real, Real) { return Complex(1); });
        EXPECT_LT((convert_form(one, SymbolForm::Weyl, SymbolForm::KN).values().array() - 1.0).abs().maxCoeff(), 1e-12);

        const PhaseSpaceFunction wonly =
            PhaseSpaceFunction::sample_on(g, [](Real, Real w) { return Complex(std::exp(-w * w)); });
        EXPECT_LT((convert_form(wonly, SymbolForm::KN, SymbolForm::Weyl).values() - wonly.values()).cwiseAbs().maxCoeff(),
                  1e-12);

        // Random smooth bump: Weyl operator of sigma equals KN operator of its conversion, and back.
        std::mt19937 rng(17);
        std::uniform_real_distribution<Real> U(-1, 1);
        const Real cx = U(rng), cw = U(rng), k = U(rng);
        const PhaseSpaceFunction bump = PhaseSpaceFunction::sample_on(g, [=](Real x, Real w) {
            return std::exp(-kPi * ((x - cx) * (x - cx) + (w - cw) * (w - cw)) / 3) * Complex(1, k * x);
        });
        const CMatrix Kw = weyl_operator(bump).kernel;
        const CMatrix Kk = kn_operator(convert_form(bump, SymbolForm::Weyl, SymbolForm::KN)).kernel;
        EXPECT_LT((Kw - Kk).cwiseAbs().maxCoeff(), 1e-4 * Kw.cwiseAbs().maxCoeff());
        const PhaseSpaceFunction back =
            convert_form(convert_form(bump, SymbolForm::Weyl, SymbolForm::KN), SymbolForm::KN, SymbolForm::Weyl);
        EXPECT_LT((back.values() - bump.values()).cwiseAbs().maxCoeff(), 1e-12);
    }

    TEST(Localization, ResolutionOfIdentityAndZero)
    {
        const SampledSignal g = gaussian_window(kL, kN);
        const LocalizationSpec one{[](Real, Real) { return Complex(1); }, g, g};
        const LocalizationWeyl w = localization_to_weyl(one);
        EXPECT_LT(w.verification_error, 1e-3);
        const CMatrix K = weyl_operator(w.symbol).kernel;
        EXPECT_LT((K - CMatrix::Identity(kN, kN)).cwiseAbs().maxCoeff(), 1e-3);
        EXPECT_LT((localization_operator(one).kernel - CMatrix::Identity(kN, kN)).cwiseAbs().maxCoeff(), 1e-3);

        const LocalizationSpec zero{[](Real, Real) { return Complex(0); }, g, g};
        EXPECT_EQ(localization_to_weyl(zero).symbol.values().norm(), 0);

        // Gaussian multiplier: symbol a * W(g, g) in closed form, exp(-pi r^2 / 4) * 2 exp(-2 pi r^2)
        // = (8 / 9) exp(-2 pi r^2 / 9).
        const LocalizationSpec gs{[](Real x, Real w) { return Complex(std::exp(-kPi * (x * x + w * w) / 4)); }, g, g};
        const PhaseSpaceFunction s = localization_to_weyl(gs).symbol;
        Real err = 0;
        for (Eigen::Index i = 0; i < s.Nx(); i += 7)
            for (Eigen::Index k = 0; k < s.Nw(); k += 7)
            {
                const Real r2 = s.x(i) * s.x(i) + s.w(k) * s.w(k);
                err = std::max(err, std::abs(s(i, k) - 8.0 / 9.0 * std::exp(-kTwoPi * r2 / 9)));
            }
        EXPECT_LT(err, 1e-8);
    }

    TEST(WeylIdentity, TwoSymbols)
    {
        const GaborSystem& sys = lab();
        const auto pairs = sample_identity_pairs(sys.lattice(), 200, 4, 99);
        ASSERT_EQ(pairs.size(), 200u);
        for (const Symbol& s : {Symbol::one(), Symbol::gaussian_bump()})
        {
            const IdentityCheck chk = weyl_gabor_identity_check(s, sys, pairs);
            EXPECT_GT(chk.compared, 50);
            EXPECT_LE(chk.max_dev, 1e-3) << s.name();
        }
        const IdentityCheck z = weyl_gabor_identity_check(Symbol::zero(), sys, pairs);
        EXPECT_EQ(z.compared, 0);
    }
}  // namespace tflab
