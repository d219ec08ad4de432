#pragma once

#include <utility>
#include <vector>

#include "tflab/fio.hpp"
#include "tflab/gabor.hpp"
#include "tflab/signal.hpp"
#include "tflab/types.hpp"

namespace tflab
{
    enum class SymbolForm
    {
        KN,   ///< Kohn-Nirenberg: int tau(x, w) fhat(w) e^{2 pi i x w} dw
        Weyl  ///< int int sigma((x + y)/2, w) e^{2 pi i (x - y) w} f(y) dy dw
    };

    struct PSDOSymbol
    {
        SymbolForm form = SymbolForm::KN;
        Symbol sigma = Symbol::one();
    };

    /// Kohn-Nirenberg operator; the same quadrature as fio_operator with Phi = x eta.
    Operator kn_operator(const Symbol& tau, Real L, Eigen::Index N);
    /// Kohn-Nirenberg operator of a symbol sampled on the signal's phase-space grid.
    Operator kn_operator(const PhaseSpaceFunction& tau);
    /// Weyl operator; the symbol is evaluated at the half-grid midpoints (x_j + x_k) / 2.
    Operator weyl_operator(const Symbol& sigma, Real L, Eigen::Index N);
    /// Weyl operator of a symbol sampled on the signal's phase-space grid (N x N, steps
    /// dx and 1 / L); midpoints come from trigonometric upsampling along x.
    Operator weyl_operator(const PhaseSpaceFunction& sigma);

    Operator psdo_operator(const PSDOSymbol& s, Real L, Eigen::Index N);
    SampledSignal apply_psdo(const PSDOSymbol& s, const SampledSignal& f);

    /// Converts a sampled symbol between forms via the multiplier exp(+-pi i xi t) on its
    /// Fourier transform. The sign is fixed on first use by an operator-equality
    /// self-test; ConsistencyError if neither sign passes.
    PhaseSpaceFunction convert_form(const PhaseSpaceFunction& sigma, SymbolForm from, SymbolForm to);
    /// Sign s with tau_hat = exp(s pi i xi t) sigma_hat (Weyl -> KN), from the self-test.
    int weyl_to_kn_sign();

    struct LocalizationSpec
    {
        PhaseFn a;             ///< multiplier on phase space
        SampledSignal phi1;    ///< analysis window
        SampledSignal phi2;    ///< synthesis window
    };

    /// f -> int a(lambda) V_{phi1} f(lambda) pi(lambda) phi2 d lambda by quadrature on the
    /// signal's phase-space grid.
    Operator localization_operator(const LocalizationSpec& spec);

    struct LocalizationWeyl
    {
        PhaseSpaceFunction symbol;   ///< a * W(phi2, phi1)
        Real verification_error = 0; ///< max |K_weyl - K_direct| / max |K_direct|
    };

    /// Weyl symbol a * W(phi2, phi1) by FFT convolution, checked against the direct
    /// localization sum; ConsistencyError if the kernels differ by more than tol.
    LocalizationWeyl localization_to_weyl(const LocalizationSpec& spec, Real tol = 1e-3);

    struct IdentityPair
    {
        IVector lambda;  ///< lattice coordinates
        IVector mu;
    };

    struct IdentityCheck
    {
        Eigen::Index pairs = 0;
        Eigen::Index compared = 0;  ///< pairs with |entry| >= floor
        Real max_dev = 0;
        IdentityPair worst;
    };

    /// Compares |<L_sigma pi(lambda) g, pi(lambda + mu) g>| with |V_{W(g,g)} sigma(lambda + mu/2, j(mu))|,
    /// j(xi, w) = (w, -xi), over the given pairs.
    IdentityCheck weyl_gabor_identity_check(const Symbol& sigma, const GaborSystem& sys,
                                            const std::vector<IdentityPair>& pairs, Real floor = 1e-8);

    /// Random pairs with lambda in the truncation and |mu|_inf <= max_offset (lattice units).
    std::vector<IdentityPair> sample_identity_pairs(const TruncatedLattice& lattice, std::size_t count, int max_offset,
                                                    unsigned seed);
}  // namespace tflab
